"""
Hot loops.

Every kernel exists twice: a ``_jit`` version compiled with numba and a
``_np`` version in plain numpy.  The public name dispatches on
``congbox._jit.JIT_ENABLED``; both versions are importable so tests and the
benchmark can compare them directly.
"""
import itertools

import numpy as np

from ._jit import JIT_ENABLED, njit


# -- discrete-log table ------------------------------------------------------

@njit
def antilog_table_jit(g, p):
    out = np.empty(p - 1, dtype=np.int64)
    v = 1
    for j in range(p - 1):
        out[j] = v
        v = (v * g) % p
    return out


def antilog_table_np(g, p):
    out = np.empty(p - 1, dtype=np.int64)
    out[0] = 1
    filled = 1
    while filled < p - 1:
        m = min(filled, p - 1 - filled)
        out[filled:filled + m] = (out[:m] * pow(g, filled, p)) % p
        filled += m
    return out


# -- character transform -----------------------------------------------------
#   out[t, l] = sum_x mult_roots[(t * pos[x]) % (p-1)] * w[x, l],
#   skipping pos[x] < 0 (the chi(0) = 0 convention).

@njit
def char_transform_jit(pos, w, mult_roots):
    q = mult_roots.shape[0]
    h, m = w.shape
    out = np.zeros((q, m), dtype=np.complex128)
    for x in range(h):
        step = pos[x]
        if step < 0:
            continue
        idx = 0
        for t in range(q):
            r = mult_roots[idx]
            for l in range(m):
                out[t, l] += r * w[x, l]
            idx += step
            if idx >= q:
                idx -= q
    return out


def char_transform_np(pos, w, mult_roots, block=1 << 22):
    q = mult_roots.shape[0]
    keep = pos >= 0
    pos, w = pos[keep], w[keep]
    out = np.zeros((q, w.shape[1]), dtype=np.complex128)
    if pos.size == 0:
        return out
    rows = max(1, block // pos.size)
    for t0 in range(0, q, rows):
        t = np.arange(t0, min(q, t0 + rows), dtype=np.int64)
        out[t0:t0 + t.size] = mult_roots[(t[:, None] * pos[None, :]) % q] @ w
    return out


def char_transform_dft(pos, w, mult_roots):
    """Same result via scatter to log positions and an inverse DFT of length p-1."""
    q = mult_roots.shape[0]
    keep = pos >= 0
    spread = np.zeros((q, w.shape[1]), dtype=np.complex128)
    np.add.at(spread, pos[keep], w[keep])
    return np.fft.ifft(spread, axis=0) * q


# -- brute-force enumeration ---------------------------------------------------
#   vals[i, x]    = G_i(box_i[x]) mod p
#   diag[i, x, j] = c_ij * box_i[x]**k_ij mod p
#   The last variable is not looped: its candidates are looked up by the
#   product value they must supply.

@njit
def brute_count_jit(vals, diag, a, b, p, inv, last_sorted, last_order):
    n, h = vals.shape
    s = b.shape[0]
    m = n - 1
    idx = np.zeros(m, dtype=np.int64)
    pp = np.ones(m + 1, dtype=np.int64)
    ps = np.zeros((m + 1, s), dtype=np.int64)
    for d in range(m):
        pp[d + 1] = (pp[d] * vals[d, 0]) % p
        for j in range(s):
            ps[d + 1, j] = (ps[d, j] + diag[d, 0, j]) % p
    count = 0
    while True:
        pr = pp[m]
        if pr != 0:
            target = (a * inv[pr]) % p
            lo = np.searchsorted(last_sorted, target, side="left")
            hi = np.searchsorted(last_sorted, target, side="right")
            for q in range(lo, hi):
                x = last_order[q]
                ok = True
                for j in range(s):
                    if (ps[m, j] + diag[m, x, j]) % p != b[j]:
                        ok = False
                        break
                if ok:
                    count += 1
        d = m - 1
        while d >= 0:
            idx[d] += 1
            if idx[d] < h:
                break
            idx[d] = 0
            d -= 1
        if d < 0:
            break
        for e in range(d, m):
            pp[e + 1] = (pp[e] * vals[e, idx[e]]) % p
            for j in range(s):
                ps[e + 1, j] = (ps[e, j] + diag[e, idx[e], j]) % p
    return count


def brute_count_np(vals, diag, a, b, p, inv, last_sorted=None, last_order=None):
    n, h = vals.shape
    s = b.shape[0]
    if n == 1:
        hit = vals[0] == a
        for j in range(s):
            hit &= diag[0, :, j] == b[j]
        return int(hit.sum())
    count = 0
    for head in itertools.product(range(h), repeat=n - 2):
        pr = 1
        sums = np.zeros(s, dtype=np.int64)
        for i, x in enumerate(head):
            pr = (pr * int(vals[i, x])) % p
            sums = (sums + diag[i, x]) % p
        if pr == 0:
            continue
        prod = (pr * vals[n - 2][:, None] % p) * vals[n - 1][None, :] % p
        hit = prod == a
        for j in range(s):
            tot = (sums[j] + diag[n - 2, :, j][:, None] + diag[n - 1, :, j][None, :]) % p
            hit &= tot == b[j]
        count += int(hit.sum())
    return count


# -- multiplicative pair counts -----------------------------------------------

@njit
def pair_product_counts_jit(xs, p):
    out = np.zeros(p, dtype=np.int64)
    h = xs.shape[0]
    for i in range(h):
        xi = xs[i]
        for j in range(h):
            out[(xi * xs[j]) % p] += 1
    return out


def pair_product_counts_np(xs, p):
    prods = (xs[:, None] * xs[None, :]) % p
    return np.bincount(prods.ravel(), minlength=p).astype(np.int64)


# BLAS beats the compiled loop once several twist columns share one gather
JIT_TRANSFORM_MAX_COLUMNS = 8


def char_transform_auto(pos, w, mult_roots):
    if w.shape[1] < JIT_TRANSFORM_MAX_COLUMNS:
        return char_transform_jit(pos, w, mult_roots)
    return char_transform_np(pos, w, mult_roots)


if JIT_ENABLED:
    antilog_table = antilog_table_jit
    char_transform = char_transform_auto
    brute_count = brute_count_jit
    pair_product_counts = pair_product_counts_jit
else:
    antilog_table = antilog_table_np
    char_transform = char_transform_np
    brute_count = brute_count_np
    pair_product_counts = pair_product_counts_np
