"""The numba and numpy versions of each kernel agree."""
import numpy as np
import pytest

from congbox import kernels

from conftest import field


@pytest.mark.parametrize("p,g", [(7, 3), (101, 2), (1009, 11), (65537, 3)])
def test_antilog(p, g):
    assert np.array_equal(kernels.antilog_table_jit(g, p), kernels.antilog_table_np(g, p))


@pytest.mark.parametrize("p", [7, 13, 101])
def test_char_transform_paths(p):
    ctx = field(p)
    rng = np.random.default_rng(p)
    pos = rng.integers(-1, p - 1, 9)
    w = rng.normal(size=(9, 4)) + 1j * rng.normal(size=(9, 4))
    a = kernels.char_transform_jit(pos, w, ctx.mult_roots)
    b = kernels.char_transform_np(pos, w, ctx.mult_roots)
    c = kernels.char_transform_dft(pos, w, ctx.mult_roots)
    assert np.abs(a - b).max() < 1e-9 * 9
    assert np.abs(a - c).max() < 1e-9 * 9


def test_char_transform_blocks():
    ctx = field(101)
    rng = np.random.default_rng(0)
    pos = rng.integers(0, 100, 30)
    w = rng.normal(size=(30, 2)) + 0j
    full = kernels.char_transform_np(pos, w, ctx.mult_roots)
    tiny = kernels.char_transform_np(pos, w, ctx.mult_roots, block=31)
    assert np.abs(full - tiny).max() < 1e-12


def _tables(rng, p, n, s, h):
    vals = rng.integers(0, p, (n, h))
    diag = rng.integers(0, p, (n, h, s))
    order = np.argsort(vals[-1], kind="stable").astype(np.int64)
    return vals, diag, order, vals[-1][order]


@pytest.mark.parametrize("n,s", [(2, 0), (2, 1), (3, 1), (3, 2), (4, 1)])
def test_brute_count_paths(n, s):
    p = 13
    ctx = field(p)
    rng = np.random.default_rng(n * 10 + s)
    vals, diag, order, srt = _tables(rng, p, n, s, 6)
    b = rng.integers(0, p, s)
    a = 5
    jit = kernels.brute_count_jit(vals, diag, a, b, p, ctx.inv, srt, order)
    ref = kernels.brute_count_np(vals, diag, a, b, p, ctx.inv)
    # plain nested loop
    import itertools
    naive = 0
    for idx in itertools.product(range(6), repeat=n):
        prod = 1
        for i, x in enumerate(idx):
            prod = prod * int(vals[i, x]) % p
        ok = prod == a and all(sum(int(diag[i, x, j]) for i, x in enumerate(idx)) % p == b[j]
                               for j in range(s))
        naive += ok
    assert jit == ref == naive


@pytest.mark.parametrize("p,lo,hi", [(11, 3, 8), (101, 20, 60)])
def test_pair_counts(p, lo, hi):
    xs = np.arange(lo, hi, dtype=np.int64)
    assert np.array_equal(kernels.pair_product_counts_jit(xs, p),
                          kernels.pair_product_counts_np(xs, p))


@pytest.mark.parametrize("m", [1, 7, 8, 20])
def test_char_transform_auto(m):
    ctx = field(101)
    rng = np.random.default_rng(m)
    pos = rng.integers(-1, 100, 15)
    w = rng.normal(size=(15, m)) + 1j * rng.normal(size=(15, m))
    ref = kernels.char_transform_np(pos, w, ctx.mult_roots)
    assert np.abs(kernels.char_transform_auto(pos, w, ctx.mult_roots) - ref).max() < 1e-9
