"""Seeded property battery behind ``congbox verify``."""
from __future__ import annotations

import dataclasses
from typing import NamedTuple

import numpy as np

from .counting import BoxSpec, SystemSpec, count_bruteforce, count_spectral
from .errors import ValidationError
from .ffcore import FieldCtx, build_field_ctx
from .sums import (IntervalWeights, acz_quadruple_count, batch_char_sums, fourth_moment,
                   weighted_quadruple_sum)

SMALL_PRIMES = (7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83,
                89, 97)


class Check(NamedTuple):
    name: str
    ok: bool
    detail: str = ""


def random_weights(rng, h: int) -> np.ndarray:
    """Complex weights with modulus uniform in [0, 1] and uniform phase."""
    return rng.uniform(0, 1, h) * np.exp(2j * np.pi * rng.uniform(0, 1, h))


def corrupt(ctx: FieldCtx) -> FieldCtx:
    """Copy of ``ctx`` with two discrete-log entries swapped (fault injection)."""
    ind = ctx.ind.copy()
    ind[2], ind[3] = ind[3], ind[2]
    return dataclasses.replace(ctx, ind=ind)


def check_field(ctx: FieldCtx) -> list[Check]:
    p, q = ctx.p, ctx.p - 1
    xs = np.arange(1, p, dtype=np.int64)
    out = []
    back = ctx.antilog[ctx.ind[xs]]
    out.append(Check("discrete-log table", bool(np.array_equal(back, xs)),
                     f"p={p}: g**ind[x] != x at {int(np.sum(back != xs))} residues"))
    out.append(Check("log bijection", bool(np.array_equal(np.sort(ctx.ind[xs]), np.arange(q))),
                     f"p={p}"))
    return out


def check_characters(ctx: FieldCtx, rng) -> list[Check]:
    p, q = ctx.p, ctx.p - 1
    xs = np.arange(1, p, dtype=np.int64)
    ts = np.arange(q, dtype=np.int64)
    table = ctx.mult_roots[(ts[:, None] * ctx.ind[xs][None, :]) % q]  # [t, x-1]
    out = []
    x, y = rng.integers(1, p, 2)
    lhs = table[:, (x * y) % p - 1]
    rhs = table[:, x - 1] * table[:, y - 1]
    err = float(np.max(np.abs(lhs - rhs)))
    out.append(Check("multiplicativity", err < 1e-12, f"p={p}, x={x}, y={y}: err {err:.3g}"))
    expect_t = np.where(ts == 0, q, 0)
    err = float(np.max(np.abs(table.sum(axis=1) - expect_t)))
    out.append(Check("orthogonality in x", err < 1e-9 * p, f"p={p}: err {err:.3g}"))
    expect_x = np.where(xs == 1, q, 0)
    err = float(np.max(np.abs(table.sum(axis=0) - expect_x)))
    out.append(Check("orthogonality in t", err < 1e-9 * p, f"p={p}: err {err:.3g}"))
    c = int(rng.integers(1, p))
    err = abs(ctx.add_roots[(c * np.arange(p)) % p].sum())
    out.append(Check("complete additive sum", err < 1e-9 * p, f"p={p}, c={c}: err {err:.3g}"))
    return out


def check_moments(ctx: FieldCtx, rng) -> list[Check]:
    p = ctx.p
    h = int(rng.integers(1, min(p - 1, 12) + 1))
    u = int(rng.integers(0, p - h))
    wts = IntervalWeights(u, h, random_weights(rng, h))
    out = []
    T = batch_char_sums(ctx, wts)
    lhs = float(np.sum(np.abs(T) ** 2))
    rhs = (p - 1) * float(np.sum(np.abs(wts.w) ** 2))
    out.append(Check("parseval", abs(lhs - rhs) <= 1e-8 * max(rhs, 1e-300),
                     f"p={p}, u={u}, h={h}: {lhs!r} vs {rhs!r}"))
    dft = batch_char_sums(ctx, wts, method="dft")
    err = float(np.max(np.abs(T - dft)))
    out.append(Check("direct = dft", err <= 1e-9 * h, f"p={p}: err {err:.3g}"))
    m4 = fourth_moment(ctx, wts)
    ref = (p - 1) * weighted_quadruple_sum(ctx, wts)
    out.append(Check("fourth-moment identity", abs(m4 - ref) <= 1e-6 * ref,
                     f"p={p}, u={u}, h={h}: {m4!r} vs {ref!r}"))
    ones = IntervalWeights.ones(u, h)
    m4 = fourth_moment(ctx, ones)
    ref = (p - 1) * acz_quadruple_count(ctx, u, h)
    out.append(Check("fourth moment = (p-1) x quadruple count", abs(m4 - ref) <= 1e-6 * ref,
                     f"p={p}, u={u}, h={h}: {m4!r} vs {ref}"))
    return out


def random_instance(rng, p: int, n: int | None = None, s: int | None = None,
                    h_max: int | None = None, k_range=(3, 7)):
    """Random admissible system and box for the oracle comparison."""
    n = int(rng.integers(3, 5)) if n is None else n
    s = int(rng.integers(1, 3)) if s is None else s
    k_lo, k_hi = k_range
    k = tuple(tuple(int(v) for v in np.sort(rng.choice(np.arange(k_lo, k_hi + 1), s, replace=False)))
              for _ in range(n))
    c = tuple(tuple(int(v) for v in rng.integers(1, p, s)) for _ in range(n))
    b = tuple(int(v) for v in rng.integers(0, p, s))
    sys = SystemSpec(n, s, int(rng.integers(1, p)), b, c, k, paper_regime=True)
    h_top = p - 1 if h_max is None else min(h_max, p - 1)
    h = int(rng.integers(1, h_top + 1))
    u = tuple(int(v) for v in rng.integers(0, p - h, n))
    return sys, BoxSpec(u, h)


def check_oracle(ctx: FieldCtx, rng) -> list[Check]:
    sys, box = random_instance(rng, ctx.p, h_max=24)
    brute = count_bruteforce(ctx, sys, box)
    res = count_spectral(ctx, sys, box)
    ok = brute == res.count and res.residual < 1e-6 * max(1, brute)
    return [Check("spectral = brute force", ok,
                  f"p={ctx.p}, {sys}, {box}: brute {brute}, spectral {res.count}")]


def run_battery(size: int, seed: int, inject_fault: bool = False) -> list[Check]:
    if size < 1:
        raise ValidationError("battery size must be >= 1")
    rng = np.random.default_rng(seed)
    checks = []
    for _ in range(size):
        p = int(rng.choice(SMALL_PRIMES))
        ctx = build_field_ctx(p)
        if inject_fault:
            ctx = corrupt(ctx)
        checks += check_field(ctx)
        checks += check_characters(ctx, rng)
        checks += check_moments(ctx, rng)
        checks += check_oracle(ctx, rng)
    return checks
