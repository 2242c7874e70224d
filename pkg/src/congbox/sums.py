"""Exact character and exponential sums over short intervals."""
from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import IntervalOutOfRange, SizeGuard, ValidationError
from .ffcore import FieldCtx, char_values, log_positions

# above this many terms a sum is accumulated with math.fsum
COMPENSATE_ABOVE = 10**5
QUADRUPLE_PAIR_CAP = 10**8


def default_batch_method() -> str:
    """``direct`` unless ``CONGBOX_BATCH_METHOD=dft``."""
    return os.environ.get("CONGBOX_BATCH_METHOD", "direct")


@dataclass(frozen=True)
class PolyMod:
    """Polynomial with residue coefficients, ``coeffs[d]`` multiplying X**d."""

    coeffs: tuple

    def __post_init__(self):
        if len(self.coeffs) < 1:
            raise ValidationError("a polynomial needs at least one coefficient")
        object.__setattr__(self, "coeffs", tuple(int(c) for c in self.coeffs))

    @classmethod
    def reduce(cls, coeffs, p: int) -> "PolyMod":
        return cls(tuple(int(c) % p for c in coeffs))

    @classmethod
    def monomial(cls, c: int, k: int, p: int) -> "PolyMod":
        return cls.reduce([0] * k + [c], p)

    @classmethod
    def identity(cls) -> "PolyMod":
        return cls((0, 1))

    @property
    def degree(self) -> int:
        """Highest index with a nonzero coefficient; 0 for constants."""
        for d in range(len(self.coeffs) - 1, 0, -1):
            if self.coeffs[d]:
                return d
        return 0

    def check(self, p: int) -> "PolyMod":
        if any(not 0 <= c < p for c in self.coeffs):
            raise ValidationError(f"coefficients of {self.coeffs} not reduced mod {p}")
        return self

    def __call__(self, xs, p: int) -> np.ndarray:
        """Horner evaluation mod p (int64 safe for p <= 2**31)."""
        xs = np.mod(np.asarray(xs, dtype=np.int64), p)
        acc = np.zeros_like(xs)
        for c in reversed(self.coeffs):
            acc = (acc * xs + c) % p
        return acc


@dataclass(frozen=True)
class IntervalWeights:
    """Weights ``w[0..h-1]`` attached to the points ``u+1, ..., u+h``."""

    u: int
    h: int
    w: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.w, dtype=np.complex128).reshape(-1)
        if w.size != self.h:
            raise ValidationError(f"expected {self.h} weights, got {w.size}")
        if np.any(np.abs(w) > 1 + 1e-12):
            raise ValidationError("weights must satisfy |w| <= 1")
        object.__setattr__(self, "w", w)

    @classmethod
    def ones(cls, u: int, h: int) -> "IntervalWeights":
        return cls(u, h, np.ones(h, dtype=np.complex128))

    @property
    def points(self) -> np.ndarray:
        return np.arange(self.u + 1, self.u + self.h + 1, dtype=np.int64)


def check_interval(ctx: FieldCtx, u: int, h: int) -> None:
    if h < 1 or u < 0 or u + h > ctx.p - 1:
        raise IntervalOutOfRange(
            f"interval [u+1, u+h] = [{u + 1}, {u + h}] must lie in [1, {ctx.p - 1}]")


def _total(terms: np.ndarray) -> complex:
    if terms.size > COMPENSATE_ABOVE:
        return complex(math.fsum(terms.real), math.fsum(terms.imag))
    total = 0j
    for v in terms.tolist():  # ascending x, fixed order
        total += v
    return total


def exp_sum(ctx: FieldCtx, F: PolyMod, u: int, h: int) -> complex:
    """``sum_{x=u+1}^{u+h} e_p(F(x))``."""
    check_interval(ctx, u, h)
    F.check(ctx.p)
    xs = np.arange(u + 1, u + h + 1, dtype=np.int64)
    return _total(ctx.add_roots[F(xs, ctx.p)])


def mixed_char_sum(ctx: FieldCtx, t: int, G: PolyMod | None, F: PolyMod,
                   u: int, h: int) -> complex:
    """``sum_{x=u+1}^{u+h} chi_t(G(x)) e_p(F(x))``; G=None means G(X)=X."""
    check_interval(ctx, u, h)
    ctx.check_index(t)
    F.check(ctx.p)
    xs = np.arange(u + 1, u + h + 1, dtype=np.int64)
    gx = xs if G is None else G.check(ctx.p)(xs, ctx.p)
    return _total(char_values(ctx, t, gx) * ctx.add_roots[F(xs, ctx.p)])


def batch_char_sums(ctx: FieldCtx, wts: IntervalWeights, method: str | None = None) -> np.ndarray:
    """All ``p-1`` weighted character sums ``sum_x w[x] chi_t(x)``, indexed by t.

    ``method`` is ``direct`` (O(p h)) or ``dft`` (scatter to discrete logs,
    then one transform of length p-1).
    """
    check_interval(ctx, wts.u, wts.h)
    method = method or default_batch_method()
    pos = log_positions(ctx, wts.points)
    w = wts.w[:, None]
    if method == "direct":
        out = kernels.char_transform(pos, w, ctx.mult_roots)
    elif method == "dft":
        out = kernels.char_transform_dft(pos, w, ctx.mult_roots)
    else:
        raise ValidationError(f"unknown batch method {method!r}")
    return out[:, 0]


def fourth_moment(ctx: FieldCtx, wts: IntervalWeights, method: str | None = None) -> float:
    """``sum over all characters of |sum_x w[x] chi(x)|**4``."""
    sq = np.abs(batch_char_sums(ctx, wts, method)) ** 2
    return math.fsum(sq * sq)


def _pair_guard(h: int, cap: int) -> None:
    if h * h > cap:
        raise SizeGuard(f"h**2 = {h * h} pairs exceeds the cap {cap}")


def acz_quadruple_count(ctx: FieldCtx, u: int, h: int, cap: int = QUADRUPLE_PAIR_CAP) -> int:
    """Ordered quadruples in ``[u+1, u+h]**4`` with ``x1 x2 = x3 x4 (mod p)``.

    Integer-only: pairs are bucketed by product and multiplicities squared.
    """
    check_interval(ctx, u, h)
    _pair_guard(h, cap)
    xs = np.arange(u + 1, u + h + 1, dtype=np.int64)
    counts = kernels.pair_product_counts(xs, ctx.p)
    return int(np.dot(counts, counts))


def weighted_quadruple_sum(ctx: FieldCtx, wts: IntervalWeights,
                           cap: int = QUADRUPLE_PAIR_CAP) -> float:
    """``sum over x1 x2 = x3 x4 of w1 w2 conj(w3 w4)`` in O(h**2).

    Equals ``sum_v |A_v|**2`` where ``A_v`` collects ``w1 w2`` over pairs with
    product ``v``, so the result is real and nonnegative.
    """
    check_interval(ctx, wts.u, wts.h)
    _pair_guard(wts.h, cap)
    xs = wts.points
    prods = ((xs[:, None] * xs[None, :]) % ctx.p).ravel()
    ww = (wts.w[:, None] * wts.w[None, :]).ravel()
    re = np.bincount(prods, weights=ww.real, minlength=ctx.p)
    im = np.bincount(prods, weights=ww.imag, minlength=ctx.p)
    return math.fsum(re * re + im * im)


def weighted_quadruple_sum_bruteforce(ctx: FieldCtx, wts: IntervalWeights) -> complex:
    """O(h**4) reference for :func:`weighted_quadruple_sum` (small h only)."""
    check_interval(ctx, wts.u, wts.h)
    p = ctx.p
    xs = wts.points.tolist()
    w = wts.w.tolist()
    total = 0j
    for i1, x1 in enumerate(xs):
        for i2, x2 in enumerate(xs):
            left = x1 * x2 % p
            for i3, x3 in enumerate(xs):
                for i4, x4 in enumerate(xs):
                    if left == x3 * x4 % p:
                        total += w[i1] * w[i2] * (w[i3] * w[i4]).conjugate()
    return total
