"""Counting box points on a product congruence plus diagonal congruences.

The system, for variables ``x_1..x_n`` in a box of side ``h``::

    G_1(x_1) ... G_n(x_n) = a                 (mod p)
    sum_i c[i][j] * x_i**k[i][j] = b[j]       (mod p),  j = 1..s

with ``G_i(X) = X`` by default.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import kernels
from .errors import CostGuard, PrecisionLoss, SizeGuard, ValidationError
from .ffcore import FieldCtx, log_positions
from .sums import PolyMod

BRUTE_CAP = 10**9
SPECTRAL_CAP = 10**10
# complex entries per transform block in count_spectral
CHUNK_ENTRIES = 1 << 21


@dataclass(frozen=True)
class SystemSpec:
    n: int
    s: int
    a: int
    b: tuple = ()
    c: tuple = ()
    k: tuple = ()
    product_form: tuple | None = None
    paper_regime: bool = False

    def __post_init__(self):
        conv = lambda rows: tuple(tuple(int(v) for v in row) for row in rows)
        object.__setattr__(self, "b", tuple(int(v) for v in self.b))
        object.__setattr__(self, "c", conv(self.c) if self.s else ((),) * self.n)
        object.__setattr__(self, "k", conv(self.k) if self.s else ((),) * self.n)
        if self.product_form is not None:
            object.__setattr__(self, "product_form", tuple(self.product_form))

    @classmethod
    def uniform(cls, n: int, a: int, b, c: int = 1, k=3, **kw) -> "SystemSpec":
        """Same coefficient and exponent row for every variable."""
        b = tuple(b)
        krow = (k,) * len(b) if isinstance(k, int) else tuple(k)
        return cls(n, len(b), a, b, ((c,) * len(b),) * n, (krow,) * n, **kw)

    @property
    def k_min(self) -> int:
        return min(v for row in self.k for v in row)

    @property
    def k_max(self) -> int:
        return max(v for row in self.k for v in row)

    def G(self, i: int) -> PolyMod | None:
        return None if self.product_form is None else self.product_form[i]

    def validate(self, p: int) -> list[str]:
        """Raise on broken invariants; return soft warnings."""
        warnings = []
        if self.n < 2:
            raise ValidationError(f"n={self.n}: need at least 2 variables")
        if self.s < 0:
            raise ValidationError("s must be nonnegative")
        if self.n == 2:
            warnings.append("n=2 is outside the theorem's regime (n >= 3)")
        if self.s == 0:
            warnings.append("s=0: product congruence only, outside the theorem's regime")
        if len(self.b) != self.s:
            raise ValidationError(f"b has {len(self.b)} entries, expected s={self.s}")
        for name, rows in (("c", self.c), ("k", self.k)):
            if len(rows) != self.n or any(len(r) != self.s for r in rows):
                raise ValidationError(f"{name} must be an n x s array ({self.n} x {self.s})")
        if self.a % p == 0:
            raise ValidationError(f"gcd(a, p) != 1: a={self.a} is divisible by p={p}")
        for i, row in enumerate(self.c):
            for j, cij in enumerate(row):
                if cij % p == 0:
                    raise ValidationError(f"gcd(c[{i}][{j}], p) != 1: c={cij}, p={p}")
        for i, row in enumerate(self.k):
            if any(e < 1 for e in row):
                raise ValidationError(f"exponents must be >= 1, row {i} is {row}")
            if row and (row[0] < 3 or any(x >= y for x, y in zip(row, row[1:]))):
                msg = f"exponent row {i} = {row} violates 3 <= k_i1 < ... < k_is"
                if self.paper_regime:
                    raise ValidationError(msg)
                warnings.append(msg)
        if self.product_form is not None:
            if len(self.product_form) != self.n:
                raise ValidationError("product_form needs one polynomial per variable")
            for i, G in enumerate(self.product_form):
                if G is None:
                    continue
                G.check(p)
                m = G.degree
                if m >= 1 and G.coeffs[m] == 1 and not any(G.coeffs[:m]):
                    if math.gcd(m, p - 1) != 1:
                        raise ValidationError(
                            f"power form x_{i + 1}**{m} needs gcd(m, p-1) = 1 (p={p})")
        return warnings


@dataclass(frozen=True)
class BoxSpec:
    """The cube ``prod_i [u_i + 1, u_i + h]``."""

    u: tuple
    h: int

    def __post_init__(self):
        object.__setattr__(self, "u", tuple(int(v) for v in self.u))

    @classmethod
    def full(cls, n: int, p: int) -> "BoxSpec":
        return cls((0,) * n, p - 1)

    def validate(self, p: int, n: int) -> None:
        if len(self.u) != n:
            raise ValidationError(f"box has {len(self.u)} starts, system has n={n}")
        if self.h < 1:
            raise ValidationError("box side h must be >= 1")
        for i, ui in enumerate(self.u):
            if ui < 0 or ui + self.h >= p:
                raise ValidationError(
                    f"axis {i}: [{ui + 1}, {ui + self.h}] must lie inside [1, p-1] (p={p})")

    def axis(self, i: int) -> np.ndarray:
        return np.arange(self.u[i] + 1, self.u[i] + self.h + 1, dtype=np.int64)


@dataclass
class CountResult:
    """Exact count with the decomposition of the character-sum identity.

    ``main_term`` is ``h**n / ((p-1) p**s)``; ``zero_correction`` is the
    (principal, lambda=0) term minus ``main_term`` and is nonzero only when
    some ``G_i`` vanishes inside the box.  ``r1`` collects non-principal
    characters, ``r2`` the principal character with nonzero twists.
    """

    count: int
    main_term: float
    r1: complex
    r2: complex
    zero_correction: float = 0.0
    residual: float = 0.0
    warnings: list = field(default_factory=list)

    @property
    def total(self) -> complex:
        return self.main_term + self.zero_correction + self.r1 + self.r2


class Density(NamedTuple):
    theorem: float    # h**n / p**(s+1)
    separated: float  # h**n / ((p-1) p**s)


def predicted_density(sys: SystemSpec, box: BoxSpec, p: int) -> Density:
    if box.h < 1:
        raise ValidationError("box side h must be >= 1")
    hn = float(box.h) ** sys.n
    return Density(hn / float(p) ** (sys.s + 1), hn / ((p - 1) * float(p) ** sys.s))


def powmod_array(xs: np.ndarray, e: int, p: int) -> np.ndarray:
    """Elementwise ``xs**e mod p`` by square-and-multiply."""
    result = np.ones_like(xs)
    base = xs % p
    while e:
        if e & 1:
            result = (result * base) % p
        base = (base * base) % p
        e >>= 1
    return result


def _axis_tables(ctx: FieldCtx, sys: SystemSpec, box: BoxSpec, i: int):
    """G_i values and diagonal terms ``c_ij x**k_ij`` along axis i."""
    p = ctx.p
    xs = box.axis(i)
    G = sys.G(i)
    vals = xs % p if G is None else G(xs, p)
    diag = np.empty((xs.size, sys.s), dtype=np.int64)
    for j in range(sys.s):
        # x != 0 on the box, so exponents reduce mod p-1
        e = sys.k[i][j] % (p - 1)
        diag[:, j] = (sys.c[i][j] % p) * powmod_array(xs, e, p) % p
    return vals, diag


def _prepare(ctx: FieldCtx, sys: SystemSpec, box: BoxSpec) -> list[str]:
    warnings = sys.validate(ctx.p)
    box.validate(ctx.p, sys.n)
    return warnings


def count_bruteforce(ctx: FieldCtx, sys: SystemSpec, box: BoxSpec,
                     cap: int = BRUTE_CAP, force: bool = False) -> int:
    """Count by enumerating the box (the last coordinate is looked up, not looped)."""
    _prepare(ctx, sys, box)
    work = box.h ** sys.n
    if work > cap and not force:
        raise SizeGuard(f"h**n = {work} evaluations exceeds the cap {cap}")
    p = ctx.p
    tables = [_axis_tables(ctx, sys, box, i) for i in range(sys.n)]
    vals = np.stack([t[0] for t in tables])
    diag = np.stack([t[1] for t in tables])
    order = np.argsort(vals[-1], kind="stable").astype(np.int64)
    last_sorted = vals[-1][order]
    b = np.array([v % p for v in sys.b], dtype=np.int64)
    return int(kernels.brute_count(vals, diag, sys.a % p, b, p, ctx.inv, last_sorted, order))


def _lambda_block(start: int, stop: int, s: int, p: int) -> np.ndarray:
    """Row-major lambda vectors with indices in [start, stop)."""
    idx = np.arange(start, stop, dtype=np.int64)
    lam = np.empty((idx.size, s), dtype=np.int64)
    for j in range(s - 1, -1, -1):
        lam[:, j] = idx % p
        idx //= p
    return lam


def count_spectral(ctx: FieldCtx, sys: SystemSpec, box: BoxSpec, cap: int = SPECTRAL_CAP,
                   method: str = "direct", workers: int = 1) -> CountResult:
    """Exact count through the character / additive-character expansion.

    For every twist vector ``lam`` in ``[0, p-1]**s`` and every character
    ``t`` the one-dimensional sums
    ``T_i(t; lam) = sum_x chi_t(G_i(x)) e_p(sum_j lam_j c_ij x**k_ij)``
    are formed for all t at once (``method`` selects the transform), and
    ``N = sum_lam e_p(-lam.b) sum_t chi_t(a^-1) prod_i T_i / ((p-1) p**s)``.
    """
    warnings = _prepare(ctx, sys, box)
    p, q, n, s, h = ctx.p, ctx.p - 1, sys.n, sys.s, box.h
    n_lam = p ** s
    cost = n_lam * q * n * h
    if cost > cap:
        raise CostGuard(f"estimated {cost:.3g} term operations exceeds the cap {cap:.3g}")
    if method == "direct":
        transform = kernels.char_transform
    elif method == "dft":
        transform = kernels.char_transform_dft
    else:
        raise ValidationError(f"unknown transform method {method!r}")

    axes = []
    for i in range(n):
        vals, diag = _axis_tables(ctx, sys, box, i)
        axes.append((log_positions(ctx, vals), diag))
    a_inv = int(ctx.inv[sys.a % p])
    chi_a_inv = ctx.mult_roots[(np.arange(q, dtype=np.int64) * int(ctx.ind[a_inv])) % q]
    b = np.array([v % p for v in sys.b], dtype=np.int64)

    step = max(1, CHUNK_ENTRIES // q)
    blocks = [(lo, min(n_lam, lo + step)) for lo in range(0, n_lam, step)]

    def run_block(bounds):
        lam = _lambda_block(*bounds, s, p)
        prod = None
        for pos, diag in axes:
            phase = np.zeros((h, lam.shape[0]), dtype=np.int64)
            for j in range(s):
                phase = (phase + diag[:, j, None] * lam[None, :, j]) % p
            T = transform(pos, ctx.add_roots[phase], ctx.mult_roots)
            prod = T if prod is None else prod * T
        twist = ctx.add_roots[(-(lam @ b)) % p] if s else np.ones(lam.shape[0])
        return twist * prod[0], twist * (chi_a_inv[1:] @ prod[1:])

    if workers > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run_block, blocks))
    else:
        parts = [run_block(bl) for bl in blocks]
    principal = np.concatenate([pt[0] for pt in parts])
    other = np.concatenate([pt[1] for pt in parts])

    norm = q * float(p) ** s
    main_term = float(h) ** n / norm

    def finish(total):
        if not abs(total) < 2.0 ** 52:
            raise PrecisionLoss(f"count ~ {abs(total):.3g} is beyond exact double range")
        count = int(round(total.real))
        return count, abs(total - count)

    sums = (principal[0], principal[1:].sum(), other.sum())
    count, residual = finish(sum(sums) / norm)
    if residual >= 1e-6 * max(1, count):
        # retry with compensated accumulation
        fs = lambda z: complex(math.fsum(z.real), math.fsum(z.imag))
        sums = (principal[0], fs(principal[1:]), fs(other))
        total = complex(math.fsum(v.real for v in sums), math.fsum(v.imag for v in sums)) / norm
        count, residual = finish(total)
        if residual >= 1e-6 * max(1, count):
            raise PrecisionLoss(f"residual {residual:.3g} too large for count {count}")
    return CountResult(
        count=count,
        main_term=main_term,
        r1=complex(sums[2]) / norm,
        r2=complex(sums[1]) / norm,
        zero_correction=float((principal[0] / norm).real) - main_term,
        residual=float(residual),
        warnings=warnings,
    )


def count_product_only(ctx: FieldCtx, a: int, box: BoxSpec, product_form=None,
                       method: str = "direct") -> int:
    """Points with ``G_1(x_1) ... G_n(x_n) = a``; one pass over characters, no twists."""
    n = len(box.u)
    sys = SystemSpec(n, 0, a, product_form=product_form)
    return count_spectral(ctx, sys, box, method=method).count
