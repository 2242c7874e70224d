"""Bound shapes (implied constant 1) and seeded sweeps against exact values.

Each sweep row pairs an exactly computed quantity with the matching bound
shape; the largest ratio over unflagged rows is the empirical implied
constant.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from sympy import Poly, symbols

from .counting import BoxSpec, SystemSpec, count_spectral
from .errors import DomainError, ValidationError
from .ffcore import FieldCtx, build_field_ctx
from .sums import PolyMod, acz_quadruple_count, exp_sum, mixed_char_sum

TARGETS = ("chang", "wooley", "acz", "theorem", "weil")


class Bound(NamedTuple):
    value: float
    flagged: bool  # hypothesis of the bound not met


def eta(kappa: float, K: int) -> float:
    """Saving exponent ``kappa**2 / (4 (1 + 2 kappa) (K**2 + 2K + 3))``."""
    if not kappa > 0:
        raise DomainError(f"kappa must be positive, got {kappa}")
    if K < 1:
        raise DomainError(f"K must be >= 1, got {K}")
    return kappa * kappa / (4.0 * (1.0 + 2.0 * kappa) * (K * K + 2 * K + 3))


def chang_bound(h: float, p: float, kappa: float, k: int) -> Bound:
    """``h p**-eta`` for mixed sums; the trivial ``h`` below ``p**(1/4 + kappa)``."""
    e = eta(kappa, k)
    if h < p ** (0.25 + kappa):
        return Bound(float(h), True)
    return Bound(h * p ** (-e), False)


def _check_degree(k: int) -> None:
    if k <= 2:
        raise DomainError(f"degree k={k}: the Weyl-sum bounds need k > 2")


def wooley_bound(h: float, p: float, k: int) -> Bound:
    """``h**(1 - 1/(2k(k-2))) + h**(1 - 1/(2(k-2))) p**(1/(2k(k-2)))``, for h < p."""
    _check_degree(k)
    d = 2.0 * k * (k - 2)
    value = h ** (1 - 1 / d) + h ** (1 - 1 / (2.0 * (k - 2))) * p ** (1 / d)
    return Bound(value, not h < p)


def wooley_short_bound(h: float, k: int, p: float | None = None) -> Bound:
    """``h**(1 - 1/(2k(k-2)))``, valid for ``p**(1/(k-1)) <= h < p``."""
    _check_degree(k)
    flagged = p is not None and not (p ** (1.0 / (k - 1)) <= h < p)
    return Bound(h ** (1 - 1 / (2.0 * k * (k - 2))), flagged)


def acz_bound(h: float, p: float, slack_eps: float = 0.1, slack_c: float = 1.0) -> float:
    """``h**4/p + slack_c h**2 p**slack_eps`` for multiplicative quadruples."""
    if not 1 <= h <= p:
        raise DomainError(f"need 1 <= h <= p, got h={h}, p={p}")
    return h ** 4 / p + slack_c * h * h * p ** slack_eps


def theorem_threshold(p: float, kappa: float, k_min: int) -> float:
    """Smallest admissible side: ``min(p**(1/4 + kappa), p**(1/(k_min - 1)))``."""
    short = p ** (1.0 / (k_min - 1)) if k_min > 1 else math.inf
    return min(p ** (0.25 + kappa), short)


def theorem_error_bound(h: float, p: float, n: int, s: int, kappa: float,
                        k_max: int, k_min: int | None = None) -> Bound:
    """``h**n p**(-1 - eta (n-4)) + h**(n-2) p**(-eta (n-4))`` with ``eta = eta(kappa, k_max)``."""
    if n < 3:
        raise DomainError(f"n={n}: the error term needs n >= 3")
    e = eta(kappa, k_max)
    value = h ** n * p ** (-1 - e * (n - 4)) + h ** (n - 2) * p ** (-e * (n - 4))
    k_min = k_max if k_min is None else k_min
    flagged = not (theorem_threshold(p, kappa, k_min) <= h < p)
    return Bound(value, flagged)


def density_threshold(s: int, eta_value: float) -> float:
    """Number of variables ``(s + 1/2)/eta + 4`` beyond which the main term dominates."""
    return (s + 0.5) / eta_value + 4


def weil_bound(p: float) -> float:
    return math.sqrt(p) * math.log(p)


# -- sweeps --------------------------------------------------------------------

@dataclass
class SweepPlan:
    target: str
    grid: list  # entries p or (p, h)
    instances: int = 10
    seed: int = 1
    h_exp: float = 0.5
    h_jitter: float = 0.0
    kappa: float = 0.25
    K: int = 3
    n: int = 6
    s: int = 1
    exponents: tuple | None = None
    slack_eps: float = 0.1
    slack_c: float = 1.0
    weil_degree: int = 2
    paper_regime: bool = True
    method: str = "direct"
    workers: int = 1

    def __post_init__(self):
        if self.target not in TARGETS:
            raise ValidationError(f"unknown target {self.target!r}; expected one of {TARGETS}")
        if self.instances < 1:
            raise ValidationError("instances per grid point must be >= 1")
        if not self.grid:
            raise ValidationError("empty grid")
        self.grid = [tuple(g) if isinstance(g, (tuple, list)) else (int(g), None)
                     for g in self.grid]
        if self.exponents is not None:
            self.exponents = tuple(int(e) for e in self.exponents)


EXTRA_COLUMNS = {
    "chang": ("t", "u", "k", "eta"),
    "wooley": ("u", "k", "short_bound", "short_range"),
    "acz": ("u", "lower", "excess_norm"),
    "theorem": ("count", "main_term", "deviation", "k_min", "k_max", "eta", "threshold_n"),
    "weil": ("t", "u", "g_degree", "f_degree"),
}


@dataclass
class SweepRow:
    target: str
    p: int
    h: int
    n: int
    s: int
    seed: int
    exact: float
    bound: float
    ratio: float
    flagged: bool
    extra: dict = field(default_factory=dict)


@dataclass
class SweepReport:
    plan: SweepPlan
    rows: list

    @property
    def _live(self):
        return [r for r in self.rows if not r.flagged]

    @property
    def max_ratio(self) -> float:
        live = self._live
        return max(r.ratio for r in live) if live else math.nan

    @property
    def slope(self) -> float:
        """Least-squares slope of log(ratio) against log(p), unflagged rows."""
        live = [r for r in self._live if r.ratio > 0]
        if len({r.p for r in live}) < 2:
            return math.nan
        x = np.log([r.p for r in live])
        y = np.log([r.ratio for r in live])
        return float(np.polyfit(x, y, 1)[0])

    def summary(self) -> dict:
        return {"rows": len(self.rows), "flagged": sum(r.flagged for r in self.rows),
                "max_ratio": self.max_ratio, "slope": self.slope}


def _row_seed(seed: int, point: int, instance: int) -> int:
    ss = np.random.SeedSequence(seed, spawn_key=(point, instance))
    return int(ss.generate_state(1, np.uint64)[0])


def _random_poly(rng, degree: int, p: int) -> PolyMod:
    coeffs = [int(v) for v in rng.integers(0, p, degree)] + [int(rng.integers(1, p))]
    return PolyMod(coeffs)


def _squarefree(G: PolyMod, p: int) -> bool:
    X = symbols("X")
    f = Poly(list(reversed(G.coeffs)), X, modulus=p)
    return f.degree() >= 1 and f.gcd(f.diff(X)).degree() == 0


def _side(plan: SweepPlan, p: int, h_fixed, rng) -> int:
    h = h_fixed if h_fixed is not None else math.ceil(p ** plan.h_exp)
    if plan.h_jitter:
        h = round(h * (1 + plan.h_jitter * rng.uniform(-1, 1)))
    return int(min(max(h, 1), p - 2))


def _random_system(plan: SweepPlan, rng, p: int) -> SystemSpec:
    n, s = plan.n, plan.s
    if plan.exponents is not None:
        rows = (plan.exponents,) * n
    else:
        pool = np.arange(3, plan.K + 1)
        if s > pool.size:
            raise ValidationError(f"s={s} increasing exponents do not fit in [3, {plan.K}]")
        rows = tuple(tuple(int(v) for v in np.sort(rng.choice(pool, s, replace=False)))
                     for _ in range(n))
    c = tuple(tuple(int(v) for v in rng.integers(1, p, s)) for _ in range(n))
    b = tuple(int(v) for v in rng.integers(0, p, s))
    return SystemSpec(n, s, int(rng.integers(1, p)), b, c, rows, paper_regime=plan.paper_regime)


def _evaluate(plan: SweepPlan, ctx: FieldCtx, h: int, rng, seed: int) -> SweepRow:
    p, target = ctx.p, plan.target
    u = int(rng.integers(0, p - h))
    n, s = 1, 0
    if target == "chang":
        t = int(rng.integers(1, p - 1))
        F = _random_poly(rng, plan.K, p)
        exact = abs(mixed_char_sum(ctx, t, None, F, u, h))
        bound = chang_bound(h, p, plan.kappa, plan.K)
        extra = {"t": t, "u": u, "k": plan.K, "eta": eta(plan.kappa, plan.K)}
    elif target == "wooley":
        F = _random_poly(rng, plan.K, p)
        exact = abs(exp_sum(ctx, F, u, h))
        bound = wooley_bound(h, p, plan.K)
        short = wooley_short_bound(h, plan.K, p)
        extra = {"u": u, "k": plan.K, "short_bound": short.value,
                 "short_range": int(not short.flagged)}
    elif target == "acz":
        exact = acz_quadruple_count(ctx, u, h)
        bound = Bound(acz_bound(h, p, plan.slack_eps, plan.slack_c), False)
        extra = {"u": u, "lower": 2 * h * h - h, "excess_norm": (exact - h ** 4 / p) / h ** 2}
    elif target == "weil":
        t = int(rng.integers(1, p - 1))
        G = _random_poly(rng, plan.weil_degree, p)
        while not _squarefree(G, p):
            G = _random_poly(rng, plan.weil_degree, p)
        F = _random_poly(rng, plan.K, p)
        exact = abs(mixed_char_sum(ctx, t, G, F, u, h))
        bound = Bound(weil_bound(p), False)
        extra = {"t": t, "u": u, "g_degree": G.degree, "f_degree": F.degree}
    else:
        sys = _random_system(plan, rng, p)
        n, s = sys.n, sys.s
        box = BoxSpec(tuple(int(v) for v in rng.integers(0, p - h, n)), h)
        res = count_spectral(ctx, sys, box, method=plan.method)
        main = float(h) ** n / float(p) ** (s + 1)
        exact = abs(res.count - main)
        bound = theorem_error_bound(h, p, n, s, plan.kappa, sys.k_max, sys.k_min)
        e = eta(plan.kappa, sys.k_max)
        extra = {"count": res.count, "main_term": main, "deviation": res.count / main - 1,
                 "k_min": sys.k_min, "k_max": sys.k_max, "eta": e,
                 "threshold_n": density_threshold(s, e)}
    return SweepRow(target, p, h, n, s, seed, float(exact), bound.value,
                    float(exact) / bound.value, bound.flagged, extra)


def run_sweep(plan: SweepPlan) -> SweepReport:
    """Evaluate ``plan.instances`` seeded instances at every grid point."""
    def point(args):
        idx, (p, h_fixed) = args
        ctx = build_field_ctx(p)
        rows = []
        for inst in range(plan.instances):
            seed = _row_seed(plan.seed, idx, inst)
            rng = np.random.default_rng(seed)
            h = _side(plan, p, h_fixed, rng)
            rows.append(_evaluate(plan, ctx, h, rng, seed))
        return rows

    jobs = list(enumerate(plan.grid))
    if plan.workers > 1:
        with ThreadPoolExecutor(max_workers=plan.workers) as pool:
            chunks = list(pool.map(point, jobs))
    else:
        chunks = [point(j) for j in jobs]
    rows = [r for chunk in chunks for r in chunk]
    rows.sort(key=lambda r: (r.p, r.h))
    return SweepReport(plan, rows)
