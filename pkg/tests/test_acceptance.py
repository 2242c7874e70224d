"""Acceptance gate: one test per criterion, each logging a PASS/FAIL line."""
import math
import subprocess
import sys
import time
from fractions import Fraction

import numpy as np
import pytest

from congbox.bounds import SweepPlan, eta, run_sweep, wooley_bound
from congbox.counting import BoxSpec, SystemSpec, count_bruteforce, count_spectral
from congbox.ffcore import char_values
from congbox.sums import (IntervalWeights, acz_quadruple_count, batch_char_sums, fourth_moment,
                          weighted_quadruple_sum)
from congbox.verify import random_instance, random_weights

from conftest import ACCEPTANCE, field

PRIMES_7_97 = [7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97]


def record(label, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] {label}: {detail}"
    ACCEPTANCE.append(line)
    print(line)
    assert ok, line


def test_ac1_oracle_equivalence():
    rng = np.random.default_rng(20240601)
    mismatches, worst = [], 0.0
    t0 = time.perf_counter()
    for _ in range(200):
        p = int(rng.choice(PRIMES_7_97))
        sys_, box = random_instance(rng, p, n=int(rng.integers(3, 5)), s=int(rng.integers(1, 3)),
                                    k_range=(3, 7))
        ctx = field(p)
        brute = count_bruteforce(ctx, sys_, box)
        res = count_spectral(ctx, sys_, box)
        worst = max(worst, res.residual / max(1, brute))
        if res.count != brute or res.residual >= 1e-6 * max(1, brute):
            mismatches.append((p, sys_, box, brute, res.count))
    elapsed = time.perf_counter() - t0
    record("AC1 oracle equivalence", not mismatches and elapsed < 60,
           f"200 instances, {len(mismatches)} mismatches, max rel residual {worst:.2e}, "
           f"{elapsed:.1f} s (< 60 s)")


def test_ac2_known_values():
    ctx7 = field(7)
    full = BoxSpec.full(3, 7)
    got = {
        "s=0 full box": (count_spectral(ctx7, SystemSpec(3, 0, 5), full).count, 36),
        "s=0 brute": (count_bruteforce(ctx7, SystemSpec(3, 0, 5), full), 36),
        "cubic b=3": (count_spectral(ctx7, SystemSpec.uniform(3, 1, [3], k=3), full).count, 9),
        "cubic b=3 brute": (count_bruteforce(ctx7, SystemSpec.uniform(3, 1, [3], k=3), full), 9),
        "ACZ p=5": (acz_quadruple_count(field(5), 0, 4), 64),
        "ACZ p=11": (acz_quadruple_count(field(11), 2, 5), 73),
    }
    bad = {k: v for k, v in got.items() if v[0] != v[1]}
    record("AC2 known values", not bad, f"{len(got)} exact matches" if not bad else str(bad))


def test_ac3_fourth_moment_identity():
    rng = np.random.default_rng(77)
    worst = 0.0
    for i in range(50):
        p = (13, 101)[i % 2]
        ctx = field(p)
        h = int(rng.integers(1, p))
        u = int(rng.integers(0, p - h))
        wts = IntervalWeights(u, h, random_weights(rng, h))
        ref = (p - 1) * weighted_quadruple_sum(ctx, wts)
        worst = max(worst, abs(fourth_moment(ctx, wts) - ref) / ref)
        ones = IntervalWeights.ones(u, h)
        ref1 = (p - 1) * acz_quadruple_count(ctx, u, h)
        worst = max(worst, abs(fourth_moment(ctx, ones) - ref1) / ref1)
    record("AC3 fourth-moment identity", worst < 1e-6,
           f"50 weight vectors + rho=1, max relative error {worst:.2e} (< 1e-6)")


def test_ac4_parseval_orthogonality():
    rng = np.random.default_rng(4)
    worst = 0.0
    for p in (7, 13, 101, 1009):
        ctx = field(p)
        xs = np.arange(1, p)
        table = np.array([char_values(ctx, t, xs) for t in range(p - 1)])
        e_t = np.abs(table.sum(axis=1) - np.where(np.arange(p - 1) == 0, p - 1, 0)).max()
        e_x = np.abs(table.sum(axis=0) - np.where(xs == 1, p - 1, 0)).max()
        worst = max(worst, e_t / (p - 1), e_x / (p - 1))
        for _ in range(5):
            h = int(rng.integers(1, p))
            u = int(rng.integers(0, p - h))
            wts = IntervalWeights(u, h, random_weights(rng, h))
            for method in ("direct", "dft"):
                T = batch_char_sums(ctx, wts, method)
                rhs = (p - 1) * np.sum(np.abs(wts.w) ** 2)
                worst = max(worst, abs(np.sum(np.abs(T) ** 2) - rhs) / rhs)
    record("AC4 Parseval and orthogonality", worst < 1e-8,
           f"p in {{7, 13, 101, 1009}}, max relative error {worst:.2e} (< 1e-8)")


def test_ac5_acz_sweep():
    t0 = time.perf_counter()
    rep = run_sweep(SweepPlan("acz", [101, 1009, 10007], instances=20, seed=5, h_exp=0.5,
                              h_jitter=0.1))
    elapsed = time.perf_counter() - t0
    low = [r for r in rep.rows if r.exact < 2 * r.h ** 2 - r.h]
    excess = max(r.extra["excess_norm"] / math.log(r.p) for r in rep.rows)
    ok = len(rep.rows) == 60 and not low and excess <= 10 and elapsed < 300
    record("AC5 ACZ bound sweep", ok,
           f"{len(rep.rows)} rows, {len(low)} below 2h^2-h, max (count-h^4/p)/(h^2 ln p) = "
           f"{excess:.3f} (<= 10), max ratio {rep.max_ratio:.3f}, {elapsed:.1f} s")


def test_ac6_theorem_density():
    t0 = time.perf_counter()
    primes = [101, 211, 401, 809]
    rep = run_sweep(SweepPlan("theorem", primes, instances=5, seed=6, n=6, s=1,
                              exponents=(5,), h_exp=0.75))
    elapsed = time.perf_counter() - t0
    dev = {p: [abs(r.extra["deviation"]) for r in rep.rows if r.p == p] for p in primes}
    means = [float(np.mean(dev[p])) for p in primes]
    hs = {r.p: r.h for r in rep.rows}
    ok = (all(len(dev[p]) == 5 and max(dev[p]) < 0.1 for p in primes)
          and all(a >= b for a, b in zip(means, means[1:])) and elapsed < 600
          and all(hs[p] == math.ceil(p ** 0.75) for p in primes))
    trend = ", ".join(f"p={p}: {m:.4f}" for p, m in zip(primes, means))
    record("AC6 theorem density", ok,
           f"max deviation {max(max(v) for v in dev.values()):.4f} (< 0.1); mean by p {trend}; "
           f"{elapsed:.1f} s")


def test_ac7_performance():
    ctx = field(101)
    rng = np.random.default_rng(7)
    c = tuple((int(v),) for v in rng.integers(1, 101, 8))
    sys_ = SystemSpec(8, 1, 17, (29,), c, ((3,),) * 8, paper_regime=True)
    box = BoxSpec(tuple(int(v) for v in rng.integers(0, 21, 8)), 80)
    count_spectral(field(7), SystemSpec(3, 1, 1, (3,), ((1,),) * 3, ((3,),) * 3),
                   BoxSpec.full(3, 7))  # warm the compiled kernels
    t0 = time.perf_counter()
    res = count_spectral(ctx, sys_, box)
    elapsed = time.perf_counter() - t0
    record("AC7 performance", elapsed < 5 and res.residual < 1e-6 * res.count,
           f"p=101 n=8 s=1 h=80: count {res.count} in {elapsed:.3f} s (< 5 s); "
           f"brute force would need 80^8 = {80 ** 8:.2e} evaluations (not run)")


def test_ac8_bound_spot_checks():
    hand_eta = float(Fraction(1, 16) / (4 * Fraction(3, 2) * 18))  # kappa=1/4, K=3
    hand_wooley = 10 ** (5 / 3) + 10 * 10  # 100^(5/6) + 100^(1/2) (10^6)^(1/6)
    e1 = abs(eta(0.25, 3) - hand_eta) / hand_eta
    e2 = abs(wooley_bound(100, 10 ** 6, 3).value - hand_wooley) / hand_wooley
    grid_ok = all(eta(kappa, K) < 1 / (2 * K * (K - 2))
                  for kappa in np.linspace(0.001, 1.0, 1000) for K in range(3, 13))
    record("AC8 bound spot checks", e1 < 1e-9 and e2 < 1e-9 and grid_ok
           and abs(hand_eta - 5.787e-4) < 1e-7 and abs(hand_wooley - 146.42) < 5e-3,
           f"eta rel err {e1:.1e}, wooley rel err {e2:.1e}, eta < 1/(2K(K-2)) on "
           f"1000 x 10 grid: {grid_ok}")


def test_ac9_sweep_determinism(tmp_path):
    out = tmp_path / "sweep.csv"
    cmd = [sys.executable, "-m", "congbox.cli", "sweep", "--target", "acz",
           "--grid", "101,1009", "--instances", "10", "--seed", "2024", "--format", "csv",
           "--out", str(out)]
    blobs = []
    for _ in range(2):
        subprocess.run(cmd, check=True, capture_output=True)
        blobs.append(out.read_bytes())
    record("AC9 determinism", blobs[0] == blobs[1] and len(blobs[0]) > 0,
           f"two runs, {len(blobs[0])} bytes each, identical: {blobs[0] == blobs[1]}")
