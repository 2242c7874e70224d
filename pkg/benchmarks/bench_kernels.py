"""
Compare the numba and pure-numpy version of every kernel.

    python benchmarks/bench_kernels.py [--repeat 3]

Both versions are imported directly, so CONGBOX_DISABLE_JIT has no effect
here.  The first numba call (compilation, or cache load) is excluded.
"""
import argparse
import time

import numpy as np

from congbox import kernels
from congbox.counting import BoxSpec, SystemSpec, _axis_tables
from congbox.ffcore import build_field_ctx, log_positions


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases():
    rng = np.random.default_rng(0)

    p = 1000003
    yield "antilog_table p=1000003", (kernels.antilog_table_jit, kernels.antilog_table_np), (2, p)

    ctx = build_field_ctx(809)
    h, m = 152, 809
    pos = log_positions(ctx, np.arange(300, 300 + h))
    w = np.exp(2j * np.pi * rng.uniform(size=(h, m)))
    yield (f"char_transform p=809 h={h} twists={m}",
           (kernels.char_transform_jit, kernels.char_transform_np, kernels.char_transform_dft),
           (pos, w, ctx.mult_roots))

    ctx = build_field_ctx(10007)
    pos = log_positions(ctx, np.arange(5000, 5100))
    w = np.exp(2j * np.pi * rng.uniform(size=(100, 1)))
    yield ("char_transform p=10007 h=100 twists=1",
           (kernels.char_transform_jit, kernels.char_transform_np, kernels.char_transform_dft),
           (pos, w, ctx.mult_roots))

    ctx = build_field_ctx(97)
    sys_ = SystemSpec(4, 2, 5, (3, 8), ((1, 2), (3, 4), (5, 6), (7, 8)), ((3, 5),) * 4)
    box = BoxSpec((10, 20, 30, 40), 40)
    tabs = [_axis_tables(ctx, sys_, box, i) for i in range(4)]
    vals = np.stack([t[0] for t in tabs])
    diag = np.stack([t[1] for t in tabs])
    order = np.argsort(vals[-1], kind="stable").astype(np.int64)
    yield ("brute_count p=97 n=4 s=2 h=40",
           (kernels.brute_count_jit, kernels.brute_count_np),
           (vals, diag, 5, np.array([3, 8]), 97, ctx.inv, vals[-1][order], order))

    xs = np.arange(1, 2001, dtype=np.int64)
    yield ("pair_product_counts p=10007 h=2000",
           (kernels.pair_product_counts_jit, kernels.pair_product_counts_np), (xs, 10007))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    print(f"{'kernel':<44}{'variant':<22}{'seconds':>10}")
    for label, fns, fargs in cases():
        ref = None
        for fn in fns:
            fn(*fargs)  # warm-up / compile
            out = fn(*fargs)
            if ref is None:
                ref = out
            elif isinstance(out, np.ndarray) and out.dtype.kind == "c":
                assert np.abs(out - ref).max() < 1e-6 * max(1.0, np.abs(ref).max())
            else:
                assert np.array_equal(out, ref)
            t = best_of(lambda: fn(*fargs), args.repeat)
            print(f"{label:<44}{fn.__name__:<22}{t:>10.4f}")


if __name__ == "__main__":
    main()
