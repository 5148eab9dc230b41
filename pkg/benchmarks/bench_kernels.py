"""Time the numba kernels against their pure-numpy twins.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Both tables are called directly, so the result does not depend on
FREQMAP_BACKEND. Outputs are checked for equality before timing.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from freqmap import kernels
from freqmap._accel import HAVE_NUMBA


def _cases(rng):
    m = 20
    mats = rng.dirichlet(np.ones(m), size=(60, m)).transpose(0, 2, 1)  # columns sum to 1
    cums = np.ascontiguousarray(np.cumsum(mats, axis=1))
    left, right = np.triu_indices(60, 1)
    cost = kernels.NUMPY["emd_cost"](cums[0], cums[1])
    ins = np.stack([rng.integers(0, np.arange(1, 51)) for _ in range(20_000)]).astype(np.int64)
    w = rng.integers(0, 100, size=(12, 12)).astype(np.int64)
    return {
        "emd_cost m=20": ("emd_cost", (cums[0], cums[1])),
        "lap m=20": ("lap", (cost,)),
        "pairs_raw 1770 pairs": ("pairs_raw", (cums, left.astype(np.int64), right.astype(np.int64))),
        "decode_insertions 20000x50": ("decode_insertions", (ins,)),
        "mallows_chain m=300": ("mallows_chain", (300, 0.97)),
        "kemeny m=12": ("kemeny", (w,)),
    }


def _best(fn, args, repeat):
    out = fn(*args)
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t)
    return best, out


def _same(a, b):
    if isinstance(a, tuple):
        return all(_same(x, y) for x, y in zip(a, b))
    return np.array_equal(np.asarray(a), np.asarray(b))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if not HAVE_NUMBA:
        raise SystemExit("numba is not importable; nothing to compare")
    cases = _cases(np.random.default_rng(0))
    print(f"{'kernel':<28}{'numba ms':>12}{'numpy ms':>12}{'speedup':>10}  equal", flush=True)
    for name, (key, call) in cases.items():
        t_nb, out_nb = _best(kernels.NUMBA[key], call, args.repeat)
        t_np, out_np = _best(kernels.NUMPY[key], call, args.repeat)
        print(f"{name:<28}{t_nb * 1e3:>12.3f}{t_np * 1e3:>12.3f}{t_np / t_nb:>9.1f}x  {_same(out_nb, out_np)}", flush=True)


if __name__ == "__main__":
    main()
