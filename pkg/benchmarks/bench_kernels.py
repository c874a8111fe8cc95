"""Timing comparison of the compiled and fallback finite-model kernels.

Runs identical seeded workloads through both backends, checks the
outputs agree bit for bit, and prints per-operation times.  Exits 1 on
any output disagreement and 2 when the compiled backend is missing.
"""

import argparse
import sys
import time

import numpy as np

from orbicert._kernel import _pykernel


def _load_cykernel():
    try:
        from orbicert._kernel import _cykernel
    except ImportError:
        return None
    return _cykernel


def _workloads(dim, scan_count, orbit_steps, batch_points, base, seed):
    rng = np.random.default_rng(seed)
    gens = 2
    mats = rng.integers(0, base, size=(gens, dim, dim), dtype=np.int64)
    vecs = rng.integers(0, base, size=(gens, dim), dtype=np.int64)
    # constant projection rows keep the scan violation-free, so both
    # backends walk the full range instead of exiting at the first hit
    proj_pass = np.zeros((1, dim), dtype=np.int64)
    proj_fail = np.eye(dim, dtype=np.int64)[:1]
    x0 = rng.integers(0, base, size=dim, dtype=np.int64)
    pts = rng.integers(0, base, size=(batch_points, dim), dtype=np.int64)
    return [
        (
            "scan_range (pass)",
            lambda k: int(
                k.invariance_scan_range(
                    mats, vecs, proj_pass, 1, base, 1, base, 0, scan_count
                )
            ),
        ),
        (
            "scan_range (hit)",
            lambda k: int(
                k.invariance_scan_range(
                    mats, vecs, proj_fail, 1, base, 1, base, 0, scan_count
                )
            ),
        ),
        (
            "scan_points",
            lambda k: int(
                k.invariance_scan_points(mats, vecs, proj_pass, 1, base, pts)
            ),
        ),
        (
            "orbit_iterate",
            lambda k: k.orbit_iterate(mats[0], vecs[0], x0, orbit_steps, base),
        ),
        (
            "apply_batch",
            lambda k: k.apply_batch(mats[0], vecs[0], pts, base),
        ),
    ]


def _time_one(fn, backend, reps):
    best = float("inf")
    out = None
    for _ in range(reps):
        t0 = time.perf_counter()
        out = fn(backend)
        best = min(best, time.perf_counter() - t0)
    return best, out


def _same(a, b):
    if isinstance(a, np.ndarray) or isinstance(b, np.ndarray):
        return np.array_equal(a, b)
    return a == b


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--dim", type=int, default=6)
    ap.add_argument("--base", type=int, default=11)
    ap.add_argument("--scan-count", type=int, default=500_000)
    ap.add_argument("--orbit-steps", type=int, default=200_000)
    ap.add_argument("--batch-points", type=int, default=300_000)
    ap.add_argument("--reps", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    cykernel = _load_cykernel()
    if cykernel is None:
        print("compiled backend unavailable; nothing to compare", file=sys.stderr)
        return 2

    print(
        f"dim={args.dim} base={args.base} scan={args.scan_count} "
        f"orbit={args.orbit_steps} batch={args.batch_points} reps={args.reps}"
    )
    print(f"{'operation':20s} {'python':>10s} {'cython':>10s} {'speedup':>8s}")
    disagreements = 0
    for name, fn in _workloads(
        args.dim,
        args.scan_count,
        args.orbit_steps,
        args.batch_points,
        args.base,
        args.seed,
    ):
        t_py, out_py = _time_one(fn, _pykernel, args.reps)
        t_cy, out_cy = _time_one(fn, cykernel, args.reps)
        if not _same(out_py, out_cy):
            disagreements += 1
            flag = "  MISMATCH"
        else:
            flag = ""
        print(
            f"{name:20s} {t_py * 1000:8.1f}ms {t_cy * 1000:8.1f}ms "
            f"{t_py / t_cy:7.1f}x{flag}"
        )
    return 1 if disagreements else 0


if __name__ == "__main__":
    raise SystemExit(main())
