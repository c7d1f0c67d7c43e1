#!/usr/bin/env python3
"""Time the compiled kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--json out.json]

Both backends are imported directly, so the environment switch is not needed.
Each kernel is run on the same inputs; outputs are compared before timing.
"""
from __future__ import annotations

import argparse
import json
import sys
import timeit

import numpy as np

from specgap.kernels import _pykernels as py

try:
    from specgap.kernels import _ckernels as cy
except ImportError:
    cy = None


def _cases():
    rng = np.random.default_rng(7)
    M = 4000
    h = 12.0 / M
    x = np.linspace(-6, 6, M + 1)[1:-1]
    d = np.ascontiguousarray(1.0 / h**2 + 0.5 * x**2)
    e2 = np.full(M - 2, (0.5 / h**2) ** 2)
    f = np.ascontiguousarray(2 * (0.5 * x**2 - 2.5))
    vq = np.array([0.0, 0.0, 0.0, 0.0, 1.0])
    polys = [np.ascontiguousarray(rng.normal(size=9)) for _ in range(200)]
    for p in polys:
        p[-1] = abs(p[-1]) + 0.1
    return {
        "tridiag_count": lambda k: k.tridiag_count(d, e2, 3.0),
        "tridiag_bisect": lambda k: k.tridiag_bisect(d, e2, 3, 0.0, 10.0, 1e-12),
        "numerov_nodes": lambda k: k.numerov_nodes(f, h),
        "numerov_match": lambda k: k.numerov_match(f, h, (M - 1) // 2),
        "rk4": lambda k: k.rk4(vq, 0.7, -2.0, 1.0, 0.0, 1e-3, 4000, 1e200),
        "crit_extrema x200": lambda k: [k.crit_extrema(p) for p in polys],
    }


def _same(a, b) -> bool:
    if isinstance(a, tuple) or isinstance(a, list):
        return all(_same(x, y) for x, y in zip(a, b))
    return bool(np.allclose(a, b, rtol=1e-9, atol=1e-12))


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--json")
    args = ap.parse_args(argv)
    if cy is None:
        print("compiled kernels not built; run `pip install -e . --no-build-isolation`")
        return 1
    rows = []
    print(f"{'kernel':<20}{'python ms':>12}{'cython ms':>12}{'speedup':>10}  agree")
    for name, fn in _cases().items():
        agree = _same(fn(py), fn(cy))
        tp = min(timeit.repeat(lambda: fn(py), number=1, repeat=args.repeat)) * 1e3
        tc = min(timeit.repeat(lambda: fn(cy), number=1, repeat=args.repeat)) * 1e3
        rows.append({"kernel": name, "python_ms": tp, "cython_ms": tc, "speedup": tp / tc, "agree": agree})
        print(f"{name:<20}{tp:>12.3f}{tc:>12.3f}{tp / tc:>10.1f}  {agree}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=2)
    return 0 if all(r["agree"] for r in rows) else 1


if __name__ == "__main__":
    sys.exit(main())
