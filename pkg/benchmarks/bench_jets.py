"""Compare the compiled and pure-Python jet backends.

    python3 benchmarks/bench_jets.py [--repeat 5] [--points 200]

Times three workloads per backend: raw jet arithmetic, the deformation-map
Jacobian and the Lie-bracket closure residual.  Reports the best of
``--repeat`` runs and the speedup of each backend over pure Python.
"""
import argparse
import timeit

import numpy as np

from kappamap import jet as J
from kappamap.deformation import CFamily, DeformationParams, in_domain, map_jacobian
from kappamap.metric import preset
from kappamap.realization import DEFORMED, closure_residual_at, field_set, structure_table


def arithmetic(cls, pts):
    for p in pts:
        x = J.seed(list(p), cls)
        y = x[0] * J.exp(x[1] - x[2]) + J.sqrt(2.0 + x[3] * x[3]) / (1.5 + x[0])
        y = J.log(1.0 + y * y) * J.sinh(x[2])


def jacobians(cls, pts, m, params):
    for p in pts:
        map_jacobian(p, params, m, cls)


def closure(cls, pts, table, fields):
    for p in pts:
        closure_residual_at(table, fields, p, cls)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--points", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    m = preset("offdiag5")
    params = DeformationParams(1.0, CFamily.affine(0.5))
    rng = np.random.default_rng(args.seed)
    pts = [p for p in rng.uniform(-0.8, 0.8, size=(4 * args.points, m.n)) if in_domain(p, params, m)][: args.points]
    fields = field_set(DEFORMED, m, params.kappa)
    table = structure_table(m)
    small = pts[: max(1, args.points // 10)]

    workloads = [
        ("arithmetic", lambda cls: arithmetic(cls, pts), len(pts)),
        ("map jacobian", lambda cls: jacobians(cls, pts, m, params), len(pts)),
        ("closure residual", lambda cls: closure(cls, small, table, fields), len(small)),
    ]
    backends = J.backends()
    if len(backends) < 2:
        print("compiled backend not built; timing pure Python only")

    print(f"{'workload':<18} {'backend':<8} {'us/point':>10} {'speedup':>8}")
    for name, fn, count in workloads:
        base = None
        rows = []
        for label, cls in backends:
            best = min(timeit.repeat(lambda: fn(cls), number=1, repeat=args.repeat))
            rows.append((label, best))
            if label == "python":
                base = best
        for label, best in rows:
            speed = f"{base / best:.1f}x" if base else "-"
            print(f"{name:<18} {label:<8} {1e6 * best / count:>10.1f} {speed:>8}")


if __name__ == "__main__":
    main()
