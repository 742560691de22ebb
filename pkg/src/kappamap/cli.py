"""Command-line front end.

Exit codes: 0 pass, 1 verification failure, 2 usage, config or domain error.
The worker count for ``verify`` comes from ``KAPPAMAP_WORKERS`` only.
"""
from __future__ import annotations

import argparse
import json
import math
import re
import sys

import numpy as np

from . import casimir as cas
from .coproduct import cocommutativity_gap, deformed_add
from .deformation import CFamily, DeformationParams, forward, inverse, solve_A
from .errors import KappaMapError, MapDomainError
from .harness import (
    LIMIT_KAPPAS,
    SUITES,
    SuiteConfig,
    limit_action_gaps,
    limit_addition_gaps,
    limit_casimir_gaps,
    limit_map_gaps,
    run_suites,
)
from .metric import PRESET_NAMES, mass_squared, metric_from_spec, preset
from .realization import lorentz_basis

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

# options whose value may legitimately start with a minus sign
_VALUE_OPTS = {"--point", "--left", "--right", "--m2", "--kappa", "--perturb-kappa"}
_NEGATIVE = re.compile(r"-[0-9.]")


class UsageError(Exception):
    pass


def fmt(x) -> str:
    """Shortest round-trip form of a float; integral values drop the ``.0``."""
    x = float(x)
    if x == 0.0:
        return "0"
    r = repr(x)
    return r[:-2] if r.endswith(".0") else r


def fmt_vec(v) -> str:
    return ",".join(fmt(x) for x in v)


def _json_safe(obj):
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    if isinstance(obj, np.generic):
        return _json_safe(obj.item())
    return obj


def emit_json(doc) -> None:
    sys.stdout.write(json.dumps(_json_safe(doc), indent=2, allow_nan=False) + "\n")


def parse_vector(text: str, what: str) -> list:
    try:
        vals = [float(t) for t in text.replace(" ", "").split(",")]
    except ValueError:
        raise UsageError(f"{what}: expected comma-separated numbers, got {text!r}") from None
    if not vals:
        raise UsageError(f"{what}: empty vector")
    if not all(math.isfinite(v) for v in vals):
        raise UsageError(f"{what}: components must be finite")
    return vals


def _metric_arg(text):
    """Preset name, inline JSON ``{"n": .., "rows": ..}`` or a path to such a file."""
    text = text.strip()
    if text in PRESET_NAMES:
        return preset(text)
    if text.startswith("{"):
        spec = json.loads(text)
    else:
        try:
            with open(text) as fh:
                spec = json.load(fh)
        except FileNotFoundError:
            raise UsageError(f"unknown metric {text!r}; presets: {', '.join(PRESET_NAMES)}") from None
    return metric_from_spec(spec)


def _params(args) -> DeformationParams:
    if not args.kappa > 0:
        raise UsageError(f"--kappa must be positive, got {args.kappa!r}")
    return DeformationParams(args.kappa, CFamily.parse(args.c_family))


def _check_dim(v, n, what):
    if len(v) != n:
        raise UsageError(f"{what} has {len(v)} components, metric has n = {n}")


# -- subcommands --------------------------------------------------------------------


def cmd_verify(args) -> int:
    data = {}
    if args.config:
        try:
            with open(args.config) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(data, dict):
            raise UsageError("config file must hold a JSON object")
    overrides = {
        "metric": args.metric,
        "kappa": args.kappa,
        "c_family": args.c_family,
        "tolerance": args.tolerance,
        "samples": args.samples,
        "seed": args.seed,
        "momentum_box": args.momentum_box,
        "suites": args.suites,
        "perturb_kappa": args.perturb_kappa,
    }
    data.update({k: v for k, v in overrides.items() if v is not None})
    if isinstance(data.get("metric"), str) and data["metric"] not in PRESET_NAMES:
        data["metric"] = _metric_arg(data["metric"])
    cfg = SuiteConfig.from_dict(data)
    report = run_suites(cfg)
    if args.json:
        emit_json(report.to_dict())
    else:
        c = report.config
        m = cfg.resolved_metric
        print(f"metric {m.name or 'custom'} (n = {m.n}), kappa {fmt(c['kappa'])}, C {c['c_family']}, seed {c['seed']}")
        for r in report.suites:
            verdict = "PASS" if r.passed else "FAIL"
            rel = "<=" if r.kind == "bound" else ">="
            print(f"{verdict}  {r.name:38s} {r.statistic:10.3e} {rel} {r.threshold:.0e}   points {r.accepted}/{r.samples}")
            if not r.passed and r.worst_point is not None:
                print(f"      worst point {fmt_vec(r.worst_point)}")
        print(f"{'PASS' if report.passed else 'FAIL'}  ({report.wall_time:.2f} s)")
    return EXIT_PASS if report.passed else EXIT_FAIL


def cmd_map(args) -> int:
    m = _metric_arg(args.metric)
    params = _params(args)
    p = parse_vector(args.point, "--point")
    _check_dim(p, m.n, "--point")
    if args.inverse:
        if args.m2 is None:
            raise UsageError("--inverse needs --m2, the classical mass squared of the preimage")
        out = inverse(p, params, m, args.m2)
    else:
        if args.m2 is not None:
            raise UsageError("--m2 only applies with --inverse")
        out = forward(p, params, m)
    if args.json:
        emit_json({"direction": "inverse" if args.inverse else "forward", "point": p, "result": [float(x) for x in out]})
    else:
        print(fmt_vec(out))
    return EXIT_PASS


def cmd_add(args) -> int:
    if not args.kappa > 0:
        raise UsageError(f"--kappa must be positive, got {args.kappa!r}")
    p = parse_vector(args.left, "--left")
    q = parse_vector(args.right, "--right")
    if len(p) != len(q):
        raise UsageError(f"dimension mismatch: --left has {len(p)} components, --right has {len(q)}")
    pq = deformed_add(p, q, args.kappa)
    doc = {"left_right": [float(x) for x in pq]}
    if args.both_orders:
        doc["right_left"] = [float(x) for x in deformed_add(q, p, args.kappa)]
        doc["gap"] = cocommutativity_gap(p, q, args.kappa)
    if args.json:
        emit_json(doc)
    elif args.both_orders:
        print(f"p+q  {fmt_vec(doc['left_right'])}")
        print(f"q+p  {fmt_vec(doc['right_left'])}")
        print(f"gap  {fmt(doc['gap'])}")
    else:
        print(fmt_vec(pq))
    return EXIT_PASS


def cmd_casimir(args) -> int:
    m = _metric_arg(args.metric)
    params = _params(args)
    p = parse_vector(args.point, "--point")
    _check_dim(p, m.n, "--point")
    k = params.kappa
    if args.deformed:
        mt2 = float(cas.deformed_mass_squared(p, m, k))
        m2 = cas.recover_m2(p, params, m)
        doc = {"deformed_mass_squared": mt2, "mass_squared": m2}
    else:
        m2 = float(mass_squared(m, p))
        pt = forward(p, params, m)
        mt2 = float(cas.deformed_mass_squared(pt, m, k))
        c = float(params.c_of(m2))
        a = float(solve_A(m2, c, m.g00))
        res = cas.casimir_relation_residual(p, params, m)
        doc = {
            "mass_squared": m2,
            "deformed_point": [float(x) for x in pt],
            "deformed_mass_squared": mt2,
            "C": c,
            "A": a,
            "ratio_residual": res.r9,
            "mass_residual": res.r11,
        }
    if args.json:
        emit_json(doc)
    else:
        for key, val in doc.items():
            if val is None:
                val = "skipped (deformed mass squared ~ 0)"
            elif isinstance(val, list):
                val = fmt_vec(val)
            else:
                val = fmt(val)
            print(f"{key:22s} {val}")
    return EXIT_PASS


def cmd_limits(args) -> int:
    m = _metric_arg(args.metric)
    p = parse_vector(args.point, "--point")
    _check_dim(p, m.n, "--point")
    q = p if args.right is None else parse_vector(args.right, "--right")
    _check_dim(q, m.n, "--right")
    rows = {
        "map": limit_map_gaps(m, p),
        "casimir": limit_casimir_gaps(m, p),
        "addition": limit_addition_gaps(p, q),
    }
    for g in lorentz_basis(m.n):
        rows[f"action {g}"] = limit_action_gaps(m, g, p)
    doc = {"kappas": list(LIMIT_KAPPAS), "gaps": rows, "ratios": {}}
    for name, gaps in rows.items():
        doc["ratios"][name] = [a / b if b > 0 else None for a, b in zip(gaps[:-1], gaps[1:])]
    if args.json:
        emit_json(doc)
        return EXIT_PASS
    print(f"{'':22s}" + "".join(f"kappa={fmt(k):<10s}" for k in LIMIT_KAPPAS) + " ratios")
    for name, gaps in rows.items():
        ratios = " ".join("-" if r is None else f"{r:.3f}" for r in doc["ratios"][name])
        print(f"{name:22s}" + "".join(f"{g:<16.4e}" for g in gaps) + " " + ratios)
    return EXIT_PASS


def cmd_list_metrics(args) -> int:
    metrics = [preset(name) for name in PRESET_NAMES]
    if args.json:
        emit_json([{"name": m.name, "n": m.n, "rows": m.lower.tolist(), "null_time": m.is_null_time} for m in metrics])
        return EXIT_PASS
    for m in metrics:
        tag = "  (g00 = 0: Weyl suite available)" if m.is_null_time else ""
        print(f"{m.name}  n = {m.n}{tag}")
        for row in m.lower:
            print("    [" + ", ".join(f"{x:5g}" for x in row) + "]")
    return EXIT_PASS


# -- parser -------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kappamap", description="Verify the kappa-deformed momentum-space realization.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def common(sp, metric=True, c_family=True):
        if metric:
            sp.add_argument("--metric", default="minkowski4", help="preset name, inline JSON or a JSON file (default minkowski4)")
        sp.add_argument("--kappa", type=float, default=1.0, help="deformation scale (default 1)")
        if c_family:
            sp.add_argument("--c-family", default="kappa", help="kappa | constant:c | affine:lambda (default kappa)")
        sp.add_argument("--json", action="store_true", help="machine-readable output")

    v = sub.add_parser("verify", help="run the verification suites")
    v.add_argument("--config", help="JSON file with SuiteConfig fields; flags override it")
    v.add_argument("--metric")
    v.add_argument("--kappa", type=float)
    v.add_argument("--c-family")
    v.add_argument("--tolerance", type=float)
    v.add_argument("--samples", type=int)
    v.add_argument("--seed", type=int)
    v.add_argument("--momentum-box", type=float)
    v.add_argument("--suites", help=f"comma-separated subset of {','.join(SUITES)}")
    v.add_argument("--perturb-kappa", type=float, help="fault injection: relative kappa offset on Boost(1)")
    v.add_argument("--json", action="store_true", help="print the report as one JSON document")
    v.set_defaults(func=cmd_verify)

    mp = sub.add_parser("map", help="apply the deformation map or its inverse")
    common(mp)
    mp.add_argument("--point", required=True, help="comma-separated momentum components")
    mp.add_argument("--inverse", action="store_true", help="map deformed momenta back")
    mp.add_argument("--m2", type=float, help="classical mass squared of the preimage (with --inverse)")
    mp.set_defaults(func=cmd_map)

    ad = sub.add_parser("add", help="deformed momentum addition")
    common(ad, metric=False, c_family=False)
    ad.add_argument("--left", required=True)
    ad.add_argument("--right", required=True)
    ad.add_argument("--both-orders", action="store_true", help="also print q+p and the gap")
    ad.set_defaults(func=cmd_add)

    cs = sub.add_parser("casimir", help="classical and deformed mass squared at a point")
    common(cs)
    cs.add_argument("--point", required=True)
    cs.add_argument("--deformed", action="store_true", help="point is deformed; recover the classical M^2")
    cs.set_defaults(func=cmd_casimir)

    lm = sub.add_parser("limits", help="gaps to the classical limit over a kappa-doubling scan")
    lm.add_argument("--metric", default="minkowski4")
    lm.add_argument("--point", required=True)
    lm.add_argument("--right", help="second momentum for the addition law (default: --point)")
    lm.add_argument("--json", action="store_true")
    lm.set_defaults(func=cmd_limits)

    ls = sub.add_parser("list-metrics", help="show the metric presets")
    ls.add_argument("--json", action="store_true")
    ls.set_defaults(func=cmd_list_metrics)
    return parser


def _glue_negative_values(argv):
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        if tok in _VALUE_OPTS and i + 1 < len(argv) and _NEGATIVE.match(argv[i + 1]):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(_glue_negative_values(argv))
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_PASS
    try:
        return args.func(args)
    except MapDomainError as exc:
        print(f"error: outside the map domain: {'; '.join(exc.conditions)}", file=sys.stderr)
    except (KappaMapError, UsageError, ValueError, OverflowError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
