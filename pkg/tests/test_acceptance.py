"""Acceptance criteria, one test each.

Each test records a single PASS/FAIL line that pytest prints in an
"acceptance criteria" section at the end of the run.
"""
import json
import math

import numpy as np

from conftest import ACCEPTANCE_LINES
from kappamap import jet as J
from kappamap.casimir import casimir_relation_residual, deformed_mass_squared
from kappamap.coproduct import cocommutativity_gap, coproduct_nonintertwining_gap
from kappamap.deformation import CFamily, DeformationParams, forward, in_domain, ode_residuals, solve_A, weyl_forward
from kappamap.harness import LIMIT_BAND, SuiteConfig, rng_for, run_suites
from kappamap.metric import PRESET_NAMES, preset
from oracles import FloatOps, JetOps, fd_grad, fd_hess, random_function, rel

KAPPAS = (0.5, 1.0, 5.0)
SAMPLES = 500


def record(number, title, ok, detail):
    ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'}  {number}. {title:<24} {detail}")
    return ok


def run(metric, suites, kappa=1.0, c_family="kappa", **kw):
    cfg = SuiteConfig(metric=metric, kappa=kappa, c_family=c_family, samples=SAMPLES, suites=suites, **kw)
    return {r.name: r for r in run_suites(cfg).suites}


def worst(results, names, runs):
    """Largest max_residual among ``names``; failures collected into ``runs``."""
    top = 0.0
    for name in names:
        r = results[name]
        if not r.passed:
            runs.append(name)
        top = max(top, r.max_residual)
    return top


def test_criterion_1_closure():
    bad = []
    top = dil = 0.0
    for name in ("minkowski4", "lightcone2", "offdiag5"):
        for k in KAPPAS:
            res = run(name, ["closure"], k)
            top = max(top, res["closure.classical"].max_residual, res["closure.deformed"].max_residual)
            bad += [f"{name}/{k}" for c in ("closure.classical", "closure.deformed") if res[c].max_residual >= 1e-9]
            if name == "lightcone2":
                dil = max(dil, res["closure.dilatation"].max_residual)
    ok = record(1, "closure", not bad and dil < 1e-9, f"max residual {top:.2e}, dilatation {dil:.2e} (< 1e-9)")
    assert ok, bad


def test_criterion_2_ode():
    bad = []
    top = 0.0
    for name in PRESET_NAMES:
        for k in KAPPAS:
            r = run(name, ["ode"], k)["ode"]
            top = max(top, r.max_residual)
            if r.max_residual >= 1e-10:
                bad.append(f"{name}/{k}")
    worked = float(np.max(np.abs(ode_residuals(1.0, 0.64, DeformationParams(1.0, CFamily.constant(1.0)), preset("minkowski4")))))
    ok = record(2, "ODE system", not bad and worked < 1e-12, f"sampled {top:.2e} (< 1e-10), worked point {worked:.2e} (< 1e-12)")
    assert ok, bad


def test_criterion_3_intertwining():
    bad = []
    top = 0.0
    for name in PRESET_NAMES:
        for family in ("kappa", "affine:0.5"):
            for k in KAPPAS:
                r = run(name, ["intertwine"], k, family)["intertwine.lorentz"]
                top = max(top, r.max_residual)
                if r.max_residual >= 1e-9:
                    bad.append(f"{name}/{family}/{k}")
    res = run("lightcone2", ["intertwine"], 1.0)
    dil = res["intertwine.dilatation"].max_residual
    control = res["intertwine.dilatation_affine_control"]
    ok = not bad and dil < 1e-9 and control.statistic > 1e-3
    detail = f"Lorentz {top:.2e}, dilatation {dil:.2e} (< 1e-9); control 10th pct {control.statistic:.2e} (> 1e-3)"
    assert record(3, "intertwining", ok, detail), bad


def test_criterion_4_inversion():
    bad = []
    top = 0.0
    for name in PRESET_NAMES:
        res = run(name, ["roundtrip"])
        for check in ("roundtrip.inverse_forward", "roundtrip.forward_inverse"):
            top = max(top, res[check].max_residual)
            if res[check].max_residual >= 1e-10 or res[check].accepted < SAMPLES:
                bad.append(f"{name}/{check}")
    assert record(4, "inversion", not bad, f"max round-trip error {top:.2e} (< 1e-10), both directions"), bad


def test_criterion_5_casimir():
    bad = []
    rel_top = inv_top = 0.0
    for name in PRESET_NAMES:
        for k in KAPPAS:
            res = run(name, ["casimir"], k)
            rel_top = max(rel_top, res["casimir.relations"].max_residual)
            inv_top = max(inv_top, res["casimir.invariance"].max_residual)
            bad += [f"{name}/{k}/{c}" for c in ("casimir.relations", "casimir.invariance") if res[c].max_residual >= 1e-9]
    m = preset("minkowski4")
    pt = [math.log(10 / 3), 0.3, 0.0, 0.0]
    mt2 = deformed_mass_squared(pt, m, 1.0)
    a = solve_A(0.64, 1.0, 1.0)
    m2_back = a * a * (4.0 / mt2 + m.g00)
    worked = max(abs(mt2 - 4 / 3), abs(m2_back - 0.64))
    r = casimir_relation_residual([1.0, 0.6, 0.0, 0.0], DeformationParams(1.0), m)
    ok = not bad and worked < 1e-12 and r.r9 < 1e-12 and r.r11 < 1e-12
    detail = f"relations {rel_top:.2e}, invariance {inv_top:.2e} (< 1e-9); worked point {worked:.2e} (< 1e-12)"
    assert record(5, "Casimir", ok, detail), bad


def test_criterion_6_weyl():
    top = 0.0
    for name in ("lightcone2", "lightcone3"):
        m = preset(name)
        params = DeformationParams(1.0)
        rng = rng_for(6, f"acceptance.weyl.{name}")
        pts = []
        while len(pts) < 200:
            p = rng.uniform(-1, 1, m.n)
            if in_domain(p, params, m):
                pts.append(p)
        for p in pts:
            top = max(top, rel(weyl_forward(p, 1.0, m), forward(p, params, m)))
    worked = rel(weyl_forward([1.0, 0.5], 1.0, preset("lightcone2")), [math.log(2), 0.5])
    ok = top <= 1e-14 and worked < 1e-12
    assert record(6, "Weyl specialization", ok, f"agreement {top:.2e} (<= 1e-14), worked point {worked:.2e} (< 1e-12)")


def test_criterion_7_coalgebra():
    res = run("minkowski4", ["coproduct"])
    coassoc = res["coproduct.coassociativity"].max_residual
    cocomm = abs(cocommutativity_gap([0.0, 1.0], [1.0, 0.0], 1.0) - (1 - math.exp(-1)))
    gap = coproduct_nonintertwining_gap([0.5, 0.2, 0.0, 0.0], [0.5, -0.1, 0.0, 0.0], DeformationParams(1.0), preset("minkowski4"))
    ok = coassoc < 1e-12 and cocomm < 1e-12 and gap > 1e-6 and all(r.passed for r in res.values())
    detail = f"coassociativity {coassoc:.2e} (< 1e-12), cocommutativity probe {cocomm:.2e}, probe gap {gap:.6f} (> 1e-6)"
    assert record(7, "coalgebra sector", ok, detail)


def test_criterion_8_limits():
    bad = []
    top = 0.0
    checks = ("limit.map", "limit.action", "limit.casimir", "limit.addition")
    for name in PRESET_NAMES:
        res = run(name, ["limit"])
        for c in checks:
            top = max(top, res[c].max_residual)
            if not res[c].passed or res[c].accepted == 0:
                bad.append(f"{name}/{c}")
    detail = f"max |ratio - 2| {top:.3f} (<= {LIMIT_BAND}) for map, action, Casimir and addition"
    assert record(8, "classical limits", not bad, detail), bad


def test_criterion_9_infrastructure():
    cfg = SuiteConfig(metric="offdiag5", samples=100, seed=7)
    a = json.dumps(run_suites(cfg, workers=1).to_dict(wall_time=False), sort_keys=True)
    b = json.dumps(run_suites(cfg, workers=1).to_dict(wall_time=False), sort_keys=True)
    c = json.dumps(run_suites(cfg, workers=2).to_dict(wall_time=False), sort_keys=True)
    rng = np.random.default_rng(9)
    fd_worst = 0.0
    for _ in range(100):
        n = int(rng.integers(1, 5))
        f = random_function(rng, n)
        base = rng.uniform(-1, 1, size=n)
        j = J.jet_eval(lambda p: f(p, JetOps), list(base))
        ff = lambda q: f(q, FloatOps)  # noqa: E731
        fd_worst = max(fd_worst, rel(j.grad, fd_grad(ff, base)), rel(j.hess, fd_hess(ff, base)))
    ok = a == b and a == c and fd_worst < 1e-6
    detail = f"deterministic {a == b}, serial == parallel {a == c}, jets vs differences {fd_worst:.2e} (< 1e-6)"
    assert record(9, "infrastructure", ok, detail)
