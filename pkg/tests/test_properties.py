"""Invariants over randomly generated metrics, points and deformation scales."""
import numpy as np
from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from kappamap.casimir import casimir_invariance_residual, casimir_relation_residual
from kappamap.coproduct import antipode, deformed_add
from kappamap.deformation import CFamily, DeformationParams, forward, intertwining_residual, inverse, ode_sides
from kappamap.harness import well_conditioned
from kappamap.metric import mass_squared, new_metric
from kappamap.realization import DEFORMED, Generator, check_closure, lorentz_basis
from kappamap.tolerance import max_rel_gap

PROPS = settings(max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much])


@st.composite
def metrics(draw, null_time=False):
    n = draw(st.integers(2, 4))
    off = draw(arrays(np.float64, (n, n), elements=st.floats(-0.4, 0.4)))
    g = np.diag([1.0] + [-1.0] * (n - 1)) + (off + off.T) / 2
    if null_time:
        g[0, 0] = 0.0
        g[0, 1] = g[1, 0] = 1.0
    else:
        g[0, 0] = draw(st.sampled_from([1.0, 0.5, 1.5]))
    assume(abs(np.linalg.det(g)) > 0.05 and np.linalg.cond(g) < 30)
    return new_metric(n, g)


@st.composite
def setups(draw, null_time=False, family=None):
    m = draw(metrics(null_time))
    kappa = draw(st.sampled_from([0.5, 1.0, 3.0]))
    fam = family if family is not None else draw(st.sampled_from([CFamily.kappa(), CFamily.affine(0.5), CFamily.constant(1.7)]))
    params = DeformationParams(kappa, fam)
    p = draw(arrays(np.float64, m.n, elements=st.floats(-1, 1)))
    assume(well_conditioned(p, params, m))
    return m, params, p


@PROPS
@given(setups())
def test_closure_on_random_metrics(s):
    m, params, p = s
    assert check_closure(DEFORMED, m, params.kappa, [p]).residual < 1e-9


@PROPS
@given(setups())
def test_lorentz_intertwining_on_random_metrics(s):
    m, params, p = s
    for gen in lorentz_basis(m.n):
        assert intertwining_residual(gen, p, params, m) < 1e-9


@PROPS
@given(setups(null_time=True, family=CFamily.kappa()))
def test_dilatation_intertwining_on_null_time_metrics(s):
    m, params, p = s
    assert intertwining_residual(Generator.dilatation(), p, params, m) < 1e-9


@PROPS
@given(setups())
def test_ode_on_random_metrics(s):
    m, params, p = s
    lhs, rhs = ode_sides(p[0], float(mass_squared(m, p)), params, m)
    assert max_rel_gap(lhs, rhs) < 1e-10


@PROPS
@given(setups())
def test_roundtrip_on_random_metrics(s):
    m, params, p = s
    m2 = float(mass_squared(m, p))
    back = inverse(forward(p, params, m), params, m, m2)
    assert np.max(np.abs(back - p) / np.maximum(1.0, np.abs(p))) < 1e-10


@PROPS
@given(setups())
def test_casimir_on_random_metrics(s):
    m, params, p = s
    r = casimir_relation_residual(p, params, m)
    assert r.r9 < 1e-9 and (r.degenerate or r.r11 < 1e-9)
    for gen in lorentz_basis(m.n):
        assert casimir_invariance_residual(gen, p, m, params.kappa) < 1e-9


vec = arrays(np.float64, 4, elements=st.floats(-2, 2))


@settings(max_examples=200, deadline=None)
@given(p=vec, q=vec, kappa=st.floats(0.3, 10))
def test_antipode_reverses_composition(p, q, kappa):
    # S(p + q) = S(q) + S(p), the usual anti-homomorphism
    lhs = antipode(deformed_add(p, q, kappa), kappa)
    rhs = deformed_add(antipode(q, kappa), antipode(p, kappa), kappa)
    assert np.max(np.abs(lhs - rhs) / np.maximum(1.0, np.abs(lhs))) < 1e-12
