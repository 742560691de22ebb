import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kappamap.coproduct import (
    antipode,
    coassociativity_gap,
    cocommutativity_gap,
    coproduct_nonintertwining_gap,
    deformed_add,
)
from kappamap.deformation import DeformationParams
from kappamap.errors import DimensionMismatch, RangeError
from kappamap.metric import preset
from oracles import mp_add, mp_forward, rel

MINK = preset("minkowski4")
PROBE_P = [0.5, 0.2, 0.0, 0.0]
PROBE_Q = [0.5, -0.1, 0.0, 0.0]
# frozen from the 50-digit oracle below
PROBE_GAP = 1.9297224677262472


def test_add_example():
    assert rel(deformed_add([0.0, 1.0], [1.0, 0.0], 1.0), [1.0, math.exp(-1)]) < 1e-15


def test_add_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        deformed_add([0.0, 1.0], [1.0, 0.0, 0.0], 1.0)


def test_units(rng):
    for p in rng.uniform(-3, 3, size=(20, 4)):
        assert np.array_equal(deformed_add(p, np.zeros(4), 0.7), p)
        assert np.array_equal(deformed_add(np.zeros(4), p, 0.7), p)


def test_add_against_mpmath(rng):
    for kappa in (0.5, 1.0, 5.0):
        for p, q in rng.uniform(-2, 2, size=(50, 2, 5)):
            assert rel(deformed_add(p, q, kappa), [float(x) for x in mp_add(p, q, kappa)]) < 1e-15


def test_time_component_is_additive(rng):
    for p, q in rng.uniform(-2, 2, size=(50, 2, 3)):
        assert deformed_add(p, q, 0.3)[0] == p[0] + q[0]


def test_antipode_example():
    s = antipode([1.0, 0.5], 1.0)
    assert rel(s, [-1.0, -0.5 * math.e]) < 1e-15
    assert np.array_equal(deformed_add([1.0, 0.5], s, 1.0), [0.0, 0.0])
    assert np.array_equal(antipode([0.0, 0.0, 0.0], 1.0), np.zeros(3))


def test_antipode_two_sided_and_involutive(rng):
    for kappa in (0.5, 1.0, 5.0):
        for p in rng.uniform(-2, 2, size=(100, 4)):
            s = antipode(p, kappa)
            assert np.max(np.abs(deformed_add(p, s, kappa))) < 1e-12
            assert np.max(np.abs(deformed_add(s, p, kappa))) < 1e-12
            assert rel(antipode(s, kappa), p) < 1e-12


def test_antipode_overflow():
    with pytest.raises(RangeError):
        antipode([701.0, 1.0], 1.0)
    antipode([699.0, 1.0], 1.0)


def test_coassociativity(rng):
    for kappa in (0.5, 1.0, 5.0):
        triples = rng.uniform(-1, 1, size=(500, 3, 4))
        assert max(coassociativity_gap(p, q, r, kappa) for p, q, r in triples) < 1e-12


def test_coassociativity_trivial_cases():
    p, q, r = [0.3, 0.0, 0.0], [-1.2, 0.0, 0.0], [2.0, 0.0, 0.0]
    assert coassociativity_gap(p, q, r, 1.0) == 0.0
    p = [0.4, -0.7, 0.2]
    assert coassociativity_gap(p, p, p, 1.0) < 1e-13


def test_cocommutativity_probe():
    gap = cocommutativity_gap([0.0, 1.0], [1.0, 0.0], 1.0)
    assert abs(gap - (1 - math.exp(-1))) < 1e-12
    assert cocommutativity_gap([0.3, 1.0], [0.3, 1.0], 1.0) == 0.0
    assert cocommutativity_gap([0.0, 1.0, 2.0], [0.0, -3.0, 0.5], 1.0) == 0.0


def test_nonintertwining_probe():
    gap = coproduct_nonintertwining_gap(PROBE_P, PROBE_Q, DeformationParams(1.0), MINK)
    assert gap > 1e-6
    assert abs(gap - PROBE_GAP) < 1e-12


def test_nonintertwining_probe_oracle():
    s = [a + b for a, b in zip(PROBE_P, PROBE_Q)]
    lhs = mp_forward(s, MINK.lower, 1.0)
    rhs = mp_add(mp_forward(PROBE_P, MINK.lower, 1.0), mp_forward(PROBE_Q, MINK.lower, 1.0), 1.0)
    assert abs(float(max(abs(a - b) for a, b in zip(lhs, rhs))) - PROBE_GAP) < 1e-15


def test_nonintertwining_unit():
    params = DeformationParams(1.0)
    assert coproduct_nonintertwining_gap(PROBE_P, [0.0] * 4, params, MINK) == 0.0


def test_kappa_scan_rates():
    # the time-component gap decays like 1/kappa
    p, q = [0.3, 0.2, 0.0, 0.0], [0.2, -0.1, 0.0, 0.0]
    kappas = [10.0, 20.0, 40.0, 80.0]
    gaps = [coproduct_nonintertwining_gap(p, q, DeformationParams(k), MINK) for k in kappas]
    for a, b in zip(gaps, gaps[1:]):
        assert 1.8 <= a / b <= 2.2
    adds = [np.max(np.abs(deformed_add(p, q, k) - np.add(p, q))) for k in kappas]
    for a, b in zip(adds, adds[1:]):
        assert 1.8 <= a / b <= 2.2


vec = st.lists(st.floats(-3, 3), min_size=3, max_size=3)


@settings(max_examples=200, deadline=None)
@given(p=vec, q=vec, r=vec, kappa=st.floats(0.2, 10))
def test_group_law_properties(p, q, r, kappa):
    # exact identity; rounding grows with the size of the composed momenta
    left = deformed_add(deformed_add(p, q, kappa), r, kappa)
    assert coassociativity_gap(p, q, r, kappa) <= 1e-14 * max(1.0, float(np.max(np.abs(left))))
    s = antipode(p, kappa)
    scale = max(1.0, float(np.max(np.abs(s))))
    assert np.max(np.abs(deformed_add(p, s, kappa))) <= 1e-15 * scale * 4
