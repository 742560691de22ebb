"""Deformed mass-squared Casimir and its relation to the classical one.

    M~^2 = g^{00} (2 kappa sinh(P~_0 / 2 kappa))^2
         + 4 kappa g^{0l} P~_l exp(P~_0 / 2 kappa) sinh(P~_0 / 2 kappa)
         + g^{rs} P~_r P~_s exp(P~_0 / kappa)

On map-connected points ``2A / (C - g00 A) = M~^2 / kappa^2`` and
``A^2 (4 kappa^2 / M~^2 + g00) = M^2``.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .deformation import DeformationParams, _witness, forward, solve_A
from .errors import NoSolution
from .jet import exp, jet_eval, sinh
from .metric import Metric, mass_squared
from .realization import classical_field, deformed_field

DEGENERATE_CUTOFF = 1e-12
RECOVER_RANGE = 10.0  # search |M^2| <= RECOVER_RANGE * kappa^2
RECOVER_GRID = 400


def deformed_mass_squared(pt, m: Metric, kappa: float):
    """The deformed Casimir at deformed momenta ``pt``; floats or jets."""
    n, up = m.n, m.up
    half = pt[0] / (2.0 * kappa)
    sh = sinh(half)
    eh = exp(half)
    total = 0.0
    if up[0][0] != 0.0:
        two_k_sh = (2.0 * kappa) * sh
        total = up[0][0] * (two_k_sh * two_k_sh)
    mixed = 0.0
    for l in range(1, n):
        if up[0][l] != 0.0:
            mixed = mixed + up[0][l] * pt[l]
    total = total + (4.0 * kappa) * mixed * (eh * sh)
    quad = 0.0
    for r in range(1, n):
        row = up[r]
        if row[r] != 0.0:
            quad = quad + row[r] * (pt[r] * pt[r])
        for s in range(1, r):
            if row[s] != 0.0:
                quad = quad + (2.0 * row[s]) * (pt[r] * pt[s])
    return total + quad * (eh * eh)


class CasimirResiduals(NamedTuple):
    r9: float
    r11: float | None
    degenerate: bool


def casimir_relation_residual(p, params: DeformationParams, m: Metric) -> CasimirResiduals:
    """Residuals of the two Casimir relations at classical momenta ``p``.

    ``r9 = 2A/(C - g00 A) - M~^2(Phi(p))/kappa^2`` and
    ``r11 = A^2 (4 kappa^2/M~^2 + g00) - M^2``, both relative with an absolute
    floor of 1.  ``r11`` is skipped (``degenerate=True``) when ``|M~^2| < 1e-12``.
    """
    p = [float(x) for x in p]
    k = params.kappa
    g00 = m.g00
    m2 = float(mass_squared(m, p))
    pt = forward(p, params, m)
    mt2 = float(deformed_mass_squared(pt, m, k))
    c = float(params.c_of(m2))
    a = float(solve_A(m2, c, g00))
    lhs9 = 2.0 * a / (c - g00 * a)
    rhs9 = mt2 / (k * k)
    r9 = abs(lhs9 - rhs9) / max(1.0, abs(lhs9), abs(rhs9))
    if abs(mt2) < DEGENERATE_CUTOFF:
        return CasimirResiduals(r9, None, True)
    lhs11 = a * a * (4.0 * k * k / mt2 + g00)
    r11 = abs(lhs11 - m2) / max(1.0, abs(lhs11), abs(m2))
    return CasimirResiduals(r9, r11, False)


def casimir_invariance_residual(gen, pt, m: Metric, kappa: float, jet_cls=None) -> float:
    """``|X~_gen(M~^2)|`` at deformed momenta ``pt``."""
    pt = [float(x) for x in pt]
    jet = jet_eval(lambda q: deformed_mass_squared(q, m, kappa), pt, jet_cls)
    x = deformed_field(gen, m, kappa).values(pt)
    return abs(float(np.dot(x, jet.grad)))


def classical_invariance_residual(gen, p, m: Metric, jet_cls=None) -> float:
    """``|X_gen(M^2)|`` for the classical field at ``p``."""
    p = [float(x) for x in p]
    jet = jet_eval(lambda q: mass_squared(m, q), p, jet_cls)
    return abs(float(np.dot(classical_field(gen, m).values(p), jet.grad)))


def _ratio_residual(m2: float, target: float, params: DeformationParams, g00: float):
    """``2A/(C - g00 A) - target`` at ``m2``, or None outside the map domain."""
    w = _witness(0.0, m2, params, g00)
    if w.a is None or not w.denom > 0:
        return None
    return 2.0 * w.a / w.denom - target


def _walk(target, params, g00, lim, direction):
    """Bracket a root of the ratio residual walking outward from ``M^2 = 0``.

    Returns ``(inner, r_inner, outer)`` or None.  When the walk leaves the map
    domain the step to the boundary is refined, since poles of the ratio sit
    exactly there.
    """
    step = lim / (RECOVER_GRID // 2)
    prev_x, prev_r = 0.0, _ratio_residual(0.0, target, params, g00)
    if prev_r is None:
        return None
    for k in range(1, RECOVER_GRID // 2 + 1):
        x = direction * k * step
        r = _ratio_residual(x, target, params, g00)
        if r is None:
            bad = x
            for _ in range(200):
                mid = 0.5 * (prev_x + bad)
                if mid == prev_x or mid == bad:
                    return None
                r = _ratio_residual(mid, target, params, g00)
                if r is None:
                    bad = mid
                elif (r < 0) != (prev_r < 0) or r == 0.0:
                    return prev_x, prev_r, mid
                else:
                    prev_x, prev_r = mid, r
            return None
        if (r < 0) != (prev_r < 0) or r == 0.0:
            return prev_x, prev_r, x
        prev_x, prev_r = x, r
    return None


def recover_m2(pt, params: DeformationParams, m: Metric) -> float:
    """Classical ``M^2`` of the preimage of deformed momenta ``pt``.

    Solves ``2A(M^2)/(C - g00 A) = M~^2/kappa^2`` by bisection inside
    ``|M^2| <= 10 kappa^2``, run until the bracket cannot be split further
    (well below 1e-12 relative; the map amplifies M^2 errors by up to ~1e3).  The bracket is searched outward from ``M^2 = 0``,
    so for C families where the ratio is not monotone the root on the branch
    through the origin is returned.  Returns 0 on the degenerate orbit
    ``|M~^2| < 1e-12``.
    """
    k = params.kappa
    g00 = m.g00
    mt2 = float(deformed_mass_squared([float(x) for x in pt], m, k))
    if abs(mt2) < DEGENERATE_CUTOFF:
        return 0.0
    target = mt2 / (k * k)
    lim = RECOVER_RANGE * k * k
    # the ratio vanishes at M^2 = 0 and shares the sign of M^2 near it
    bracket = _walk(target, params, g00, lim, 1.0 if target > 0 else -1.0)
    if bracket is None:
        raise NoSolution(f"no root of the Casimir relation for M~^2 = {mt2!r} within |M^2| <= {lim!r}")
    lo, r_lo, hi = bracket
    if r_lo == 0.0:
        return lo
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        r_mid = _ratio_residual(mid, target, params, g00)
        if r_mid == 0.0:
            return mid
        if (r_mid < 0) == (r_lo < 0):
            lo, r_lo = mid, r_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def recover_m2_closed_form(pt, params: DeformationParams, m: Metric) -> float:
    """Direct solution for M^2-independent C (used as an independent check)."""
    if not params.c_family.m2_independent:
        raise ValueError("closed form needs an M^2-independent C")
    k = params.kappa
    g00 = m.g00
    t = float(deformed_mass_squared([float(x) for x in pt], m, k)) / (k * k)
    c = float(params.c_of(0.0))
    a = c * t / (2.0 + g00 * t)
    return 2.0 * a * c - g00 * a * a


def on_principal_branch(m2: float, params: DeformationParams, m: Metric, margin: float = 0.0) -> bool:
    """True when ``2A/(C - g00 A)`` is increasing in ``M^2`` at ``m2``.

    Only there does :func:`recover_m2` return the classical ``M^2`` of a
    forward-mapped point; with an M^2-dependent C the map folds beyond it.
    ``margin`` demands a slope of at least ``margin / kappa^2``, keeping away
    from the fold itself where the root is tangential.
    """
    from .jet import Jet

    g00 = m.g00
    x = Jet.variable(float(m2), 0, 1)
    c = params.c_of(x)
    try:
        a = solve_A(x, c, g00)
    except Exception:  # noqa: BLE001 - outside the domain
        return False
    ratio = 2.0 * a / (c - g00 * a)
    if not isinstance(ratio, Jet):
        return True
    return ratio.grad[0] > margin / params.kappa**2
