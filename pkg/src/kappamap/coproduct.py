"""Momentum composition law of the kappa-Poincare coproduct.

The coproduct of the deformed momenta, evaluated on two-particle momenta with
the first tensor leg on the first argument, gives::

    (p + q)_0 = p_0 + q_0
    (p + q)_k = p_k exp(-q_0 / kappa) + q_k

The antipode below is the two-sided inverse for this law.  It is derived here,
not taken from the source algebra.
"""
from __future__ import annotations

import math

import numpy as np

from .deformation import DeformationParams, forward
from .errors import DimensionMismatch, RangeError
from .metric import Metric

EXP_LIMIT = 700.0


def _vec(p) -> np.ndarray:
    return np.asarray(p, dtype=float)


def deformed_add(p, q, kappa: float) -> np.ndarray:
    p, q = _vec(p), _vec(q)
    if p.shape != q.shape:
        raise DimensionMismatch(f"cannot compose momenta of shapes {p.shape} and {q.shape}")
    out = p * math.exp(-q[0] / kappa) + q
    out[0] = p[0] + q[0]
    return out


def antipode(p, kappa: float) -> np.ndarray:
    """``S(p) = (-p_0, -p_k exp(p_0 / kappa))``; ``p + S(p) = 0 = S(p) + p``."""
    p = _vec(p)
    if p[0] / kappa > EXP_LIMIT:
        raise RangeError(f"exp(p0/kappa) overflows for p0/kappa = {p[0] / kappa!r}")
    out = -p * math.exp(p[0] / kappa)
    out[0] = -p[0]
    return out


def coassociativity_gap(p, q, r, kappa: float) -> float:
    left = deformed_add(deformed_add(p, q, kappa), r, kappa)
    right = deformed_add(p, deformed_add(q, r, kappa), kappa)
    return float(np.max(np.abs(left - right)))


def cocommutativity_gap(p, q, kappa: float) -> float:
    return float(np.max(np.abs(deformed_add(p, q, kappa) - deformed_add(q, p, kappa))))


def coproduct_nonintertwining_gap(p, q, params: DeformationParams, m: Metric) -> float:
    """``|Phi(p + q) - Phi(p) (+) Phi(q)|_inf``: ordinary sum inside, deformed law outside."""
    p, q = _vec(p), _vec(q)
    lhs = forward(p + q, params, m)
    rhs = deformed_add(forward(p, params, m), forward(q, params, m), params.kappa)
    return float(np.max(np.abs(lhs - rhs)))
