"""Tolerance policy: relative comparison with an absolute floor.

``a`` and ``b`` agree to ``tol`` when ``|a - b| <= tol * max(1, |a|, |b|)``.
"""
import numpy as np


def rel_gap(a, b):
    """Elementwise ``|a - b| / max(1, |a|, |b|)``."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    scale = np.maximum(1.0, np.maximum(np.abs(a), np.abs(b)))
    return np.abs(a - b) / scale


def max_rel_gap(a, b) -> float:
    g = rel_gap(a, b)
    return float(np.max(g)) if g.size else 0.0


def close(a, b, tol) -> bool:
    return max_rel_gap(a, b) <= tol
