"""Metrics on momentum space and the classical mass-squared Casimir.

Index 0 is the time-like slot, indices ``1..n-1`` are spatial.  Momenta are
covariant (lower index); :attr:`Metric.upper` raises them.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DimensionMismatch, DimensionTooSmall, NonInvertible, NotSymmetric

SYMMETRY_TOL = 1e-12
DET_FLOOR = 1e-12
INVERSE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class Metric:
    """Symmetric invertible metric ``g_{mu nu}`` with its inverse ``g^{mu nu}``.

    Build instances with :func:`new_metric`; the arrays are read-only.
    """

    n: int
    lower: np.ndarray
    upper: np.ndarray
    name: str | None = None

    @property
    def g00(self) -> float:
        return float(self.lower[0, 0])

    @property
    def is_null_time(self) -> bool:
        """True when g00 vanishes (the only case admitting dilatations)."""
        return abs(self.g00) < SYMMETRY_TOL

    @cached_property
    def lo(self) -> tuple:
        """``lower`` as nested tuples of floats, for scalar/jet loops."""
        return tuple(tuple(float(x) for x in row) for row in self.lower)

    @cached_property
    def up(self) -> tuple:
        """``upper`` as nested tuples of floats, for scalar/jet loops."""
        return tuple(tuple(float(x) for x in row) for row in self.upper)

    def raise_index(self, p):
        return self.upper @ np.asarray(p, dtype=float)

    def lower_index(self, v):
        return self.lower @ np.asarray(v, dtype=float)

    def __eq__(self, other):
        if not isinstance(other, Metric):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.lower, other.lower)

    def __hash__(self):
        return hash((self.n, self.lower.tobytes()))

    def to_dict(self) -> dict:
        if self.name is not None:
            return {"preset": self.name}
        return {"n": self.n, "rows": self.lower.tolist()}


def new_metric(n: int, entries, name: str | None = None) -> Metric:
    """Validate ``entries`` (an ``n x n`` array) and return a :class:`Metric`.

    The input is symmetrized as ``(g + g.T) / 2`` after checking that the
    asymmetry does not exceed 1e-12.
    """
    if n < 2:
        raise DimensionTooSmall(f"metric dimension must be at least 2, got {n}")
    g = np.array(entries, dtype=float)
    if g.shape != (n, n):
        raise DimensionMismatch(f"metric entries must be {n}x{n}, got shape {g.shape}")
    if not np.all(np.isfinite(g)):
        raise NonInvertible("metric entries must be finite")
    asym = np.max(np.abs(g - g.T))
    if asym > SYMMETRY_TOL:
        raise NotSymmetric(f"metric is not symmetric (max asymmetry {asym:.3g})")
    g = 0.5 * (g + g.T)
    det = np.linalg.det(g)
    if abs(det) < DET_FLOOR:
        raise NonInvertible(f"metric is singular (|det| = {abs(det):.3g})")
    ginv = np.linalg.inv(g)
    ginv = 0.5 * (ginv + ginv.T)
    err = np.max(np.abs(ginv @ g - np.eye(n)))
    if err > INVERSE_TOL:
        raise NonInvertible(f"metric is too ill-conditioned to invert (residual {err:.3g})")
    g.setflags(write=False)
    ginv.setflags(write=False)
    return Metric(n, g, ginv, name)


def _minkowski(n):
    return np.diag([1.0] + [-1.0] * (n - 1))


def _offdiag5():
    g = _minkowski(5)
    g[0, 1] = g[1, 0] = 0.3
    return g


def _lightcone3():
    return np.array([[0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, -1.0]])


def _lightcone4():
    # g00 = 0 with nonzero g^{00}, g^{0i} and g_{0i} in every spatial slot.
    return np.array(
        [
            [0.0, 1.0, 0.5, 0.25],
            [1.0, -1.0, 0.0, 0.0],
            [0.5, 0.0, -1.0, 0.0],
            [0.25, 0.0, 0.0, -1.0],
        ]
    )


_PRESETS = {
    "minkowski4": lambda: _minkowski(4),
    "minkowski3": lambda: _minkowski(3),
    "lightcone2": lambda: np.array([[0.0, 1.0], [1.0, 0.0]]),
    "lightcone3": _lightcone3,
    "lightcone4": _lightcone4,
    "offdiag5": _offdiag5,
}

PRESET_NAMES = tuple(_PRESETS)


def preset(name: str) -> Metric:
    try:
        rows = _PRESETS[name]()
    except KeyError:
        raise KeyError(f"unknown metric preset {name!r}; choose from {', '.join(PRESET_NAMES)}") from None
    return new_metric(len(rows), rows, name=name)


def metric_from_spec(spec) -> Metric:
    """Metric from a preset name, ``{"preset": name}`` or ``{"n": .., "rows": ..}``."""
    if isinstance(spec, Metric):
        return spec
    if isinstance(spec, str):
        return preset(spec)
    if isinstance(spec, dict):
        if "preset" in spec:
            return preset(spec["preset"])
        rows = spec["rows"]
        return new_metric(int(spec.get("n", len(rows))), rows)
    raise TypeError(f"cannot build a metric from {spec!r}")


def mass_squared(m: Metric, p):
    """Classical Casimir ``g^{mu nu} p_mu p_nu``; accepts floats or jets."""
    if len(p) != m.n:
        raise DimensionMismatch(f"momentum has {len(p)} components, metric has n = {m.n}")
    up = m.up
    total = 0.0
    for mu in range(m.n):
        row = up[mu]
        if row[mu] != 0.0:
            total = total + row[mu] * (p[mu] * p[mu])
        for nu in range(mu):
            if row[nu] != 0.0:
                total = total + (2.0 * row[nu]) * (p[mu] * p[nu])
    return total
