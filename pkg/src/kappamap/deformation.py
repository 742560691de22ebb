"""The deformation map between classical and kappa-deformed momenta.

With ``M^2 = g^{mu nu} P_mu P_nu``, a free function ``C(M^2)`` and ``A(M^2)``
fixed by ``g00 A^2 - 2 A C + M^2 = 0``::

    P~_0 = kappa ln((P_0 + C) / (C - g00 A))
    P~_i = kappa P_i / (P_0 + C) + kappa A g_{i0} / (P_0 + C)

and the inverse::

    P_0 = (C - g00 A) exp(P~_0 / kappa) - C
    P_i = (C - g00 A) / kappa * exp(P~_0 / kappa) P~_i - g_{i0} A

A is always the rationalized root ``M^2 / (C + sqrt(C^2 - g00 M^2))``, which
makes ``C - g00 A = sqrt(C^2 - g00 M^2)``.  All map functions accept floats or
jets.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .errors import MapDomainError, NoRealRoot, WeylRequiresNullTime
from .jet import exp, is_jet, jacobian, log, sqrt, value_of
from .metric import Metric, mass_squared
from .realization import classical_field, deformed_field
from .tolerance import max_rel_gap

COND_SHIFT = "P0 + C must be positive"
COND_DISC = "C^2 - g00*M^2 must be non-negative"
COND_ROOT = "C + sqrt(C^2 - g00*M^2) must be positive"
COND_DENOM = "C - g00*A must be positive"


@dataclass(frozen=True)
class CFamily:
    """Choice of the free function C(M^2).

    ``kappa``: C = kappa.  ``constant``: C = value.
    ``affine``: C = kappa + value * M^2 / kappa.
    """

    kind: str = "kappa"
    value: float = 0.0

    @classmethod
    def kappa(cls) -> "CFamily":
        return cls("kappa")

    @classmethod
    def constant(cls, c: float) -> "CFamily":
        if not c > 0:
            raise ValueError(f"constant C must be positive, got {c!r}")
        return cls("constant", float(c))

    @classmethod
    def affine(cls, lam: float) -> "CFamily":
        return cls("affine", float(lam))

    @classmethod
    def parse(cls, spec) -> "CFamily":
        """Accept ``"kappa"``, ``"constant:1.5"``, ``"affine:0.5"`` or a dict."""
        if isinstance(spec, CFamily):
            return spec
        if isinstance(spec, dict):
            kind = spec.get("kind", "kappa")
            return cls.kappa() if kind == "kappa" else getattr(cls, kind)(float(spec["value"]))
        mt = re.fullmatch(r"\s*(kappa|constant|affine)\s*(?:[:(]\s*([-+0-9.eE]+)\s*\)?)?\s*", str(spec))
        if not mt:
            raise ValueError(f"cannot parse C family {spec!r}")
        kind, val = mt.group(1), mt.group(2)
        if kind == "kappa":
            return cls.kappa()
        if val is None:
            raise ValueError(f"C family {kind!r} needs a value, e.g. {kind}:0.5")
        return getattr(cls, kind)(float(val))

    @property
    def m2_independent(self) -> bool:
        return self.kind != "affine"

    def c_of(self, m2, kappa: float):
        if self.kind == "kappa":
            return kappa
        if self.kind == "constant":
            return self.value
        return kappa + (self.value / kappa) * m2

    def __str__(self) -> str:
        return "kappa" if self.kind == "kappa" else f"{self.kind}:{self.value!r}"


@dataclass(frozen=True)
class DeformationParams:
    kappa: float = 1.0
    c_family: CFamily = CFamily()

    def __post_init__(self):
        if not self.kappa > 0:
            raise ValueError(f"kappa must be positive, got {self.kappa!r}")

    def c_of(self, m2):
        return self.c_family.c_of(m2, self.kappa)


def solve_A(m2, c, g00: float):
    """Rationalized root of ``g00 A^2 - 2 A C + M^2 = 0``."""
    disc = c * c - g00 * m2
    if value_of(disc) < 0:
        raise NoRealRoot(f"C^2 - g00*M^2 = {value_of(disc)!r} < 0")
    if g00 == 0.0:
        # sqrt(c*c) is exactly |c|; skip it to keep jets away from sqrt of a constant
        root = abs(c) if not is_jet(c) else sqrt(disc)
    else:
        root = sqrt(disc)
    denom = c + root
    if value_of(denom) <= 0:
        raise MapDomainError(COND_ROOT)
    return m2 / denom


@dataclass(frozen=True)
class MapDomainWitness:
    m2: float
    c: float
    a: float | None
    denom: float | None
    shift: float
    disc: float

    @property
    def violations(self) -> list[str]:
        out = []
        if not self.shift > 0:
            out.append(COND_SHIFT)
        if self.disc < 0:
            out.append(COND_DISC)
        elif self.a is None:
            out.append(COND_ROOT)
        elif not self.denom > 0:
            out.append(COND_DENOM)
        return out

    @property
    def ok(self) -> bool:
        return not self.violations


def _witness(p0: float, m2: float, params: DeformationParams, g00: float) -> MapDomainWitness:
    c = float(params.c_of(m2))
    disc = c * c - g00 * m2
    a = denom = None
    if disc >= 0:
        root = np.sqrt(disc)
        if c + root > 0:
            a = m2 / (c + root)
            denom = c - g00 * a
    return MapDomainWitness(m2, c, a, denom, p0 + c, disc)


def domain_witness(p, params: DeformationParams, m: Metric) -> MapDomainWitness:
    pv = [value_of(x) for x in p]
    return _witness(pv[0], float(mass_squared(m, pv)), params, m.g00)


def in_domain(p, params: DeformationParams, m: Metric) -> bool:
    return domain_witness(p, params, m).ok


def _require(p0, m2, params, g00):
    w = _witness(value_of(p0), value_of(m2), params, g00)
    if not w.ok:
        raise MapDomainError(w.violations)


def _pack(out):
    if any(is_jet(x) for x in out):
        return out
    return np.array(out, dtype=float)


def fgh(p0, m2, params: DeformationParams, m: Metric):
    """The solution triple ``(f, g, h)`` as functions of ``P0`` and ``M^2``.

    ``f = kappa/(P0 + C)``, ``h = kappa A/(P0 + C)``,
    ``g = kappa ln((P0 + C)/(C - g00 A))``.
    """
    g00 = m.g00
    _require(p0, m2, params, g00)
    k = params.kappa
    c = params.c_of(m2)
    a = solve_A(m2, c, g00)
    shift = p0 + c
    f = k / shift
    h = (k * a) / shift
    g = k * log(shift / (c - g00 * a))
    return f, g, h


def forward(p, params: DeformationParams, m: Metric):
    """Classical momenta to deformed momenta."""
    n = m.n
    m2 = mass_squared(m, p)
    g00 = m.g00
    _require(p[0], m2, params, g00)
    k = params.kappa
    c = params.c_of(m2)
    a = solve_A(m2, c, g00)
    shift = p[0] + c
    ka = k * a
    lo0 = m.lo[0]
    out = [k * log(shift / (c - g00 * a))]
    for i in range(1, n):
        # one division over the common denominator: the two fractions cancel near P0 + C = 0
        num = k * p[i]
        if lo0[i] != 0.0:
            num = num + lo0[i] * ka
        out.append(num / shift)
    return _pack(out)


def inverse(pt, params: DeformationParams, m: Metric, m2):
    """Deformed momenta back to classical ones, at a known ``M^2``.

    ``m2`` must be the classical mass squared of the preimage (for instance
    from :func:`kappamap.casimir.recover_m2`); A and C are evaluated there.
    """
    k = params.kappa
    g00 = m.g00
    c = params.c_of(m2)
    a = solve_A(m2, c, g00)
    b = c - g00 * a
    scale = b * exp(pt[0] / k)
    lo0 = m.lo[0]
    out = [scale - c]
    for i in range(1, m.n):
        comp = (scale / k) * pt[i]
        if lo0[i] != 0.0:
            comp = comp - lo0[i] * a
        out.append(comp)
    return _pack(out)


def weyl_forward(p, kappa: float, m: Metric):
    """Deformation map for ``g00 = 0`` and ``C = kappa``, written out directly."""
    if not m.is_null_time:
        raise WeylRequiresNullTime(m.g00)
    shift = p[0] + kappa
    if not value_of(shift) > 0:
        raise MapDomainError(COND_SHIFT)
    m2 = mass_squared(m, p)
    lo0 = m.lo[0]
    out = [kappa * log(shift / kappa)]
    for i in range(1, m.n):
        num = kappa * p[i]
        if lo0[i] != 0.0:
            num = num + lo0[i] * (0.5 * m2)
        out.append(num / shift)
    return _pack(out)


def map_jacobian(p, params: DeformationParams, m: Metric, jet_cls=None) -> np.ndarray:
    return jacobian(lambda q: forward(q, params, m), [float(x) for x in p], jet_cls)


def intertwining_residual(gen, p, params: DeformationParams, m: Metric, jet_cls=None) -> float:
    """Max relative gap of ``DPhi(p) X_classical(p)`` against ``X_deformed(Phi(p))``."""
    p = [float(x) for x in p]
    jac = map_jacobian(p, params, m, jet_cls)
    pushed = jac @ classical_field(gen, m).values(p)
    target = deformed_field(gen, m, params.kappa).values(forward(p, params, m))
    return max_rel_gap(pushed, target)


# -- the ODE system in P0 -----------------------------------------------------------


def ode_sides(p0: float, m2: float, params: DeformationParams, m: Metric, as_printed: bool = False, jet_cls=None):
    """Left and right sides of the ten ODEs in ``P0`` (primes are d/dP0 at fixed ``M^2``).

    Equation 7 carries ``g00^2`` on its ``h^2`` term, the coefficient the
    closed-form solution satisfies for every g00.  ``as_printed=True`` uses
    plain ``g00`` there instead; the two agree when g00 is 0 or 1.
    """
    from .jet import Jet

    cls = Jet if jet_cls is None else jet_cls
    k = params.kappa
    g00 = m.g00
    x = cls.variable(float(p0), 0, 1)
    f, g, h = fgh(x, float(m2), params, m)
    fp, gp, hp = f.grad[0], g.grad[0], h.grad[0]
    f, g, h = f.value, g.value, h.value
    e = np.exp(-g / k)
    e2 = np.exp(-2.0 * g / k)
    h2_coef = g00 if as_printed else g00 * g00
    lhs_rhs = [
        (gp * p0, k * (1.0 - e) - g00 * h),
        (gp, f),
        (f * p0, k * (1.0 - e) - g00 * h),
        (fp * p0, f * h * g00 / k + (e - 1.0) * f),
        (fp, -f * f / k),
        (f * h / k, -hp),
        (f * p0, 0.5 * k * (1.0 - e2) - g00 * h * e - h2_coef * h * h / (2.0 * k) + p0 * p0 * f * f / (2.0 * k)),
        (f, e * f + g00 * f * h / k + p0 * f * f / k),
        (hp * p0, h * (e - 1.0) + g00 * h * h / k),
        (h * e, m2 * f * f / (2.0 * k) - g00 * h * h / (2.0 * k)),
    ]
    lhs, rhs = zip(*lhs_rhs)
    return np.array(lhs, dtype=float), np.array(rhs, dtype=float)


def ode_residuals(p0: float, m2: float, params: DeformationParams, m: Metric, as_printed: bool = False, jet_cls=None) -> np.ndarray:
    """LHS - RHS of the ten ODEs; see :func:`ode_sides`."""
    lhs, rhs = ode_sides(p0, m2, params, m, as_printed, jet_cls)
    return lhs - rhs
