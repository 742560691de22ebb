"""Lorentz and Weyl generators realized as vector fields on momentum space.

Convention: a quantum generator ``M`` is ``i`` times a real vector field ``X``
acting as a derivation on functions of the momenta, so ``[M, F(P)] = i X(F)``.
With this convention ``[M_A, M_B] = i f_AB^C M_C`` is the real bracket
``[X_A, X_B] = f_AB^C X_C`` and a commutator ``[M, P_rho] = i R_rho`` means
``X`` has component ``R_rho``.

Classical fields (the kappa -> infinity limit):

* ``X^{mu nu}_rho = delta^nu_rho p^mu - delta^mu_rho p^nu`` with ``p^mu = g^{mu s} p_s``;
  ``Rotation(i, j)`` is ``X^{ij}`` and ``Boost(i)`` is ``X^{i0}``.
* ``Dilatation_rho = p_rho``.

Deformed fields are the kappa-Poincare commutators with the overall ``i``
removed; the dilatation additionally needs ``g00 = 0``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Sequence

import numpy as np

from .errors import DimensionMismatch, WeylRequiresNullTime
from .jet import exp, jets_to_arrays, seed
from .metric import Metric
from .tolerance import rel_gap

CLASSICAL = "classical"
DEFORMED = "deformed"


@dataclass(frozen=True, order=True)
class Generator:
    """Generator label: ``rotation`` (i, j), ``boost`` (i) or ``dilatation``.

    Spatial indices run over ``1..n-1``.
    """

    kind: str
    i: int = 0
    j: int = 0

    @classmethod
    def rotation(cls, i: int, j: int) -> "Generator":
        return cls("rotation", i, j)

    @classmethod
    def boost(cls, i: int) -> "Generator":
        return cls("boost", i, 0)

    @classmethod
    def dilatation(cls) -> "Generator":
        return cls("dilatation")

    @classmethod
    def parse(cls, text: str) -> "Generator":
        """Parse ``Rotation(1,2)``, ``Boost(1)`` or ``Dilatation``."""
        s = text.strip().replace(" ", "")
        if s.lower() in ("dilatation", "d"):
            return cls.dilatation()
        mt = re.fullmatch(r"(?i)rotation\((\d+),(\d+)\)", s)
        if mt:
            return cls.rotation(int(mt.group(1)), int(mt.group(2)))
        mt = re.fullmatch(r"(?i)boost\((\d+)\)", s)
        if mt:
            return cls.boost(int(mt.group(1)))
        raise ValueError(f"cannot parse generator {text!r}")

    @property
    def is_lorentz(self) -> bool:
        return self.kind != "dilatation"

    def lorentz_indices(self) -> tuple[int, int]:
        """The ``(mu, nu)`` of ``X^{mu nu}`` this generator stands for."""
        if self.kind == "rotation":
            return (self.i, self.j)
        if self.kind == "boost":
            return (self.i, 0)
        raise ValueError("dilatation has no Lorentz indices")

    def check(self, n: int) -> None:
        if self.kind == "dilatation":
            return
        idx = (self.i, self.j) if self.kind == "rotation" else (self.i,)
        for k in idx:
            if not 1 <= k <= n - 1:
                raise ValueError(f"{self}: spatial index {k} out of range 1..{n - 1}")

    def __str__(self) -> str:
        if self.kind == "rotation":
            return f"Rotation({self.i},{self.j})"
        if self.kind == "boost":
            return f"Boost({self.i})"
        return "Dilatation"


def lorentz_basis(n: int) -> list[Generator]:
    """Rotations ``(i, j)`` with ``i < j`` in lexicographic order, then boosts."""
    rots = [Generator.rotation(i, j) for i, j in combinations(range(1, n), 2)]
    return rots + [Generator.boost(i) for i in range(1, n)]


@dataclass(frozen=True)
class VectorField:
    """A generator realized on momentum space.

    ``func`` maps a length-``n`` sequence of scalars (floats or jets) to the
    list of ``n`` components.
    """

    label: Generator
    basis: str
    n: int
    func: Callable[[Sequence], list] = field(repr=False, compare=False)

    def __call__(self, p):
        return self.func(p)

    def component(self, rho: int) -> Callable:
        return lambda p: self.func(p)[rho]

    def values(self, p) -> np.ndarray:
        return np.array([float(c) for c in self.func([float(x) for x in p])])

    def jets(self, p, jet_cls=None):
        """``(values, jacobian, hessians)`` of the components at ``p``."""
        if len(p) != self.n:
            raise DimensionMismatch(f"point has {len(p)} components, field has n = {self.n}")
        return jets_to_arrays(self.func(seed(p, jet_cls)), self.n)


def _zero_field(label, basis, n):
    return VectorField(label, basis, n, lambda p: [0.0] * n)


def _negated(vf: VectorField, label: Generator) -> VectorField:
    f = vf.func
    return VectorField(label, vf.basis, vf.n, lambda p: [-c for c in f(p)])


def _raised(up, p, mu, n):
    row = up[mu]
    total = 0.0
    for s in range(n):
        if row[s] != 0.0:
            total = total + row[s] * p[s]
    return total


def _classical_lorentz(m: Metric, mu: int, nu: int) -> Callable:
    n, up = m.n, m.up

    def func(p):
        out = [0.0] * n
        if mu == nu:
            return out
        out[nu] = out[nu] + _raised(up, p, mu, n)
        out[mu] = out[mu] - _raised(up, p, nu, n)
        return out

    return func


def classical_field(gen: Generator, m: Metric) -> VectorField:
    """Undeformed action of ``gen`` on momentum space."""
    gen.check(m.n)
    n = m.n
    if gen.kind == "dilatation":
        return VectorField(gen, CLASSICAL, n, lambda p: list(p))
    mu, nu = gen.lorentz_indices()
    return VectorField(gen, CLASSICAL, n, _classical_lorentz(m, mu, nu))


def _spatial_dot(row, p, n):
    total = 0.0
    for s in range(1, n):
        if row[s] != 0.0:
            total = total + row[s] * p[s]
    return total


def _spatial_quad(up, p, n):
    total = 0.0
    for r in range(1, n):
        row = up[r]
        if row[r] != 0.0:
            total = total + row[r] * (p[r] * p[r])
        for s in range(1, r):
            if row[s] != 0.0:
                total = total + (2.0 * row[s]) * (p[r] * p[s])
    return total


def _deformed_rotation(m: Metric, kappa: float, i: int, j: int) -> Callable:
    n, up = m.n, m.up
    g0i, g0j = up[0][i], up[0][j]

    def func(p):
        one_minus = 1.0 - exp(-p[0] / kappa)
        out = [0.0] * n
        out[j] = kappa * g0i * one_minus + _spatial_dot(up[i], p, n)
        out[i] = -(kappa * g0j * one_minus) - _spatial_dot(up[j], p, n)
        return out

    return func


def _deformed_boost(m: Metric, kappa: float, i: int) -> Callable:
    n, up = m.n, m.up
    g00 = up[0][0]
    gi0 = up[i][0]

    def func(p):
        e1 = exp(-p[0] / kappa)
        e2 = e1 * e1
        zero_slot = kappa * gi0 * (1.0 - e1) + _spatial_dot(up[i], p, n)
        g0s_p = _spatial_dot(up[0], p, n)
        gis_p = _spatial_dot(up[i], p, n)
        quad = _spatial_quad(up, p, n)
        out = [zero_slot]
        for k in range(1, n):
            comp = gi0 * p[k] * (e1 - 1.0) - (gis_p * p[k]) / kappa
            if k == i:
                comp = comp - (0.5 * kappa * g00) * (1.0 - e2) - g0s_p * e1 + quad / (2.0 * kappa)
            out.append(comp)
        return out

    return func


def _deformed_dilatation(m: Metric, kappa: float) -> Callable:
    n, up, lo = m.n, m.up, m.lo
    g00_up = up[0][0]

    def func(p):
        one_minus = 1.0 - exp(-p[0] / kappa)
        e1 = 1.0 - one_minus
        g0s_p = _spatial_dot(up[0], p, n)
        quad = _spatial_quad(up, p, n)
        out = [kappa * one_minus]
        for i in range(1, n):
            g0i = lo[0][i]
            comp = p[i] * e1
            if g0i != 0.0:
                comp = (
                    comp
                    + g0i * g0s_p * one_minus
                    + (g0i / (2.0 * kappa)) * quad
                    + (0.5 * kappa * g00_up * g0i) * (one_minus * one_minus)
                )
            out.append(comp)
        return out

    return func


def deformed_field(gen: Generator, m: Metric, kappa: float) -> VectorField:
    """kappa-deformed action of ``gen`` on the deformed momenta."""
    if not kappa > 0:
        raise ValueError(f"kappa must be positive, got {kappa!r}")
    gen.check(m.n)
    n = m.n
    kappa = float(kappa)
    if gen.kind == "dilatation":
        if not m.is_null_time:
            raise WeylRequiresNullTime(m.g00)
        return VectorField(gen, DEFORMED, n, _deformed_dilatation(m, kappa))
    if gen.kind == "boost":
        return VectorField(gen, DEFORMED, n, _deformed_boost(m, kappa, gen.i))
    i, j = gen.i, gen.j
    if i == j:
        return _zero_field(gen, DEFORMED, n)
    if i > j:
        return _negated(VectorField(gen, DEFORMED, n, _deformed_rotation(m, kappa, j, i)), gen)
    return VectorField(gen, DEFORMED, n, _deformed_rotation(m, kappa, i, j))


def make_field(gen: Generator, basis: str, m: Metric, kappa: float | None = None) -> VectorField:
    if basis == CLASSICAL:
        return classical_field(gen, m)
    if basis == DEFORMED:
        return deformed_field(gen, m, kappa)
    raise ValueError(f"unknown basis {basis!r}")


# -- brackets ------------------------------------------------------------------


def bracket_from_jets(vx, jx, vy, jy):
    """``[X, Y]_rho = X_s d_s Y_rho - Y_s d_s X_rho`` from values and Jacobians."""
    return jy @ vx - jx @ vy


def lie_bracket(x: VectorField, y: VectorField, at, jet_cls=None) -> np.ndarray:
    """Lie bracket of two fields evaluated at a point."""
    if x.n != y.n:
        raise DimensionMismatch("fields act on spaces of different dimension")
    vx, jx, _ = x.jets(at, jet_cls)
    vy, jy, _ = y.jets(at, jet_cls)
    return bracket_from_jets(vx, jx, vy, jy)


def _bracket_1jet(a, b):
    """Value and Jacobian of ``[A, B]`` from order-2 data of A and B."""
    va, ja, ha = a
    vb, jb, hb = b
    val = jb @ va - ja @ vb
    # d_t (jb[r,s] va[s]) = hb[r,s,t] va[s] + jb[r,s] ja[s,t]
    jac = (
        np.einsum("rst,s->rt", hb, va)
        + jb @ ja
        - np.einsum("rst,s->rt", ha, vb)
        - ja @ jb
    )
    return val, jac


def jacobi_from_jets(a, b, c) -> float:
    """Max-norm of the Jacobi combination from ``(values, jac, hess)`` triples."""
    total = np.zeros_like(a[0])
    for x, y, z in ((a, b, c), (b, c, a), (c, a, b)):
        vxy, jxy = _bracket_1jet(x, y)
        vz, jz, _ = z
        total += jz @ vxy - jxy @ vz
    return float(np.max(np.abs(total)))


def jacobi_residual(a: VectorField, b: VectorField, c: VectorField, at, jet_cls=None) -> float:
    """Max-norm of ``[[A,B],C] + [[B,C],A] + [[C,A],B]`` at ``at``."""
    return jacobi_from_jets(a.jets(at, jet_cls), b.jets(at, jet_cls), c.jets(at, jet_cls))


# -- structure constants -----------------------------------------------------------


@dataclass(frozen=True, eq=False)
class StructureTable:
    """Structure constants ``coeffs[A, B, C]`` over ``basis``.

    ``remainder[A, B]`` would flag brackets that leave the span of the basis;
    in the Lorentz/Weyl sector it is identically False.
    """

    basis: tuple
    coeffs: np.ndarray
    remainder: np.ndarray

    def index(self, gen: Generator) -> int:
        return self.basis.index(gen)


def _lorentz_element(mu: int, nu: int, index: dict) -> tuple[int, float] | None:
    """``X^{mu nu}`` as ``(basis position, sign)``, or None if it vanishes."""
    if mu == nu:
        return None
    if mu != 0 and nu != 0:
        if mu < nu:
            return index[Generator.rotation(mu, nu)], 1.0
        return index[Generator.rotation(nu, mu)], -1.0
    if nu == 0:
        return index[Generator.boost(mu)], 1.0
    return index[Generator.boost(nu)], -1.0


def structure_table(m: Metric, with_dilatation: bool = False) -> StructureTable:
    """Lorentz structure constants read off the undeformed commutator.

    ``[X^{mu nu}, X^{ab}] = g^{mu b} X^{nu a} - g^{nu b} X^{mu a}
    + g^{nu a} X^{mu b} - g^{mu a} X^{nu b}``; the dilatation, when included,
    commutes with everything.
    """
    basis = lorentz_basis(m.n)
    if with_dilatation:
        basis.append(Generator.dilatation())
    index = {g: k for k, g in enumerate(basis)}
    size = len(basis)
    coeffs = np.zeros((size, size, size))
    up = m.upper
    for A, ga in enumerate(basis):
        if not ga.is_lorentz:
            continue
        mu, nu = ga.lorentz_indices()
        for B, gb in enumerate(basis):
            if not gb.is_lorentz:
                continue
            a, b = gb.lorentz_indices()
            terms = (
                (up[mu, b], nu, a),
                (-up[nu, b], mu, a),
                (up[nu, a], mu, b),
                (-up[mu, a], nu, b),
            )
            for coef, x, y in terms:
                if coef == 0.0:
                    continue
                elem = _lorentz_element(x, y, index)
                if elem is not None:
                    C, sign = elem
                    coeffs[A, B, C] += sign * coef
    coeffs.setflags(write=False)
    remainder = np.zeros((size, size), dtype=bool)
    return StructureTable(tuple(basis), coeffs, remainder)


# -- closure -----------------------------------------------------------------------


@dataclass
class ClosureReport:
    basis: str
    max_residual: float
    worst_point: list | None
    worst_pair: tuple | None
    points: int
    dilatation_residual: float | None = None

    @property
    def residual(self) -> float:
        d = self.dilatation_residual or 0.0
        return max(self.max_residual, d)


def field_set(basis: str, m: Metric, kappa: float | None, with_dilatation: bool = False) -> dict:
    gens = lorentz_basis(m.n)
    if with_dilatation:
        gens.append(Generator.dilatation())
    return {g: make_field(g, basis, m, kappa) for g in gens}


def closure_residual_at(table: StructureTable, fields: dict, p, jet_cls=None):
    """Worst structure-constant residual at one point.

    Returns ``(lorentz_residual, worst_pair, dilatation_residual)``; the last
    is None when the dilatation is not in ``fields``.
    """
    lorentz = [g for g in table.basis if g.is_lorentz]
    data = [fields[g].jets(p, jet_cls) for g in lorentz]
    V = np.array([d[0] for d in data])
    J = np.array([d[1] for d in data])
    # lhs[a, b] = J_b V_a - J_a V_b
    lhs = np.einsum("brs,as->abr", J, V) - np.einsum("ars,bs->abr", J, V)
    k = len(lorentz)
    rhs = np.einsum("abc,cr->abr", table.coeffs[:k, :k, :k], V)
    gap = rel_gap(lhs, rhs).max(axis=2)
    flat = int(np.argmax(gap))
    a, b = divmod(flat, k)
    worst = float(gap[a, b])
    pair = (str(lorentz[a]), str(lorentz[b]))
    dil = None
    dgen = Generator.dilatation()
    if dgen in fields:
        vd, jd, _ = fields[dgen].jets(p, jet_cls)
        br = np.einsum("ars,s->ar", J, vd) - V @ jd.T  # [D, X_a]
        dil = float(np.max(np.abs(br)))
    return worst, pair, dil


def check_closure(
    basis: str,
    m: Metric,
    kappa: float | None,
    points,
    fields: dict | None = None,
    with_dilatation: bool | None = None,
    jet_cls=None,
) -> ClosureReport:
    """Check ``[X_A, X_B] = f_AB^C X_C`` (and ``[D, X_A] = 0``) at every point.

    ``fields`` may override individual generators, e.g. with a mis-specified
    kappa for a negative control.
    """
    if with_dilatation is None:
        with_dilatation = m.is_null_time
    table = structure_table(m)
    fs = field_set(basis, m, kappa, with_dilatation)
    if fields:
        fs.update(fields)
    worst, worst_pt, worst_pair = -1.0, None, None
    dil_worst = None
    count = 0
    for p in points:
        count += 1
        r, pair, dil = closure_residual_at(table, fs, p, jet_cls)
        if r > worst:
            worst, worst_pt, worst_pair = r, [float(x) for x in p], pair
        if dil is not None:
            dil_worst = dil if dil_worst is None else max(dil_worst, dil)
    return ClosureReport(basis, max(worst, 0.0), worst_pt, worst_pair, count, dil_worst)
