"""Jet backend selection and jet-polymorphic elementary functions.

The compiled kernel (``kappamap._jetcore``) is used when it was built and
``KAPPAMAP_PURE_PYTHON`` is not set; otherwise the pure-Python jets are used.
Both expose the same ``Jet`` class.

Functions written with ``+ - * /`` and the helpers below (:func:`exp`,
:func:`log`, :func:`sqrt`, :func:`sinh`, :func:`cosh`) accept floats and jets
alike, so the same code evaluates values and derivatives.
"""
import math
import os

import numpy as np

from . import _jet_py
from .errors import DomainError

PyJet = _jet_py.Jet

if os.environ.get("KAPPAMAP_PURE_PYTHON"):
    CJet = None
else:
    try:
        from ._jetcore import Jet as CJet
    except ImportError:  # extension not built
        CJet = None

Jet = CJet if CJet is not None else PyJet
BACKEND = "cython" if CJet is not None else "python"

_REAL = (int, float)


def backends():
    """Available ``(name, Jet class)`` pairs, compiled first."""
    out = []
    if CJet is not None:
        out.append(("cython", CJet))
    out.append(("python", PyJet))
    return out


def is_jet(x):
    return not isinstance(x, _REAL)


def value_of(x):
    return float(x) if isinstance(x, _REAL) else x.value


def exp(x):
    if isinstance(x, _REAL):
        return math.exp(x)
    return x.exp()


def log(x):
    if isinstance(x, _REAL):
        if x <= 0:
            raise DomainError(f"log of non-positive value {x!r}")
        return math.log(x)
    return x.log()


def sqrt(x):
    if isinstance(x, _REAL):
        if x < 0:
            raise DomainError(f"sqrt of negative value {x!r}")
        return math.sqrt(x)
    return x.sqrt()


def sinh(x):
    if isinstance(x, _REAL):
        return math.sinh(x)
    return x.sinh()


def cosh(x):
    if isinstance(x, _REAL):
        return math.cosh(x)
    return x.cosh()


def seed(base, jet_cls=None):
    """Independent jet variables for each coordinate of ``base``."""
    cls = Jet if jet_cls is None else jet_cls
    n = len(base)
    return [cls.variable(float(v), i, n) for i, v in enumerate(base)]


def _as_jet(x, n, cls):
    if isinstance(x, _REAL):
        return cls.constant(float(x), n)
    return x


def jet_eval(f, base, jet_cls=None):
    """Value, gradient and Hessian of scalar ``f`` at ``base`` as one jet."""
    cls = Jet if jet_cls is None else jet_cls
    return _as_jet(f(seed(base, cls)), len(base), cls)


def jets_to_arrays(outputs, n):
    """Stack jets into ``(values, jacobian, hessians)`` numpy arrays.

    ``jacobian[r, s]`` is the derivative of output ``r`` by input ``s``;
    ``hessians[r]`` is the full symmetric Hessian of output ``r``.
    """
    m = len(outputs)
    vals = np.empty(m)
    jac = np.empty((m, n))
    hess = np.empty((m, n, n))
    for r, out in enumerate(outputs):
        if isinstance(out, _REAL):
            vals[r] = out
            jac[r] = 0.0
            hess[r] = 0.0
        else:
            vals[r] = out.value
            jac[r] = out.grad
            hess[r] = out.hess
    return vals, jac, hess


def jacobian(mapping, base, jet_cls=None):
    """Jacobian matrix of a jet-polymorphic map ``R^n -> R^m`` at ``base``."""
    n = len(base)
    cls = Jet if jet_cls is None else jet_cls
    outputs = mapping(seed(base, cls))
    jac = np.empty((len(outputs), n))
    for r, out in enumerate(outputs):
        jac[r] = 0.0 if isinstance(out, _REAL) else out.grad
    return jac
