"""Pure-Python second-order jets (fallback backend).

A jet carries a value, the gradient and the Hessian of a scalar function with
respect to ``n`` base coordinates.  The Hessian is stored as its packed lower
triangle, row-major: entry ``(i, j)`` with ``i >= j`` lives at
``i * (i + 1) // 2 + j``.  Storing one triangle keeps it symmetric bit for bit.

The compiled backend in ``_jetcore.pyx`` implements the same class; keep the
two in step.
"""
import math

from .errors import DomainError

_PAIRS = {}


def _pairs(n):
    try:
        return _PAIRS[n]
    except KeyError:
        pairs = tuple((i, j) for i in range(n) for j in range(i + 1))
        _PAIRS[n] = pairs
        return pairs


def _make(n, value, grad, hess):
    jet = Jet.__new__(Jet)
    jet.n = n
    jet.value = value
    jet._g = grad
    jet._h = hess
    return jet


class Jet:
    """Truncated Taylor expansion to second order in ``n`` variables."""

    __slots__ = ("n", "value", "_g", "_h")

    def __init__(self, value, grad, hess=None):
        grad = [float(x) for x in grad]
        n = len(grad)
        m = n * (n + 1) // 2
        if hess is None:
            h = [0.0] * m
        else:
            hess = list(hess)
            if len(hess) == n and n > 0 and hasattr(hess[0], "__len__"):
                h = [float(hess[i][j]) for i, j in _pairs(n)]
            else:
                h = [float(x) for x in hess]
            if len(h) != m:
                raise ValueError(f"packed hessian needs {m} entries, got {len(h)}")
        self.n = n
        self.value = float(value)
        self._g = grad
        self._h = h

    @classmethod
    def variable(cls, value, index, n):
        g = [0.0] * n
        g[index] = 1.0
        return _make(n, float(value), g, [0.0] * (n * (n + 1) // 2))

    @classmethod
    def constant(cls, value, n):
        return _make(n, float(value), [0.0] * n, [0.0] * (n * (n + 1) // 2))

    @property
    def grad(self):
        return tuple(self._g)

    @property
    def hess_packed(self):
        return tuple(self._h)

    @property
    def hess(self):
        n = self.n
        h = self._h
        rows = []
        for i in range(n):
            row = []
            for j in range(n):
                a, b = (i, j) if i >= j else (j, i)
                row.append(h[a * (a + 1) // 2 + b])
            rows.append(tuple(row))
        return tuple(rows)

    def __repr__(self):
        return f"Jet({self.value!r}, {self.grad!r}, {self.hess_packed!r})"

    # -- arithmetic -----------------------------------------------------------

    def __pos__(self):
        return self

    def __neg__(self):
        return _make(self.n, -self.value, [-x for x in self._g], [-x for x in self._h])

    def __add__(self, other):
        if isinstance(other, Jet):
            if other.n != self.n:
                raise ValueError("jet dimension mismatch")
            return _make(
                self.n,
                self.value + other.value,
                [a + b for a, b in zip(self._g, other._g)],
                [a + b for a, b in zip(self._h, other._h)],
            )
        if isinstance(other, (int, float)):
            return _make(self.n, self.value + other, self._g, self._h)
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Jet):
            if other.n != self.n:
                raise ValueError("jet dimension mismatch")
            return _make(
                self.n,
                self.value - other.value,
                [a - b for a, b in zip(self._g, other._g)],
                [a - b for a, b in zip(self._h, other._h)],
            )
        if isinstance(other, (int, float)):
            return _make(self.n, self.value - other, self._g, self._h)
        return NotImplemented

    def __rsub__(self, other):
        if isinstance(other, (int, float)):
            return _make(self.n, other - self.value, [-x for x in self._g], [-x for x in self._h])
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, Jet):
            if other.n != self.n:
                raise ValueError("jet dimension mismatch")
            a, b = self.value, other.value
            g, k = self._g, other._g
            H, K = self._h, other._h
            hess = [
                a * K[idx] + b * H[idx] + g[i] * k[j] + k[i] * g[j]
                for idx, (i, j) in enumerate(_pairs(self.n))
            ]
            return _make(self.n, a * b, [a * y + b * x for x, y in zip(g, k)], hess)
        if isinstance(other, (int, float)):
            c = float(other)
            return _make(self.n, self.value * c, [c * x for x in self._g], [c * x for x in self._h])
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * other._reciprocal()
        if isinstance(other, (int, float)):
            return self * (1.0 / other)
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, (int, float)):
            return self._reciprocal() * float(other)
        return NotImplemented

    def __pow__(self, exponent):
        if isinstance(exponent, Jet):
            return (self.log() * exponent).exp()
        if not isinstance(exponent, (int, float)):
            return NotImplemented
        if exponent == 2:
            return self * self
        x = self.value
        if x <= 0.0 and not float(exponent).is_integer():
            raise DomainError(f"non-integer power of non-positive value {x!r}")
        if x == 0.0 and exponent < 2:
            raise DomainError("power with exponent < 2 is not twice differentiable at 0")
        e = float(exponent)
        d0 = x**e
        d1 = e * x ** (e - 1.0)
        d2 = e * (e - 1.0) * x ** (e - 2.0)
        return self._chain(d0, d1, d2)

    # -- elementary functions -------------------------------------------------

    def _chain(self, d0, d1, d2):
        g = self._g
        hess = [d1 * hv + d2 * g[i] * g[j] for hv, (i, j) in zip(self._h, _pairs(self.n))]
        return _make(self.n, d0, [d1 * x for x in g], hess)

    def _reciprocal(self):
        x = self.value
        if x == 0.0:
            raise ZeroDivisionError("jet division by zero")
        r = 1.0 / x
        return self._chain(r, -r * r, 2.0 * r * r * r)

    def exp(self):
        e = math.exp(self.value)
        return self._chain(e, e, e)

    def log(self):
        x = self.value
        if x <= 0.0:
            raise DomainError(f"log of non-positive value {x!r}")
        r = 1.0 / x
        return self._chain(math.log(x), r, -r * r)

    def sqrt(self):
        x = self.value
        if x <= 0.0:
            raise DomainError(f"sqrt of non-positive value {x!r} (not differentiable)")
        s = math.sqrt(x)
        return self._chain(s, 0.5 / s, -0.25 / (s * x))

    def sinh(self):
        s = math.sinh(self.value)
        c = math.cosh(self.value)
        return self._chain(s, c, s)

    def cosh(self):
        s = math.sinh(self.value)
        c = math.cosh(self.value)
        return self._chain(c, s, c)
