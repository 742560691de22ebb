# cython: language_level=3
"""Compiled second-order jets.

Same class and semantics as ``_jet_py.Jet``: value, gradient and packed
lower-triangle Hessian with respect to ``n`` base coordinates.  Buffers are
allocated once per jet; instances are never mutated after construction.
"""
from cpython.mem cimport PyMem_Malloc, PyMem_Free
from libc.math cimport exp as c_exp, log as c_log, sqrt as c_sqrt, sinh as c_sinh, cosh as c_cosh, pow as c_pow, floor

from .errors import DomainError


cdef class Jet:
    cdef readonly int n
    cdef readonly double value
    cdef int m
    cdef double* g
    cdef double* h

    def __cinit__(self, *args, **kwargs):
        self.g = NULL
        self.h = NULL
        self.n = 0
        self.m = 0

    def __dealloc__(self):
        if self.g != NULL:
            PyMem_Free(self.g)
            self.g = NULL

    def __init__(self, value, grad, hess=None):
        cdef int n = len(grad)
        cdef int m = n * (n + 1) // 2
        cdef int i, j, idx
        _alloc(self, n)
        self.value = float(value)
        for i in range(n):
            self.g[i] = float(grad[i])
        if hess is None:
            for i in range(m):
                self.h[i] = 0.0
            return
        hess = list(hess)
        if len(hess) == n and n > 0 and hasattr(hess[0], "__len__"):
            idx = 0
            for i in range(n):
                for j in range(i + 1):
                    self.h[idx] = float(hess[i][j])
                    idx += 1
        else:
            if len(hess) != m:
                raise ValueError(f"packed hessian needs {m} entries, got {len(hess)}")
            for i in range(m):
                self.h[i] = float(hess[i])

    @classmethod
    def variable(cls, value, int index, int n):
        cdef Jet r = _new(n)
        cdef int i
        r.value = value
        for i in range(n):
            r.g[i] = 0.0
        for i in range(r.m):
            r.h[i] = 0.0
        r.g[index] = 1.0
        return r

    @classmethod
    def constant(cls, value, int n):
        cdef Jet r = _new(n)
        cdef int i
        r.value = value
        for i in range(n):
            r.g[i] = 0.0
        for i in range(r.m):
            r.h[i] = 0.0
        return r

    @property
    def grad(self):
        return tuple([self.g[i] for i in range(self.n)])

    @property
    def hess_packed(self):
        return tuple([self.h[i] for i in range(self.m)])

    @property
    def hess(self):
        cdef int i, j, a, b
        rows = []
        for i in range(self.n):
            row = []
            for j in range(self.n):
                if i >= j:
                    a, b = i, j
                else:
                    a, b = j, i
                row.append(self.h[a * (a + 1) // 2 + b])
            rows.append(tuple(row))
        return tuple(rows)

    def __repr__(self):
        return f"Jet({self.value!r}, {self.grad!r}, {self.hess_packed!r})"

    def __reduce__(self):
        return (Jet, (self.value, self.grad, self.hess_packed))

    def __pos__(self):
        return self

    def __neg__(self):
        return _scale(self, -1.0)

    def __add__(self, other):
        if isinstance(other, Jet):
            return _add(self, <Jet>other, 1.0)
        if isinstance(other, (int, float)):
            return _shift(self, float(other))
        return NotImplemented

    def __radd__(self, other):
        if isinstance(other, (int, float)):
            return _shift(self, float(other))
        return NotImplemented

    def __sub__(self, other):
        if isinstance(other, Jet):
            return _add(self, <Jet>other, -1.0)
        if isinstance(other, (int, float)):
            return _shift(self, -float(other))
        return NotImplemented

    def __rsub__(self, other):
        cdef Jet r
        if isinstance(other, (int, float)):
            r = _scale(self, -1.0)
            r.value = float(other) - self.value
            return r
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, Jet):
            return _mul(self, <Jet>other)
        if isinstance(other, (int, float)):
            return _scale(self, float(other))
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, float)):
            return _scale(self, float(other))
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return _mul(self, _reciprocal(<Jet>other))
        if isinstance(other, (int, float)):
            return _scale(self, 1.0 / float(other))
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, (int, float)):
            return _scale(_reciprocal(self), float(other))
        return NotImplemented

    def __pow__(self, exponent, modulo=None):
        cdef double x, e
        if isinstance(exponent, Jet):
            return self.log().__mul__(exponent).exp()
        if not isinstance(exponent, (int, float)):
            return NotImplemented
        e = float(exponent)
        if e == 2.0:
            return _mul(self, self)
        x = self.value
        if x <= 0.0 and floor(e) != e:
            raise DomainError(f"non-integer power of non-positive value {x!r}")
        if x == 0.0 and e < 2.0:
            raise DomainError("power with exponent < 2 is not twice differentiable at 0")
        return _chain(self, c_pow(x, e), e * c_pow(x, e - 1.0), e * (e - 1.0) * c_pow(x, e - 2.0))

    def exp(self):
        cdef double e = c_exp(self.value)
        return _chain(self, e, e, e)

    def log(self):
        cdef double x = self.value
        if x <= 0.0:
            raise DomainError(f"log of non-positive value {x!r}")
        cdef double r = 1.0 / x
        return _chain(self, c_log(x), r, -r * r)

    def sqrt(self):
        cdef double x = self.value
        if x <= 0.0:
            raise DomainError(f"sqrt of non-positive value {x!r} (not differentiable)")
        cdef double s = c_sqrt(x)
        return _chain(self, s, 0.5 / s, -0.25 / (s * x))

    def sinh(self):
        cdef double s = c_sinh(self.value)
        return _chain(self, s, c_cosh(self.value), s)

    def cosh(self):
        cdef double c = c_cosh(self.value)
        return _chain(self, c, c_sinh(self.value), c)


cdef inline void _alloc(Jet r, int n) except *:
    cdef int m = n * (n + 1) // 2
    if r.g != NULL:
        PyMem_Free(r.g)
    r.g = <double*> PyMem_Malloc((n + m + 1) * sizeof(double))
    if r.g == NULL:
        raise MemoryError()
    r.h = r.g + n
    r.n = n
    r.m = m


cdef inline Jet _new(int n):
    cdef Jet r = Jet.__new__(Jet)
    _alloc(r, n)
    return r


cdef inline void _check(Jet a, Jet b) except *:
    if a.n != b.n:
        raise ValueError("jet dimension mismatch")


cdef Jet _add(Jet a, Jet b, double sign):
    _check(a, b)
    cdef Jet r = _new(a.n)
    cdef int i
    r.value = a.value + sign * b.value
    for i in range(a.n):
        r.g[i] = a.g[i] + sign * b.g[i]
    for i in range(a.m):
        r.h[i] = a.h[i] + sign * b.h[i]
    return r


cdef Jet _shift(Jet a, double c):
    cdef Jet r = _new(a.n)
    cdef int i
    r.value = a.value + c
    for i in range(a.n + a.m):
        r.g[i] = a.g[i]
    return r


cdef Jet _scale(Jet a, double c):
    cdef Jet r = _new(a.n)
    cdef int i
    r.value = a.value * c
    for i in range(a.n + a.m):
        r.g[i] = a.g[i] * c
    return r


cdef Jet _mul(Jet a, Jet b):
    _check(a, b)
    cdef Jet r = _new(a.n)
    cdef int i, j, idx = 0
    cdef double av = a.value, bv = b.value
    r.value = av * bv
    for i in range(a.n):
        r.g[i] = av * b.g[i] + bv * a.g[i]
        for j in range(i + 1):
            r.h[idx] = av * b.h[idx] + bv * a.h[idx] + a.g[i] * b.g[j] + b.g[i] * a.g[j]
            idx += 1
    return r


cdef Jet _chain(Jet a, double d0, double d1, double d2):
    cdef Jet r = _new(a.n)
    cdef int i, j, idx = 0
    r.value = d0
    for i in range(a.n):
        r.g[i] = d1 * a.g[i]
        for j in range(i + 1):
            r.h[idx] = d1 * a.h[idx] + d2 * a.g[i] * a.g[j]
            idx += 1
    return r


cdef Jet _reciprocal(Jet a):
    cdef double x = a.value
    if x == 0.0:
        raise ZeroDivisionError("jet division by zero")
    cdef double r = 1.0 / x
    return _chain(a, r, -r * r, 2.0 * r * r * r)
