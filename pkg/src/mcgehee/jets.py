"""Second-order forward-mode jets.

A :class:`Jet2` carries a value together with first and second derivatives
with respect to a single scalar parameter, and propagates them through
arithmetic by truncated Taylor expansion:

    (a, a', a'') * (b, b', b'')  ->  (ab, a'b + ab', a''b + 2a'b' + ab'')
    f(a)                         ->  (f(a), f'(a) a', f''(a) a'^2 + f'(a) a'')

Components may be plain floats or numpy arrays of equal shape, so a single
evaluation of a compiled potential yields V, V' and V'' on a whole grid.
Evaluation is strict about domains: anything that would silently produce a
NaN or an infinity raises instead (:class:`~mcgehee.errors.DomainError`,
or ``ZeroDivisionError`` for division by an exact zero).
"""
from __future__ import annotations

import math

import numpy as np

from .errors import DomainError

__all__ = ["Jet2", "sin", "cos", "tan", "sqrt", "exp", "log"]

# tan is rejected this close to a pole of the tangent
_TAN_POLE_TOL = 1e-12


def _is_array(x) -> bool:
    return isinstance(x, np.ndarray)


def _any(cond) -> bool:
    """Truth of a scalar-or-array condition."""
    return bool(np.any(cond)) if _is_array(cond) else bool(cond)


class Jet2:
    """Value plus first and second derivative with respect to one parameter."""

    __slots__ = ("val", "d1", "d2")

    def __init__(self, val, d1=0.0, d2=0.0):
        self.val = val
        self.d1 = d1
        self.d2 = d2

    @classmethod
    def variable(cls, theta) -> "Jet2":
        """Lift the independent variable: derivative 1, curvature 0."""
        if _is_array(theta):
            theta = np.asarray(theta, dtype=float)
            return cls(theta, np.ones_like(theta), np.zeros_like(theta))
        return cls(float(theta), 1.0, 0.0)

    @classmethod
    def constant(cls, c) -> "Jet2":
        if _is_array(c):
            c = np.asarray(c, dtype=float)
            return cls(c, np.zeros_like(c), np.zeros_like(c))
        return cls(float(c), 0.0, 0.0)

    # ------------------------------------------------------------ arithmetic
    def __add__(self, other):
        o = _coerce(other)
        return Jet2(self.val + o.val, self.d1 + o.d1, self.d2 + o.d2)

    __radd__ = __add__

    def __sub__(self, other):
        o = _coerce(other)
        return Jet2(self.val - o.val, self.d1 - o.d1, self.d2 - o.d2)

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        o = _coerce(other)
        return Jet2(
            self.val * o.val,
            self.d1 * o.val + self.val * o.d1,
            self.d2 * o.val + 2.0 * self.d1 * o.d1 + self.val * o.d2,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = _coerce(other)
        if _any(o.val == 0.0):
            raise ZeroDivisionError("jet division by zero")
        v = self.val / o.val
        d1 = (self.d1 - v * o.d1) / o.val
        d2 = (self.d2 - 2.0 * d1 * o.d1 - v * o.d2) / o.val
        return Jet2(v, d1, d2)

    def __rtruediv__(self, other):
        return _coerce(other) / self

    def __neg__(self):
        return Jet2(-self.val, -self.d1, -self.d2)

    def __pow__(self, exponent):
        return _pow(self, exponent)

    def __abs__(self):
        if _any(self.val == 0.0):
            raise DomainError("|x| is not differentiable at 0")
        s = np.sign(self.val) if _is_array(self.val) else math.copysign(1.0, self.val)
        return Jet2(s * self.val, s * self.d1, s * self.d2)

    def __repr__(self):
        return f"Jet2({self.val!r}, {self.d1!r}, {self.d2!r})"

    def is_finite(self) -> bool:
        return bool(
            np.all(np.isfinite(self.val))
            and np.all(np.isfinite(self.d1))
            and np.all(np.isfinite(self.d2))
        )


def _coerce(x) -> Jet2:
    if isinstance(x, Jet2):
        return x
    return Jet2.constant(x)


def _pow(u: Jet2, exponent) -> Jet2:
    """u ** c for a constant exponent c (a plain number, or a Jet2 whose
    derivative components vanish)."""
    if isinstance(exponent, Jet2):
        if _any(exponent.d1 != 0.0) or _any(exponent.d2 != 0.0):
            raise DomainError("exponent of ^ must not depend on theta")
        c = exponent.val
        if _is_array(c):
            if c.size == 0 or np.any(c != c.flat[0]):
                raise DomainError("exponent of ^ must be a single constant")
            c = float(c.flat[0])
        else:
            c = float(c)
    else:
        c = float(exponent)

    if c == round(c) and abs(c) < 2**31:
        n = int(round(c))
        if n == 0:
            return Jet2.constant(1.0) if not _is_array(u.val) else Jet2.constant(np.ones_like(u.val))
        if n == 1:
            return Jet2(u.val, u.d1, u.d2)
        if n < 0 and _any(u.val == 0.0):
            raise ZeroDivisionError("0 raised to a negative power")
        f = _npow(u.val, n)
        fp = n * _npow(u.val, n - 1)
        fpp = n * (n - 1) * _npow(u.val, n - 2)
        return Jet2(f, fp * u.d1, fpp * u.d1 * u.d1 + fp * u.d2)

    # non-integer exponent: real branch needs a strictly positive base
    if _any(u.val <= 0.0):
        raise DomainError(f"x^{c} requires x > 0")
    f = u.val**c
    fp = c * u.val ** (c - 1.0)
    fpp = c * (c - 1.0) * u.val ** (c - 2.0)
    return Jet2(f, fp * u.d1, fpp * u.d1 * u.d1 + fp * u.d2)


def _npow(base, n: int):
    # integer powers; negative bases are fine, 0**0 -> 1 by convention
    if _is_array(base):
        return base ** float(n)
    return base**n


# ---------------------------------------------------------------- elementary
def _unary(u, f_math, f_np, deriv):
    """Apply a smooth scalar function via  f' and f'' supplied by `deriv`."""
    j = _coerce(u)
    if _is_array(j.val):
        f = f_np(j.val)
    else:
        f = f_math(j.val)
    fp, fpp = deriv(j.val, f)
    return Jet2(f, fp * j.d1, fpp * j.d1 * j.d1 + fp * j.d2)


def sin(u):
    return _unary(u, math.sin, np.sin, lambda x, f: (_cos_of(x), -f))


def cos(u):
    return _unary(u, math.cos, np.cos, lambda x, f: (-_sin_of(x), -f))


def _sin_of(x):
    return np.sin(x) if _is_array(x) else math.sin(x)


def _cos_of(x):
    return np.cos(x) if _is_array(x) else math.cos(x)


def tan(u):
    j = _coerce(u)
    c = _cos_of(j.val)
    if _any(np.abs(c) < _TAN_POLE_TOL):
        raise DomainError("tan evaluated at a pole")
    t = np.tan(j.val) if _is_array(j.val) else math.tan(j.val)
    sec2 = 1.0 + t * t
    return Jet2(t, sec2 * j.d1, 2.0 * t * sec2 * j.d1 * j.d1 + sec2 * j.d2)


def sqrt(u):
    j = _coerce(u)
    if _any(j.val <= 0.0):
        raise DomainError("sqrt requires a positive argument")
    s = np.sqrt(j.val) if _is_array(j.val) else math.sqrt(j.val)
    fp = 0.5 / s
    fpp = -0.25 / (j.val * s)
    return Jet2(s, fp * j.d1, fpp * j.d1 * j.d1 + fp * j.d2)


def exp(u):
    j = _coerce(u)
    e = np.exp(j.val) if _is_array(j.val) else math.exp(j.val)
    return Jet2(e, e * j.d1, e * (j.d1 * j.d1 + j.d2))


def log(u):
    j = _coerce(u)
    if _any(j.val <= 0.0):
        raise DomainError("log requires a positive argument")
    f = np.log(j.val) if _is_array(j.val) else math.log(j.val)
    fp = 1.0 / j.val
    return Jet2(f, fp * j.d1, -fp * fp * j.d1 * j.d1 + fp * j.d2)
