"""Truncated Taylor series (jets) with generic coefficient arithmetic.

A :class:`Jet` stores the Taylor coefficients ``c[m] = f^(m)(x0)/m!`` of a
function about a base point, up to a fixed truncation order.  All arithmetic
is exact truncated-series algebra.  Coefficients may be floats, numpy arrays
(for vectorized evaluation over a grid), or nested :class:`Jet` instances
(for mixed partial expansions, e.g. a t-jet whose coefficients are r-jets).
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

__all__ = [
    "Jet",
    "jet_sin", "jet_cos", "jet_atan", "jet_exp", "jet_log", "jet_sqrt",
]


def _zero_like(c):
    if isinstance(c, Jet):
        return c.zero_like()
    if isinstance(c, np.ndarray):
        return np.zeros_like(c)
    return 0.0


def _magnitude(c) -> float:
    """Scalar magnitude of a coefficient, recursing through nesting."""
    if isinstance(c, Jet):
        return max(_magnitude(cm) for cm in c.c)
    if isinstance(c, np.ndarray):
        return float(np.max(np.abs(c))) if c.size else 0.0
    return abs(float(c))


def _is_mp(c) -> bool:
    return type(c).__module__.startswith("mpmath")


def _sin(c):
    if isinstance(c, Jet):
        return jet_sin(c)
    if isinstance(c, np.ndarray):
        return np.sin(c)
    if _is_mp(c):
        import mpmath
        return mpmath.sin(c)
    return math.sin(c)


def _cos(c):
    if isinstance(c, Jet):
        return jet_cos(c)
    if isinstance(c, np.ndarray):
        return np.cos(c)
    if _is_mp(c):
        import mpmath
        return mpmath.cos(c)
    return math.cos(c)


def _atan(c):
    if isinstance(c, Jet):
        return jet_atan(c)
    if isinstance(c, np.ndarray):
        return np.arctan(c)
    if _is_mp(c):
        import mpmath
        return mpmath.atan(c)
    return math.atan(c)


def _exp(c):
    if isinstance(c, Jet):
        return jet_exp(c)
    if isinstance(c, np.ndarray):
        return np.exp(c)
    if _is_mp(c):
        import mpmath
        return mpmath.exp(c)
    return math.exp(c)


def _log(c):
    if isinstance(c, Jet):
        return jet_log(c)
    if isinstance(c, np.ndarray):
        return np.log(c)
    if _is_mp(c):
        import mpmath
        return mpmath.log(c)
    return math.log(c)


def _sqrt(c):
    if isinstance(c, Jet):
        return jet_sqrt(c)
    if isinstance(c, np.ndarray):
        return np.sqrt(c)
    if _is_mp(c):
        import mpmath
        return mpmath.sqrt(c)
    return math.sqrt(c)


class Jet:
    """Truncated Taylor expansion ``sum_m c[m] * (v - v0)^m``.

    Parameters
    ----------
    coeffs : sequence
        Taylor coefficients (derivatives divided by factorials), lowest first.
    order : int, optional
        Truncation order; ``coeffs`` is padded with zeros or cut to fit.
    var : str, optional
        Variable tag ('t', 'x', 'r' or 'eps'); informational only.
    """

    __slots__ = ("c", "var")
    __array_priority__ = 200.0  # keep ndarray * Jet from vectorizing

    def __init__(self, coeffs: Sequence, order: int | None = None, var: str | None = None):
        c = list(coeffs)
        if not c:
            raise ValueError("jet needs at least one coefficient")
        if order is not None:
            if order < 0:
                raise ValueError("jet order must be >= 0")
            pad = _zero_like(c[0])
            c = c[: order + 1] + [pad] * (order + 1 - len(c))
        self.c = c
        self.var = var

    # -- constructors -------------------------------------------------------

    @staticmethod
    def variable(value, order: int, var: str | None = None) -> "Jet":
        """Jet of the identity map at ``value`` (value, 1, 0, ...)."""
        c = [value, value * 0.0 + 1.0 if isinstance(value, np.ndarray) else 1.0]
        return Jet(c, order=order, var=var)

    @staticmethod
    def constant(value, order: int, var: str | None = None) -> "Jet":
        return Jet([value], order=order, var=var)

    def zero_like(self) -> "Jet":
        return Jet([_zero_like(self.c[0])], order=self.order, var=self.var)

    # -- basic queries -------------------------------------------------------

    @property
    def order(self) -> int:
        return len(self.c) - 1

    def __len__(self):
        return len(self.c)

    def __getitem__(self, m):
        return self.c[m]

    def coefficient(self, m: int):
        """m-th Taylor coefficient (zero beyond the truncation order)."""
        return self.c[m] if m < len(self.c) else _zero_like(self.c[0])

    def derivative(self, m: int):
        """m-th derivative value at the base point, ``m! * c[m]``."""
        return self.coefficient(m) * math.factorial(m)

    @property
    def value(self):
        return self.c[0]

    def truncate(self, order: int) -> "Jet":
        return Jet(self.c, order=order, var=self.var)

    def __repr__(self):
        return f"Jet({self.c!r}, var={self.var!r})"

    # -- ring operations -----------------------------------------------------

    def _coerce_order(self, other: "Jet") -> int:
        return min(self.order, other.order)

    def __add__(self, other):
        if isinstance(other, Jet):
            n = self._coerce_order(other)
            return Jet([self.c[m] + other.c[m] for m in range(n + 1)], var=self.var)
        c = list(self.c)
        c[0] = c[0] + other
        return Jet(c, var=self.var)

    __radd__ = __add__

    def __neg__(self):
        return Jet([-cm for cm in self.c], var=self.var)

    def __sub__(self, other):
        return self + (-other if isinstance(other, Jet) else -1.0 * other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Jet):
            n = self._coerce_order(other)
            out = []
            for m in range(n + 1):
                s = self.c[0] * other.c[m]
                for j in range(1, m + 1):
                    s = s + self.c[j] * other.c[m - j]
                out.append(s)
            return Jet(out, var=self.var)
        return Jet([cm * other for cm in self.c], var=self.var)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Jet):
            return Jet([cm / other for cm in self.c], var=self.var)
        n = self._coerce_order(other)
        g0 = other.c[0]
        out = []
        for m in range(n + 1):
            s = self.c[m]
            for j in range(1, m + 1):
                s = s - other.c[j] * out[m - j]
            out.append(s / g0)
        return Jet(out, var=self.var)

    def __rtruediv__(self, other):
        return Jet.constant(other, self.order, var=self.var) / self

    def __pow__(self, p):
        if isinstance(p, int):
            if p < 0:
                return 1.0 / (self ** (-p))
            out = Jet.constant(_zero_like(self.c[0]) + 1.0, self.order, var=self.var)
            base = self
            while p:
                if p & 1:
                    out = out * base
                base = base * base
                p >>= 1
            return out
        return self.power(float(p))

    # -- calculus ------------------------------------------------------------

    def deriv(self) -> "Jet":
        """Jet of the derivative (one order lower)."""
        if self.order == 0:
            return Jet([_zero_like(self.c[0])], var=self.var)
        return Jet([(m + 1) * self.c[m + 1] for m in range(self.order)], var=self.var)

    def integ(self, const=0.0) -> "Jet":
        """Jet of the antiderivative (one order higher)."""
        return Jet([const] + [self.c[m] / (m + 1) for m in range(len(self.c))], var=self.var)

    def compose(self, inner: "Jet") -> "Jet":
        """Series composition self(inner); the inner jet must have zero value."""
        if _magnitude(inner.c[0]) != 0.0:
            raise ValueError("composition requires inner jet with zero constant term")
        n = inner.order
        out = Jet.constant(self.c[-1], n)
        for m in range(len(self.c) - 2, -1, -1):
            out = out * inner + self.c[m]
        return out

    def __call__(self, dv):
        """Evaluate the polynomial at offset ``dv`` from the base point."""
        acc = self.c[-1]
        for m in range(len(self.c) - 2, -1, -1):
            acc = acc * dv + self.c[m]
        return acc

    # -- elementary functions (u = self) --------------------------------------

    def _lift(self, f0, dfda):
        """Solve f' = dfda(f) * u' coefficientwise given f(u0) = f0."""
        n = self.order
        out = [f0]
        for m in range(1, n + 1):
            # m*f_m = sum_{j=1..m} j*u_j * g_{m-j}, g = dfda evaluated lazily
            s = None
            for j in range(1, m + 1):
                term = (j * self.c[j]) * dfda[m - j]
                s = term if s is None else s + term
            out.append(s / m)
        return out

    def power(self, alpha: float) -> "Jet":
        """Real power u**alpha (positive leading coefficient required)."""
        u0 = self.c[0]
        f0 = _exp(alpha * _log(u0))
        n = self.order
        out = [f0]
        for m in range(1, n + 1):
            s = None
            for j in range(1, m + 1):
                term = ((alpha + 1) * j - m) * self.c[j] * out[m - j]
                s = term if s is None else s + term
            out.append(s / (m * u0))
        return Jet(out, var=self.var)


def jet_sin(u: Jet) -> Jet:
    s, c = _sincos(u)
    return s


def jet_cos(u: Jet) -> Jet:
    s, c = _sincos(u)
    return c


def _sincos(u: Jet):
    n = u.order
    s = [_sin(u.c[0])]
    c = [_cos(u.c[0])]
    for m in range(1, n + 1):
        ss = None
        cc = None
        for j in range(1, m + 1):
            ju = j * u.c[j]
            ts = ju * c[m - j]
            tc = ju * s[m - j]
            ss = ts if ss is None else ss + ts
            cc = tc if cc is None else cc + tc
        s.append(ss / m)
        c.append(-cc / m)
    return Jet(s, var=u.var), Jet(c, var=u.var)


def jet_atan(u: Jet) -> Jet:
    n = u.order
    if n == 0:
        return Jet([_atan(u.c[0])], var=u.var)
    w = u.deriv() / (1.0 + u * u).truncate(n - 1)
    return w.integ(const=_atan(u.c[0])).truncate(n)


def jet_exp(u: Jet) -> Jet:
    n = u.order
    out = [_exp(u.c[0])]
    for m in range(1, n + 1):
        s = None
        for j in range(1, m + 1):
            t = (j * u.c[j]) * out[m - j]
            s = t if s is None else s + t
        out.append(s / m)
    return Jet(out, var=u.var)


def jet_log(u: Jet) -> Jet:
    n = u.order
    if n == 0:
        return Jet([_log(u.c[0])], var=u.var)
    w = u.deriv() / u.truncate(n - 1)
    return w.integ(const=_log(u.c[0])).truncate(n)


def jet_sqrt(u: Jet) -> Jet:
    return u.power(0.5)
