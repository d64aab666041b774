"""Polar standard form of the perturbed piecewise-linear center.

With x = r cos(theta), y = r sin(theta) and theta taken as the new time,
the system becomes dr/dtheta = sum_i eps^i F_i(r, theta) on each side of the
switching set.  The F_i are obtained from the radial/angular components
(A_i, B_i) by truncated power-series division of (sum eps^i A_i) by
(-1 + sum eps^i B_i); only F_1 has a hand-written closed form, which the
division reproduces term by term:

    F_i = -A_i + sum_{m<i} F_m * B_{i-m}.

All evaluators accept floats, numpy arrays, or :class:`Jet` objects for the
radius and angle arguments, so the same code path yields values, r-derivative
jets, and t-derivative jets.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import SystemConfig
from .errors import DomainError
from .geometry import SwitchingGeometry
from .series import Jet, jet_cos, jet_sin

__all__ = ["PolarField", "build_polar_field", "cartesian_field"]


def _sin(t):
    return jet_sin(t) if isinstance(t, Jet) else np.sin(t)


def _cos(t):
    return jet_cos(t) if isinstance(t, Jet) else np.cos(t)


@dataclass(frozen=True)
class PolarField:
    """Evaluators of the standard-form right-hand sides F_i^(+/-)(r, theta)."""

    config: SystemConfig
    geometry: SwitchingGeometry

    @property
    def k(self) -> int:
        return self.config.k

    def _side(self, sign: int, i: int):
        oc = self.config.order(i)
        if sign > 0:
            return oc.a, oc.b
        return oc.alpha, oc.beta

    def radial_component(self, i: int, sign: int, r, theta):
        """A_i(r, theta) on the given side (+1 above the curve, -1 below)."""
        (p0, p1, p2), (q0, q1, q2) = self._side(sign, i)
        s, c = _sin(theta), _cos(theta)
        return c * (p0 + r * (p2 + q1) * s) + p1 * r * c * c + s * (q0 + q2 * r * s)

    def angular_component(self, i: int, sign: int, r, theta):
        """B_i(r, theta) on the given side; carries the 1/r factor."""
        (p0, p1, p2), (q0, q1, q2) = self._side(sign, i)
        s, c = _sin(theta), _cos(theta)
        num = -s * (p0 + p2 * r * s) + c * (r * (q2 - p1) * s + q0) + q1 * r * c * c
        return num / r

    def f_all(self, sign: int, r, theta) -> list:
        """[F_1, ..., F_k] at (r, theta) by truncated series division."""
        A = [self.radial_component(i, sign, r, theta) for i in range(1, self.k + 1)]
        B = [self.angular_component(i, sign, r, theta) for i in range(1, self.k + 1)]
        F: list = []
        for i in range(1, self.k + 1):
            acc = -A[i - 1]
            for m in range(1, i):
                acc = acc + F[m - 1] * B[i - m - 1]
            F.append(acc)
        return F

    def f(self, i: int, sign: int, r, theta):
        """F_i(r, theta) on the given side."""
        if not 1 <= i <= self.k:
            raise DomainError(f"order {i} outside 1..{self.k}")
        return self.f_all(sign, r, theta)[i - 1]

    def f_sector(self, i: int, j: int, r, theta):
        """F_i^j: order-i field on sector j of the switching geometry."""
        return self.f(i, self.geometry.sector_sign(j), r, theta)

    def f_r_jets(self, sign: int, r: float, theta, order: int) -> list[Jet]:
        """[F_1, ..., F_k] as jets in r (coefficients follow theta's type)."""
        rj = Jet.variable(float(r), order, var="r")
        return self.f_all(sign, rj, theta)

    def f_t_jets(self, sign: int, r: float, t0: float, t_order: int) -> list[Jet]:
        """[F_1, ..., F_k] as jets in t at t0 for fixed radius."""
        tj = Jet.variable(float(t0), t_order, var="t")
        return self.f_all(sign, float(r), tj)

    def f_nested_jets(self, sign: int, r: float, t0: float, t_order: int,
                      r_order: int) -> list[Jet]:
        """[F_1, ..., F_k] as r-jets whose coefficients are t-jets.

        Coefficient L of entry i, times L!, is the t-jet of the L-th state
        derivative of F_i at (r, t0).
        """
        tj = Jet.variable(float(t0), t_order, var="t")
        rj = Jet([Jet.constant(float(r), t_order, var="t"),
                  Jet.constant(1.0, t_order, var="t")], order=r_order, var="r")
        th = Jet.constant(tj, r_order, var="r")
        return self.f_all(sign, rj, th)


def build_polar_field(config: SystemConfig) -> PolarField:
    """Attach the switching geometry and return the standard-form field."""
    return PolarField(config=config, geometry=SwitchingGeometry(n=config.n))


def cartesian_field(config: SystemConfig, x: float, y: float, eps: float):
    """Right-hand side of the planar system at (x, y) off the switching curve.

    Raises :class:`DomainError` on the curve itself; event logic owns that set.
    """
    h = y - x ** config.n
    if h == 0.0:
        raise DomainError("point lies on the switching curve; use event logic")
    dx = y
    dy = -x
    for i in range(1, config.k + 1):
        oc = config.order(i)
        if h > 0.0:
            (p0, p1, p2), (q0, q1, q2) = oc.a, oc.b
        else:
            (p0, p1, p2), (q0, q1, q2) = oc.alpha, oc.beta
        w = eps ** i
        dx += w * (p0 + p1 * x + p2 * y)
        dy += w * (q0 + q1 * x + q2 * y)
    return dx, dy
