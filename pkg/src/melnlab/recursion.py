"""Order-by-order Melnikov functions via the crossing-time recursion.

For scalar state (the polar radius) with N = 2 interior switching angles and
period T = 2*pi, the i-th Melnikov function is M_i(x) = z_i^N(T, x)/i!, where
the z_i^j are built sector by sector:

* the integral term accumulates F_i plus the chain-rule sums over partition
  tuples, integrated with an adaptive-degree Chebyshev interpolant per sector
  (exact antiderivative of the fitted series, target 1e-13 relative);
* crossing a switching angle adds the jump correction
  i! * sum_p (1/p!) d^p/deps^p [delta_{i-p}^j(A_j^p(x, eps), x)] at eps = 0,
  evaluated by composing the t-jet of delta at the switching angle with the
  eps-polynomial A_j^p built from the crossing-time coefficients alpha_j^q.

All t- and state-derivatives come from jet arithmetic; nothing is finite
differenced on the main path.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
from numpy.polynomial.chebyshev import Chebyshev, chebint
from scipy.fft import dct

from .combinatorics import partitions
from .config import SystemConfig
from .errors import DomainError, NumericalError, SequencingError
from .geometry import TWO_PI
from .polar import PolarField, build_polar_field
from .series import Jet

__all__ = ["ZTable", "melnikov", "melnikov_all", "z1", "alpha_q", "w_ij", "z_recursive"]

CHEB_START_DEGREE = 64
CHEB_MAX_DEGREE = 1024
CHEB_REL_TOL = 5e-14


def _cheb_fit(fun, a: float, b: float, start_degree: int = CHEB_START_DEGREE,
              max_degree: int = CHEB_MAX_DEGREE, rel_tol: float = CHEB_REL_TOL) -> Chebyshev:
    """Adaptive Chebyshev interpolation of ``fun`` on [a, b].

    Doubles the degree until the last two coefficients drop below
    ``rel_tol`` times the coefficient scale; raises NumericalError with
    interval diagnostics if the cap is reached without decay.
    """
    mid, half = 0.5 * (b + a), 0.5 * (b - a)
    n = start_degree
    while True:
        theta = np.pi * (2.0 * np.arange(n) + 1.0) / (2.0 * n)
        nodes = mid + half * np.cos(theta)
        vals = np.asarray(fun(nodes), dtype=float)
        coef = dct(vals, type=2) / n
        coef[0] *= 0.5
        scale = np.max(np.abs(coef))
        if scale == 0.0:
            return Chebyshev(np.zeros(2), domain=(a, b))
        tail = np.max(np.abs(coef[-2:]))
        if tail <= rel_tol * scale:
            keep = max(2, int(np.max(np.nonzero(np.abs(coef) > 1e-16 * scale)[0])) + 1)
            return Chebyshev(coef[:keep], domain=(a, b))
        if n >= max_degree:
            raise NumericalError(
                "sector integrand did not converge under Chebyshev refinement",
                interval=(a, b), degree=n, tail=float(tail), scale=float(scale))
        n *= 2


def _cheb_antiderivative(cheb: Chebyshev, lower: float) -> Chebyshev:
    """Antiderivative of ``cheb`` vanishing at ``lower`` (domain-aware)."""
    a, b = cheb.domain
    ci = chebint(cheb.coef) * 0.5 * (b - a)
    prim = Chebyshev(ci, domain=(a, b))
    return prim - prim(lower)


class ZTable:
    """Per-base-point state of the Melnikov recursion.

    Holds the sector-wise Chebyshev representations of z_i^j, the switching
    angles with their radius jets, crossing-time coefficients alpha_j^q, the
    w_i^j expansion coefficients, and the resulting Melnikov values.

    Parameters
    ----------
    field : PolarField
    x : float
        Section coordinate (radius of the unperturbed circle), x > 0.
    order : int
        Highest Melnikov order to build (<= field.k).
    include_jumps : bool
        Debug switch; ``False`` drops the delta-composition corrections
        (used only by guard tests, never in production).
    """

    def __init__(self, field: PolarField, x: float, order: int | None = None, *,
                 include_jumps: bool = True, start_degree: int = CHEB_START_DEGREE):
        self.field = field
        self.geometry = field.geometry
        self.x = float(x)
        self.order = field.k if order is None else int(order)
        if not 1 <= self.order <= field.k:
            raise DomainError(f"order must be in 1..{field.k}, got {self.order}")
        self.include_jumps = include_jumps
        self.start_degree = start_degree

        self.bounds = self.geometry.boundaries(self.x)
        self.T = TWO_PI
        self.N = self.geometry.N_SWITCHES
        self._theta_jets = {j: self.geometry.theta_jet(j, self.x, self.order)
                            for j in (1, 2)}

        self._cheb: dict[tuple[int, int], Chebyshev] = {}
        self._z_start: dict[tuple[int, int], float] = {}
        self._z_end: dict[tuple[int, int], float] = {}
        self._jump: dict[tuple[int, int], float] = {}
        self._w: dict[tuple[int, int], float] = {}
        self._alpha: dict[tuple[int, int], float] = {}
        self._tjets: dict[tuple[int, int, str, int], Jet] = {}
        self._nested: dict[tuple[int, str], list[Jet]] = {}
        self._melnikov: list[float] = []

        self._build()

    # -- public accessors ----------------------------------------------------

    def melnikov(self, i: int) -> float:
        """M_i(x) = z_i^N(T, x)/i!."""
        self._require(i)
        return self._melnikov[i - 1]

    def z(self, i: int, j: int, t: float) -> float:
        """z_i^j(t, x) for t inside sector j (endpoints included)."""
        self._require(i)
        self._check_sector(j)
        a, b = self.bounds[j], self.bounds[j + 1]
        if not (a - 1e-12 <= t <= b + 1e-12):
            raise DomainError(f"t={t} outside sector {j} = [{a}, {b}]")
        return float(self._cheb[(i, j)](min(max(t, a), b)))

    def w(self, i: int, j: int) -> float:
        """Expansion coefficient w_i^j of the perturbed crossing state."""
        self._require(i)
        self._check_switch(j)
        return self._w_ij(i, j)

    def alpha(self, q: int, j: int) -> float:
        """Crossing-time coefficient alpha_j^q (q-th eps-derivative at 0)."""
        if q < 1 or q > self.order - 1:
            raise SequencingError(
                f"alpha_j^q needs 1 <= q <= built order - 1 = {self.order - 1}, got q={q}")
        self._check_switch(j)
        return self._alpha_q(q, j)

    def jump(self, i: int, j: int) -> float:
        """Total jump correction added to z_i^j at the j-th switching angle."""
        self._require(i)
        self._check_switch(j)
        return self._jump.get((i, j), 0.0)

    def theta(self, j: int) -> float:
        return self.bounds[j]

    # -- internals -------------------------------------------------------------

    def _require(self, i: int) -> None:
        if not 1 <= i <= self.order:
            raise SequencingError(f"order {i} not built (table holds 1..{self.order})")

    def _check_sector(self, j: int) -> None:
        if j not in (0, 1, 2):
            raise DomainError(f"sector index must be 0, 1 or 2, got {j}")

    def _check_switch(self, j: int) -> None:
        if j not in (1, 2):
            raise DomainError(f"switching index must be 1 or 2, got {j}")

    def _build(self) -> None:
        for i in range(1, self.order + 1):
            for j in range(3):
                if j == 0:
                    left = 0.0
                else:
                    jump = self._jump_value(i, j) if (i >= 2 and self.include_jumps) else 0.0
                    self._jump[(i, j)] = jump
                    left = self._z_end[(i, j - 1)] + jump
                self._z_start[(i, j)] = left
                integrand = self._integrand(i, j)
                cheb = _cheb_fit(integrand, self.bounds[j], self.bounds[j + 1],
                                 start_degree=self.start_degree)
                prim = _cheb_antiderivative(cheb, self.bounds[j])
                self._cheb[(i, j)] = math.factorial(i) * prim + left
                self._z_end[(i, j)] = float(self._cheb[(i, j)](self.bounds[j + 1]))
            self._melnikov.append(self._z_end[(i, 2)] / math.factorial(i))

    def _integrand(self, i: int, j: int):
        sign = self.geometry.sector_sign(j)

        def K(tarr):
            rjets = self.field.f_r_jets(sign, self.x, tarr, i - 1)
            acc = np.asarray(rjets[i - 1].c[0], dtype=float).copy()
            for l in range(1, i):
                fm = rjets[i - l - 1]
                for b, lb, wgt in partitions(l):
                    prod = None
                    for m_idx, bm in enumerate(b, start=1):
                        if bm == 0:
                            continue
                        zm = self._cheb[(m_idx, j)](tarr) ** bm
                        prod = zm if prod is None else prod * zm
                    dF = fm.coefficient(lb) * math.factorial(lb)
                    acc += wgt * dF * prod
            return acc

        return K

    # t-jets ------------------------------------------------------------------

    def _endpoint(self, j: int, side: str) -> float:
        return self.bounds[j] if side == "L" else self.bounds[j + 1]

    def _nested_jets(self, j: int, side: str) -> list[Jet]:
        key = (j, side)
        if key not in self._nested:
            sign = self.geometry.sector_sign(j)
            t0 = self._endpoint(j, side)
            self._nested[key] = self.field.f_nested_jets(
                sign, self.x, t0, t_order=self.order, r_order=max(self.order - 1, 0))
        return self._nested[key]

    def _tjet_K(self, i: int, j: int, side: str, order: int) -> Jet:
        """t-jet of the integrand K_i^j at a sector endpoint."""
        nested = self._nested_jets(j, side)
        acc = nested[i - 1].coefficient(0).truncate(order)
        for l in range(1, i):
            fm = nested[i - l - 1]
            for b, lb, wgt in partitions(l):
                prod = None
                for m_idx, bm in enumerate(b, start=1):
                    if bm == 0:
                        continue
                    zj = self._tjet_z(m_idx, j, side, order) ** bm
                    prod = zj if prod is None else prod * zj
                dF = fm.coefficient(lb) * math.factorial(lb)
                acc = acc + wgt * dF.truncate(order) * prod
        return acc

    def _tjet_z(self, i: int, j: int, side: str, order: int) -> Jet:
        """t-jet of z_i^j at a sector endpoint, order >= 0."""
        key = (i, j, side, order)
        if key in self._tjets:
            return self._tjets[key]
        value = self._z_start[(i, j)] if side == "L" else self._z_end[(i, j)]
        if order == 0:
            jet = Jet([value], var="t")
        else:
            kjet = self._tjet_K(i, j, side, order - 1)
            fac = math.factorial(i)
            coeffs = [value] + [fac * kjet.coefficient(p - 1) / p for p in range(1, order + 1)]
            jet = Jet(coeffs, var="t")
        self._tjets[key] = jet
        return jet

    def _tjet_delta(self, m: int, j: int, order: int) -> Jet:
        """t-jet of delta_m^j = (z_m^{j-1} - z_m^j)/m! at the j-th angle."""
        upper = self._tjet_z(m, j - 1, "R", order)
        lower = self._tjet_z(m, j, "L", order)
        return (upper - lower) / math.factorial(m)

    # crossing-time machinery ---------------------------------------------------

    def _w_ij(self, i: int, j: int) -> float:
        key = (i, j)
        if key in self._w:
            return self._w[key]
        theta_j = self.bounds[j]
        val = self._z_end[(i, j - 1)] / math.factorial(i)
        for a in range(1, i):
            pref = 1.0 / math.factorial(i - a)
            zjet = self._tjet_z(i - a, j - 1, "R", a)
            for b, lb, wgt in partitions(a):
                dt = zjet.derivative(lb)
                prod = 1.0
                for m_idx, bm in enumerate(b, start=1):
                    if bm:
                        prod *= self._alpha_q(m_idx, j) ** bm
                val += pref * wgt * dt * prod
        self._w[key] = val
        return val

    def _alpha_q(self, q: int, j: int) -> float:
        key = (q, j)
        if key in self._alpha:
            return self._alpha[key]
        from .combinatorics import compositions

        theta_jet = self._theta_jets[j]
        val = 0.0
        for l in range(1, q + 1):
            dl = theta_jet.derivative(l)
            if dl == 0.0:
                continue
            ssum = 0.0
            for u in compositions(q, l):
                prod = 1.0
                for ur in u:
                    prod *= self._w_ij(ur, j)
                ssum += prod
            val += math.factorial(q) / math.factorial(l) * dl * ssum
        self._alpha[key] = val
        return val

    def _jump_value(self, i: int, j: int) -> float:
        """i! * sum_p (1/p!) d^p/deps^p [delta_{i-p}^j(A_j^p(x,eps), x)]|_0."""
        total = 0.0
        for p in range(1, i):
            djet = self._tjet_delta(i - p, j, p)
            inner = Jet([0.0] + [self._alpha_q(q, j) / math.factorial(q)
                                 for q in range(1, p + 1)], order=p, var="eps")
            comp = djet.compose(inner)
            total += comp.coefficient(p)
        return math.factorial(i) * total


@lru_cache(maxsize=512)
def _ztable_cached(config: SystemConfig, x: float, order: int) -> ZTable:
    return ZTable(build_polar_field(config), x, order)


def ztable(config: SystemConfig, x: float, order: int | None = None) -> ZTable:
    """Build (or fetch from cache) the recursion table at base point x."""
    return _ztable_cached(config, float(x), config.k if order is None else order)


def melnikov(config: SystemConfig, i: int, x: float) -> float:
    """Melnikov function of order i at section coordinate x."""
    if x <= 0.0:
        raise DomainError(f"section coordinate must be positive, got {x}")
    return ztable(config, x, max(i, 1)).melnikov(i)


def melnikov_all(config: SystemConfig, x: float, upto: int | None = None) -> list[float]:
    """[M_1(x), ..., M_upto(x)] sharing one recursion table."""
    upto = config.k if upto is None else upto
    table = ztable(config, x, upto)
    return [table.melnikov(i) for i in range(1, upto + 1)]


def z1(config: SystemConfig, j: int, t: float, x: float) -> float:
    """First-order z on sector j (thin wrapper over the table)."""
    return ztable(config, x, 1).z(1, j, t)


def alpha_q(j: int, q: int, x: float, table: ZTable) -> float:
    """Crossing-time coefficient alpha_j^q from a built table."""
    if abs(table.x - x) > 1e-12:
        raise SequencingError("table was built at a different base point")
    return table.alpha(q, j)


def w_ij(i: int, j: int, x: float, table: ZTable) -> float:
    """Coefficient w_i^j from a built table."""
    if abs(table.x - x) > 1e-12:
        raise SequencingError("table was built at a different base point")
    return table.w(i, j)


def z_recursive(config: SystemConfig, i: int, j: int, t: float, x: float) -> float:
    """z_i^j(t, x) for i >= 2 (builds the table up to order i)."""
    if i < 2:
        raise DomainError("z_recursive serves orders >= 2; use z1 for order 1")
    return ztable(config, x, i).z(i, j, t)
