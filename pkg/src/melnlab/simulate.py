"""Direct integration of the planar system and the Poincare return map.

Integration runs in Cartesian coordinates (the fields are polynomial there)
along the orientation in which the polar angle increases, so the computed
return map's Taylor coefficients in eps are exactly the Melnikov functions
of the polar-time formulation.  Switching events at y = x^n are localized on
the dense output and polished with one Newton step; the section is
S = {y = 0, x > 0}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .config import SystemConfig
from .errors import DomainError, EscapeError, EventDegeneracyError, NumericalError
from .geometry import switching_angles

__all__ = ["TrajectorySegment", "PoincareResult", "LimitCycle",
           "integrate_return", "extract_melnikov", "find_limit_cycles"]

RTOL = 1e-12
ATOL = 1e-14
MAX_STEP = 0.1
R_ESCAPE = (1e-4, 1e4)
EPS_MAX_DEFAULT = 1e-2
TANGENCY_FLOOR = 1e-10


@dataclass(frozen=True)
class TrajectorySegment:
    """One smooth leg of a crossing orbit."""

    region: int                    # +1 above the curve, -1 below
    t_span: tuple[float, float]
    start: tuple[float, float]
    end: tuple[float, float]
    exit_event: str                # 'switch' or 'section'
    exit_transversality: float     # d/dt of the event function at exit
    solution: object = field(repr=False, default=None)   # scipy dense output


@dataclass(frozen=True)
class PoincareResult:
    x0: float
    eps: float
    x_return: float
    crossing_times: tuple[float, ...]
    crossing_angles: tuple[float, ...]
    crossing_points: tuple[tuple[float, float], ...]
    segments: tuple[TrajectorySegment, ...] = field(repr=False, default=())
    error_estimate: float = 0.0

    @property
    def displacement(self) -> float:
        return self.x_return - self.x0


@dataclass(frozen=True)
class LimitCycle:
    x_star: float
    eps: float
    derivative: float              # return-map derivative at the fixed point
    residual: float
    iterations: int
    seed: float
    melnikov_zero: float | None = None
    order: int | None = None

    @property
    def stable(self) -> bool:
        return abs(self.derivative) < 1.0

    def to_dict(self) -> dict:
        return {
            "x_star": self.x_star, "eps": self.eps, "derivative": self.derivative,
            "residual": self.residual, "iterations": self.iterations,
            "seed": self.seed, "melnikov_zero": self.melnikov_zero,
            "order": self.order, "stable": self.stable,
        }


def _rhs(config: SystemConfig, region: int, eps: float):
    """Time-reversed field of the chosen region (polar angle increases)."""
    terms = []
    for i in range(1, config.k + 1):
        oc = config.order(i)
        (p0, p1, p2), (q0, q1, q2) = (oc.a, oc.b) if region > 0 else (oc.alpha, oc.beta)
        w = eps ** i
        terms.append((w * p0, w * p1, w * p2, w * q0, w * q1, w * q2))

    def rhs(t, s):
        x, y = s
        dx = y
        dy = -x
        for (c0, c1, c2, d0, d1, d2) in terms:
            dx += c0 + c1 * x + c2 * y
            dy += d0 + d1 * x + d2 * y
        return (-dx, -dy)

    return rhs


def _switch_event(n: int, direction: int):
    def ev(t, s):
        return s[1] - s[0] ** n
    ev.terminal = True
    ev.direction = direction
    return ev


def _section_event():
    def ev(t, s):
        return s[1]
    ev.terminal = True
    ev.direction = 1
    return ev


def _leg(config, region, eps, state, t0, event, label) -> TrajectorySegment:
    rhs = _rhs(config, region, eps)
    sol = solve_ivp(rhs, (t0, t0 + 4.0 * math.pi), state, method="DOP853",
                    rtol=RTOL, atol=ATOL, max_step=MAX_STEP, events=event,
                    dense_output=True)
    if sol.status != 1 or len(sol.t_events[0]) == 0:
        r_end = math.hypot(*sol.y[:, -1])
        if not (R_ESCAPE[0] <= r_end <= R_ESCAPE[1]):
            raise EscapeError(f"trajectory left the annulus during the {label} leg (r={r_end:.3e})")
        raise NumericalError(f"no terminating event on the {label} leg",
                             status=sol.status, t_final=float(sol.t[-1]))
    t_ev = float(sol.t_events[0][0])
    y_ev = np.array(sol.sol(t_ev))
    # one Newton polish on the event function along the flow
    g = (lambda s: s[1] - s[0] ** config.n) if label == "switch" else (lambda s: s[1])
    for _ in range(1):
        f = np.array(rhs(t_ev, y_ev))
        if label == "switch":
            grad = np.array([-config.n * y_ev[0] ** (config.n - 1), 1.0])
        else:
            grad = np.array([0.0, 1.0])
        gdot = float(grad @ f)
        if gdot != 0.0:
            t_ev -= g(y_ev) / gdot
            y_ev = np.array(sol.sol(t_ev))
    f = np.array(rhs(t_ev, y_ev))
    if label == "switch":
        grad = np.array([-config.n * y_ev[0] ** (config.n - 1), 1.0])
    else:
        grad = np.array([0.0, 1.0])
    trans = float(grad @ f)
    if abs(trans) < TANGENCY_FLOOR:
        raise EventDegeneracyError(
            f"event contact is tangential (|g'|={abs(trans):.2e} < {TANGENCY_FLOOR})")
    r_end = math.hypot(*y_ev)
    if not (R_ESCAPE[0] <= r_end <= R_ESCAPE[1]):
        raise EscapeError(f"trajectory left the annulus (r={r_end:.3e})")
    return TrajectorySegment(region=region, t_span=(t0, t_ev),
                             start=(float(state[0]), float(state[1])),
                             end=(float(y_ev[0]), float(y_ev[1])),
                             exit_event=label, exit_transversality=trans,
                             solution=sol.sol)


def integrate_return(x0: float, eps: float, config: SystemConfig, *,
                     eps_max: float = EPS_MAX_DEFAULT,
                     keep_solutions: bool = False) -> PoincareResult:
    """One full return of the section map through the two crossings.

    Legs run region '-' to the first switching contact, '+' to the second,
    then '-' back to the section, matching the sector pattern of y - x^n
    along circles around the origin.
    """
    if x0 <= 0.0:
        raise DomainError(f"section coordinate must be positive, got {x0}")
    if abs(eps) > eps_max:
        raise DomainError(f"|eps|={abs(eps)} exceeds eps_max={eps_max}")

    state = (x0, 0.0)
    seg1 = _leg(config, -1, eps, state, 0.0, _switch_event(config.n, +1), "switch")
    seg2 = _leg(config, +1, eps, seg1.end, seg1.t_span[1],
                _switch_event(config.n, -1), "switch")
    seg3 = _leg(config, -1, eps, seg2.end, seg2.t_span[1], _section_event(), "section")
    x_ret = seg3.end[0]
    if x_ret <= 0.0:
        raise NumericalError(f"return point has non-positive abscissa {x_ret}")

    segs = (seg1, seg2, seg3)
    angles = []
    for seg in segs[:2]:
        ang = math.atan2(seg.end[1], seg.end[0]) % (2.0 * math.pi)
        angles.append(ang)
    if not keep_solutions:
        segs = tuple(TrajectorySegment(region=s.region, t_span=s.t_span, start=s.start,
                                       end=s.end, exit_event=s.exit_event,
                                       exit_transversality=s.exit_transversality,
                                       solution=None) for s in segs)
    return PoincareResult(
        x0=x0, eps=eps, x_return=x_ret,
        crossing_times=(seg1.t_span[1], seg2.t_span[1]),
        crossing_angles=tuple(angles),
        crossing_points=tuple(s.end for s in segs[:2]),
        segments=segs,
        error_estimate=RTOL * max(1.0, x0) * 50.0,
    )


def displacement(x0: float, eps: float, config: SystemConfig, *, eps_max=EPS_MAX_DEFAULT) -> float:
    return integrate_return(x0, eps, config, eps_max=eps_max).displacement


_DEFAULT_BASE = {1: 1e-3, 2: 2e-3, 3: 6e-3, 4: 1.5e-2, 5: 2.5e-2, 6: 3.5e-2}
_DEFAULT_RUNGS = {1: 5, 2: 5, 3: 4, 4: 3, 5: 2, 6: 2}


@dataclass(frozen=True)
class MelnikovEstimate:
    value: float
    error_estimate: float
    order: int
    x0: float
    base_eps: float
    rungs: int
    flagged: bool

    def __float__(self):
        return self.value


def extract_melnikov(x0: float, i: int, config: SystemConfig, *,
                     base_eps: float | None = None, rungs: int | None = None,
                     ratio: float = 2.0, reject_rel: float = 1e-4) -> MelnikovEstimate:
    """i-th eps-Taylor coefficient of the displacement by ladder extrapolation.

    The displacement is sampled at +-base_eps/ratio^j; parity splitting
    isolates the even or odd part (halving the coefficients to determine) and
    a small Vandermonde solve in eps^2 yields the requested coefficient with
    a consistency error estimate (difference against the ladder with one rung
    dropped).  The estimate is flagged when it exceeds ``reject_rel`` times
    the coefficient scale.
    """
    if i < 1 or i > config.k:
        raise DomainError(f"order must be in 1..{config.k}, got {i}")
    base = _DEFAULT_BASE.get(i, 1e-3) if base_eps is None else float(base_eps)
    m = _DEFAULT_RUNGS.get(i, 4) if rungs is None else int(rungs)
    if m < 2:
        raise DomainError("need at least two ladder rungs")
    eps_ladder = base / ratio ** np.arange(m)
    dp = np.array([displacement(x0, +e, config, eps_max=base * 1.0001) for e in eps_ladder])
    dm = np.array([displacement(x0, -e, config, eps_max=base * 1.0001) for e in eps_ladder])
    parity = 1.0 if i % 2 == 0 else -1.0
    part = 0.5 * (dp + parity * dm)          # even part for even i, odd part for odd i
    g = part / eps_ladder ** i               # = M_i + M_{i+2} eps^2 + ...

    def solve(vals, eps_vals):
        zz = eps_vals ** 2
        ncoef = len(vals)
        V = np.vander(zz, ncoef, increasing=True)
        return np.linalg.solve(V, vals)[0]

    full = solve(g, eps_ladder)
    drop_small = solve(g[:-1], eps_ladder[:-1])
    drop_large = solve(g[1:], eps_ladder[1:])
    err = max(abs(full - drop_small), abs(full - drop_large))
    scale = max(1.0, abs(full))
    return MelnikovEstimate(value=float(full), error_estimate=float(err), order=i,
                            x0=x0, base_eps=base, rungs=m,
                            flagged=bool(err > reject_rel * scale))


def return_derivative(x0: float, eps: float, config: SystemConfig, *,
                      h: float | None = None, eps_max=EPS_MAX_DEFAULT) -> float:
    """Central-difference derivative of the return map at x0."""
    h = h if h is not None else max(1e-5 * max(1.0, x0), 10.0 * abs(eps) * 1e-2)
    fp = integrate_return(x0 + h, eps, config, eps_max=eps_max).x_return
    fm = integrate_return(x0 - h, eps, config, eps_max=eps_max).x_return
    return (fp - fm) / (2.0 * h)


def find_limit_cycles(eps: float, config: SystemConfig, seeds, *,
                      eps_max: float = EPS_MAX_DEFAULT, tol: float = 1e-10,
                      max_iter: int = 30, dedupe: float = 1e-6,
                      melnikov_zeros=None, order: int | None = None) -> list[LimitCycle]:
    """Damped Newton on the displacement from each seed; deduplicated.

    At eps = 0 every point is fixed (period annulus): the function reports no
    isolated cycles in that case.  Diverging seeds are skipped with a note in
    the returned list's ``diagnostics`` attribute.
    """
    seeds = [float(s) for s in seeds]
    results: list[LimitCycle] = []
    diagnostics: list[str] = []
    if eps == 0.0:
        lst = _CycleList([])
        lst.diagnostics = ["eps = 0: period annulus, every seed is a non-isolated fixed point"]
        return lst

    zeros = list(melnikov_zeros) if melnikov_zeros is not None else [None] * len(seeds)
    for seed, mzero in zip(seeds, zeros):
        x = float(seed)
        converged = False
        it = 0
        try:
            d = displacement(x, eps, config, eps_max=eps_max)
            for it in range(1, max_iter + 1):
                h = max(1e-6, 0.02 * max(1.0, x))
                dp = displacement(x + h, eps, config, eps_max=eps_max)
                dmn = displacement(x - h, eps, config, eps_max=eps_max)
                slope = (dp - dmn) / (2.0 * h)
                if slope == 0.0:
                    break
                step = -d / slope
                lam = 1.0
                while lam > 1.0 / 64.0:
                    x_new = x + lam * step
                    if x_new > 0.0:
                        d_new = displacement(x_new, eps, config, eps_max=eps_max)
                        if abs(d_new) < abs(d):
                            break
                    lam *= 0.5
                else:
                    break
                x, d = x_new, d_new
                if abs(d) <= tol:
                    converged = True
                    break
        except (EscapeError, NumericalError, EventDegeneracyError, DomainError) as exc:
            diagnostics.append(f"seed {seed}: {exc}")
            continue
        if not converged:
            diagnostics.append(f"seed {seed}: Newton did not reach |displacement| <= {tol}")
            continue
        deriv = return_derivative(x, eps, config, eps_max=eps_max)
        if any(abs(x - c.x_star) < dedupe for c in results):
            continue
        results.append(LimitCycle(x_star=x, eps=eps, derivative=deriv,
                                  residual=abs(d), iterations=it, seed=float(seed),
                                  melnikov_zero=mzero, order=order))
    results.sort(key=lambda c: c.x_star)
    lst = _CycleList(results)
    lst.diagnostics = diagnostics
    return lst


class _CycleList(list):
    """List of cycles carrying per-seed diagnostics."""

    diagnostics: list[str]


def crossing_angle_check(x0: float, config: SystemConfig) -> tuple[float, float]:
    """Crossing angles of the eps = 0 orbit, for geometry cross-validation."""
    res = integrate_return(x0, 0.0, config)
    return res.crossing_angles


def geometry_reference_angles(x0: float, n: int) -> tuple[float, float]:
    return switching_angles(x0, n)


def trajectory_rows(result: PoincareResult, samples_per_leg: int = 200):
    """(t, x, y, region) rows sampled from the dense output of a return orbit.

    Requires ``integrate_return(..., keep_solutions=True)``.
    """
    rows = []
    for seg in result.segments:
        if seg.solution is None:
            raise DomainError("trajectory dump needs keep_solutions=True")
        ts = np.linspace(seg.t_span[0], seg.t_span[1], samples_per_leg)
        vals = seg.solution(ts)
        for t, x, y in zip(ts, vals[0], vals[1]):
            rows.append((float(t), float(x), float(y), seg.region))
    return rows


def write_trajectory_csv(path, result: PoincareResult, samples_per_leg: int = 200):
    from .reports import write_csv

    return write_csv(path, ["t", "x", "y", "region"],
                     trajectory_rows(result, samples_per_leg))
