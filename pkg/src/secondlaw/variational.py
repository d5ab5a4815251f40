"""
Lost-work action and its minimization over parametrized designs.

The Lagrangian is the lost work, so the action over a process lifetime is
the lifetime integral of lost power.  Minimization uses a bounded
Nelder-Mead simplex with fixed initialization (box center, initial edge
0.25 * range per axis) so repeated runs return identical results.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Sequence

import numpy as np

from .balance import effective_power, entropy_generation_rate, integrate_over_lifetime, max_power, check_timeline
from .model import (
    STANDARD,
    Accumulation,
    AmbientReference,
    PhysicalConstants,
    ProcessTimeline,
    SecondLawError,
    Stream,
    SystemSnapshot,
)

INITIAL_SCALE = 0.25
FD_STEP = 1e-4


class Viewpoint(str, Enum):
    SYSTEM = "system"  # lost work evaluated inside the system: minimum
    ENVIRONMENT = "environment"  # evaluated in the environment: maximum


class Objective(str, Enum):
    LOST_WORK = "lost_work"  # W_lambda from the exergy balance
    ENTROPY_GENERATION = "entropy_generation"  # T_a * S_g from the entropy balance


@dataclass(frozen=True)
class Parameter:
    name: str
    lower: float
    upper: float

    @property
    def span(self) -> float:
        return self.upper - self.lower


@dataclass(frozen=True)
class DesignSpace:
    params: tuple[Parameter, ...]
    builder: Callable[[np.ndarray], ProcessTimeline]
    constants: PhysicalConstants = STANDARD

    def __post_init__(self):
        object.__setattr__(self, "params", tuple(self.params))
        if not 1 <= len(self.params) <= 4:
            raise ValueError("a design space has 1 to 4 parameters")
        for p in self.params:
            if not (math.isfinite(p.lower) and math.isfinite(p.upper) and p.lower < p.upper):
                raise ValueError(f"bad bounds for {p.name!r}: [{p.lower}, {p.upper}]")

    @property
    def lower(self) -> np.ndarray:
        return np.array([p.lower for p in self.params])

    @property
    def upper(self) -> np.ndarray:
        return np.array([p.upper for p in self.params])

    @property
    def span(self) -> np.ndarray:
        return self.upper - self.lower

    @property
    def center(self) -> np.ndarray:
        return 0.5 * (self.lower + self.upper)

    def clip(self, x) -> np.ndarray:
        return np.clip(x, self.lower, self.upper)


@dataclass
class ExtremumResult:
    params_star: np.ndarray
    W_lambda_star: float
    stationarity: float
    evaluations: int
    converged: bool
    failures: list[tuple[tuple[float, ...], str]] = field(default_factory=list)

    def as_dict(self, names: Sequence[str]) -> dict:
        return dict(zip(names, (float(x) for x in self.params_star)))


def action(tl: ProcessTimeline, constants: PhysicalConstants = STANDARD) -> float:
    """Lifetime integral of lost power, in J."""
    check_timeline(tl)
    return integrate_over_lifetime(tl, lambda snap: max_power(snap, constants) - effective_power(snap, constants))


def entropy_action(tl: ProcessTimeline) -> float:
    """``T_a * S_g`` in J; equals :func:`action` whenever effective power is computed."""
    T_a = check_timeline(tl)
    return T_a * integrate_over_lifetime(tl, entropy_generation_rate)


def _objective(ds: DesignSpace, objective: Objective) -> Callable[[np.ndarray], float]:
    if objective is Objective.LOST_WORK:
        return lambda x: action(ds.builder(x), ds.constants)
    return lambda x: entropy_action(ds.builder(x))


def stationarity_check(
    ds: DesignSpace,
    params,
    objective: Objective | str = Objective.LOST_WORK,
    step: float = FD_STEP,
) -> float:
    """Largest absolute central-difference partial derivative of the action at ``params``.

    The step along axis i is ``step * range_i``; ``params`` must sit at
    least two steps inside every bound.
    """
    x = np.asarray(params, dtype=float)
    f = _objective(ds, Objective(objective))
    h = step * ds.span
    if np.any(x - 2 * h < ds.lower) or np.any(x + 2 * h > ds.upper):
        raise SecondLawError("fd_step_out_of_bounds", f"{x.tolist()} is within two steps of a bound")
    grad = []
    for i in range(len(x)):
        e = np.zeros_like(x)
        e[i] = h[i]
        grad.append((f(x + e) - f(x - e)) / (2 * h[i]))
    return float(np.max(np.abs(grad)))


def _interior(ds: DesignSpace, x: np.ndarray, step: float) -> np.ndarray:
    margin = 2.0 * step * ds.span * (1 + 1e-9)
    return np.clip(x, ds.lower + margin, ds.upper - margin)


def minimize_lost_work(
    ds: DesignSpace,
    budget: int = 200,
    tol: float = 1e-8,
    viewpoint: Viewpoint | str = Viewpoint.SYSTEM,
    objective: Objective | str = Objective.LOST_WORK,
) -> ExtremumResult:
    """Bounded Nelder-Mead search for the extremum of the lost-work action.

    Trial points are projected onto the box.  The search stops when every
    vertex lies within ``tol * range`` of the best vertex on each axis, or
    when ``budget`` objective evaluations are spent.  The environment
    viewpoint flips the sign, turning the search into a maximization.
    Points where the design builder fails count as +inf and are recorded.
    """
    if budget < 50:
        raise ValueError("budget must be at least 50 evaluations")
    sign = 1.0 if Viewpoint(viewpoint) is Viewpoint.SYSTEM else -1.0
    raw = _objective(ds, Objective(objective))
    failures: list[tuple[tuple[float, ...], str]] = []
    evals = 0

    def f(x: np.ndarray) -> float:
        nonlocal evals
        if evals >= budget:
            raise _BudgetExhausted
        evals += 1
        try:
            value = sign * raw(x)
        except (SecondLawError, ValueError, ArithmeticError) as exc:
            failures.append((tuple(float(v) for v in x), f"design_evaluation_failed: {exc}"))
            return math.inf
        return value if math.isfinite(value) else math.inf

    n = len(ds.params)
    span = ds.span
    x0 = ds.center
    simplex = [x0]
    for i in range(n):
        vertex = x0.copy()
        vertex[i] += INITIAL_SCALE * span[i]
        simplex.append(ds.clip(vertex))
    values = [f(v) for v in simplex]

    converged = False
    try:
        converged = _nelder_mead(ds, f, simplex, values, tol)
    except _BudgetExhausted:
        pass

    order = np.argsort(values, kind="stable")
    best = np.array(simplex[order[0]], dtype=float)
    best_value = values[order[0]]
    try:
        stationarity = stationarity_check(ds, _interior(ds, best, FD_STEP), objective)
    except SecondLawError:
        stationarity = math.nan
    return ExtremumResult(
        params_star=best,
        W_lambda_star=sign * best_value,
        stationarity=stationarity,
        evaluations=evals,
        converged=converged,
        failures=failures,
    )


class _BudgetExhausted(Exception):
    pass


def _nelder_mead(ds: DesignSpace, f, simplex: list, values: list, tol: float) -> bool:
    # mutates simplex/values in place so the caller keeps the best point on early exit
    n = len(ds.params)
    span = ds.span
    while True:
        order = np.argsort(values, kind="stable")
        simplex[:] = [simplex[k] for k in order]
        values[:] = [values[k] for k in order]
        spread = np.max(np.abs(np.array(simplex[1:]) - simplex[0]) / span)
        if spread <= tol:
            return True

        centroid = np.mean(simplex[:-1], axis=0)
        worst = simplex[-1]
        xr = ds.clip(centroid + (centroid - worst))
        fr = f(xr)
        if values[0] <= fr < values[-2]:
            simplex[-1], values[-1] = xr, fr
            continue
        if fr < values[0]:
            xe = ds.clip(centroid + 2.0 * (centroid - worst))
            fe = f(xe)
            if fe < fr:
                simplex[-1], values[-1] = xe, fe
            else:
                simplex[-1], values[-1] = xr, fr
            continue
        if fr < values[-1]:
            xc = ds.clip(centroid + 0.5 * (xr - centroid))
        else:
            xc = ds.clip(centroid + 0.5 * (worst - centroid))
        fc = f(xc)
        if fc < min(fr, values[-1]):
            simplex[-1], values[-1] = xc, fc
            continue
        best = simplex[0]
        for k in range(1, n + 1):
            shrunk = best + 0.5 * (simplex[k] - best)
            value = f(shrunk)
            simplex[k], values[k] = shrunk, value


# -- built-in design templates ----------------------------------------------


def entropy_stream_timeline(sdot_g: float, T_a: float, tau: float) -> ProcessTimeline:
    """Steady timeline whose only irreversibility is a stream gaining ``sdot_g`` W/K.

    One kg/s passes through with unchanged enthalpy, velocity and height;
    the outlet carries ``sdot_g`` J/(kg K) more entropy than the inlet.
    """
    snap = SystemSnapshot(
        t=0.0,
        ambient=AmbientReference(T_a),
        streams=(
            Stream("in", "inlet", G=1.0, h=0.0, s=0.0),
            Stream("out", "outlet", G=1.0, h=0.0, s=sdot_g),
        ),
        accumulation=Accumulation(),
        stationary=True,
        mass_closed=True,
    )
    return ProcessTimeline.steady(snap, tau)


def tradeoff_design(
    a: float = 4.0,
    b: float = 1.0,
    lower: float = 0.5,
    upper: float = 8.0,
    T_a: float = 300.0,
    tau: float = 10.0,
) -> DesignSpace:
    """Two competing irreversibilities, ``Sdot_g(x) = a / x + b x``.

    The standard heat-exchanger picture: a larger transfer area ``x`` cuts
    the finite-temperature-difference term ``a / x`` but raises the
    friction term ``b x``.  Optimum at ``x = sqrt(a / b)``.
    """
    return DesignSpace(
        params=(Parameter("x", lower, upper),),
        builder=lambda p: entropy_stream_timeline(a / p[0] + b * p[0], T_a, tau),
    )


def quadratic_design(
    center: Sequence[float] = (1.0,),
    floor: float = 5.0,
    lower: float = -10.0,
    upper: float = 10.0,
    T_a: float = 300.0,
    tau: float = 10.0,
) -> DesignSpace:
    """Lost work ``sum_i (theta_i - c_i)^2 + floor`` in J, one parameter per center."""
    center = np.asarray(center, dtype=float)

    def build(p):
        w = float(np.sum((np.asarray(p) - center) ** 2)) + floor
        return entropy_stream_timeline(w / (T_a * tau), T_a, tau)

    names = ["theta"] if len(center) == 1 else [f"theta{i}" for i in range(len(center))]
    return DesignSpace(params=tuple(Parameter(n, lower, upper) for n in names), builder=build)


def constant_design(value: float = 1.0, lower: float = 0.0, upper: float = 1.0, T_a: float = 300.0, tau: float = 10.0) -> DesignSpace:
    """Flat lost work; every point is optimal."""
    return DesignSpace(
        params=(Parameter("x", lower, upper),),
        builder=lambda p: entropy_stream_timeline(value / (T_a * tau), T_a, tau),
    )


TEMPLATES: dict[str, Callable[..., DesignSpace]] = {
    "tradeoff": tradeoff_design,
    "quadratic": quadratic_design,
    "constant": constant_design,
}
