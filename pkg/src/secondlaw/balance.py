"""Entropy generation, available power and lost work for one snapshot and over a lifetime."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np

from .model import (
    STANDARD,
    PhysicalConstants,
    ProcessTimeline,
    SecondLawError,
    SystemSnapshot,
    check_baths,
    stream_exergy_flux,
    validate_timeline,
)

RESIDUAL_FLOOR = 1e-30
GOUY_STODOLA_RTOL = 1e-10


class Route(str, Enum):
    FROM_ENTROPY_BALANCE = "from_entropy_balance"
    FROM_EXERGY_BALANCE = "from_exergy_balance"


@dataclass(frozen=True)
class BalanceResult:
    Sdot_g: float
    Wdot_max: float
    Wdot_eff: float
    Wdot_lost: float  # Wdot_max - Wdot_eff
    route: Route
    Wdot_lost_entropy: float  # T_a * Sdot_g
    discrepancy: float  # relative gap between the two lost-power routes
    declared: bool = False

    @property
    def negative_generation(self) -> bool:
        return self.Sdot_g < 0


@dataclass(frozen=True)
class LifetimeResult:
    S_g: float
    W_lambda: float
    residual_gouy_stodola: float
    T_a: float
    tau: float
    delta_S_e: float = 0.0  # entropy brought in by reversible exchange, J/K

    @property
    def passes(self) -> bool:
        return self.residual_gouy_stodola <= GOUY_STODOLA_RTOL


def entropy_generation_rate(snap: SystemSnapshot) -> float:
    """Entropy generation rate of an open system, in W/K.

    ``dS/dt + sum_out G s - sum_in G s - sum_i Qdot_i / T_i``.  A negative
    value is returned as is; flagging it is left to the caller.
    """
    check_baths(snap.baths)
    terms = [snap.accumulation.dSdt]
    terms += [st.G * st.s for st in snap.outlets]
    terms += [-st.G * st.s for st in snap.inlets]
    terms += [-bath.Qdot / bath.T for bath in snap.baths]
    return math.fsum(terms)


def entropy_exchange_rate(snap: SystemSnapshot) -> float:
    """Entropy carried across the boundary per unit time, W/K (dS/dt minus generation)."""
    check_baths(snap.baths)
    terms = [st.G * st.s for st in snap.inlets]
    terms += [-st.G * st.s for st in snap.outlets]
    terms += [bath.Qdot / bath.T for bath in snap.baths]
    return math.fsum(terms)


def max_power(snap: SystemSnapshot, constants: PhysicalConstants = STANDARD) -> float:
    """Power delivered by a reversible system with the same boundary flows, in W.

    Inlet availability minus outlet availability, plus the Carnot-weighted
    bath heat ``Qdot_i (1 - T_a / T_i)``, minus the rate of change of the
    system's own availability ``dE/dt - T_a dS/dt``.
    """
    check_baths(snap.baths)
    amb = snap.ambient
    T_a = amb.T_a
    terms = [stream_exergy_flux(st, amb, constants) for st in snap.inlets]
    terms += [-stream_exergy_flux(st, amb, constants) for st in snap.outlets]
    terms += [bath.Qdot * (1.0 - T_a / bath.T) for bath in snap.baths]
    acc = snap.accumulation
    terms += [-acc.dEdt, T_a * acc.dSdt_total]
    return math.fsum(terms)


def effective_power(snap: SystemSnapshot, constants: PhysicalConstants = STANDARD) -> float:
    """Declared effective power if present, else ``max_power - T_a * Sdot_g``."""
    if snap.Wdot_effective_declared is not None:
        return float(snap.Wdot_effective_declared)
    return max_power(snap, constants) - snap.ambient.T_a * entropy_generation_rate(snap)


def lost_power(snap: SystemSnapshot, constants: PhysicalConstants = STANDARD) -> BalanceResult:
    """Lost power by the exergy route and by the entropy route, side by side."""
    sdot_g = entropy_generation_rate(snap)
    w_max = max_power(snap, constants)
    w_eff = effective_power(snap, constants)
    w_lost = w_max - w_eff
    w_lost_s = snap.ambient.T_a * sdot_g
    scale = max(abs(w_lost), abs(w_lost_s), RESIDUAL_FLOOR)
    return BalanceResult(
        Sdot_g=sdot_g,
        Wdot_max=w_max,
        Wdot_eff=w_eff,
        Wdot_lost=w_lost,
        route=Route.FROM_EXERGY_BALANCE,
        Wdot_lost_entropy=w_lost_s,
        discrepancy=abs(w_lost - w_lost_s) / scale,
        declared=snap.Wdot_effective_declared is not None,
    )


def trapezoid(times, values) -> float:
    """Composite trapezoidal rule on a possibly nonuniform grid."""
    t = np.asarray(times, dtype=float)
    y = np.asarray(values, dtype=float)
    return float(np.sum(0.5 * (y[1:] + y[:-1]) * np.diff(t)))


def integrate_over_lifetime(tl: ProcessTimeline, rate: Callable[[SystemSnapshot], float]) -> float:
    if len(tl.snapshots) < 2:
        raise SecondLawError("timeline_too_short", f"{len(tl.snapshots)} snapshot(s); need at least 2")
    return trapezoid(tl.times, [rate(snap) for snap in tl.snapshots])


def check_timeline(tl: ProcessTimeline) -> float:
    """Raise on an unusable timeline; return its single ambient temperature."""
    if len({snap.ambient.T_a for snap in tl.snapshots}) > 1:
        raise SecondLawError("ambient_not_constant", "all snapshots must share one ambient temperature")
    if len(tl.snapshots) < 2:
        raise SecondLawError("timeline_too_short", f"{len(tl.snapshots)} snapshot(s); need at least 2")
    report = validate_timeline(tl)
    if not report.ok:
        first = report.violations[0]
        raise SecondLawError("invalid_timeline", f"{first.path}: {first.code} ({first.message})")
    return tl.snapshots[0].ambient.T_a


def gouy_stodola_audit(tl: ProcessTimeline, constants: PhysicalConstants = STANDARD) -> LifetimeResult:
    """Integrate entropy generation and lost power independently and compare W_lambda with T_a S_g."""
    T_a = check_timeline(tl)
    s_g = integrate_over_lifetime(tl, entropy_generation_rate)
    w_lambda = integrate_over_lifetime(tl, lambda snap: max_power(snap, constants) - effective_power(snap, constants))
    ds_e = integrate_over_lifetime(tl, entropy_exchange_rate)
    scale = max(abs(w_lambda), T_a * abs(s_g), RESIDUAL_FLOOR)
    residual = abs(w_lambda - T_a * s_g) / scale
    return LifetimeResult(
        S_g=s_g,
        W_lambda=w_lambda,
        residual_gouy_stodola=residual,
        T_a=T_a,
        tau=tl.tau,
        delta_S_e=ds_e,
    )
