"""
Domain types for open-system second-law bookkeeping.

All quantities are SI: kg/s, J/kg, J/(kg K), m/s, m, K, W, W/K, s.
Heat power is signed positive INTO the system.

Two points where the textbook availability balance is used instead of a
literal transcription of the maximum-power expression:

* the stream term is G (h + v^2/2 + g z - T_a s).  With ``+T_a s`` the
  difference W_max - W cannot reduce to T_a * Sdot_g, because the stream
  entropy terms of the entropy balance enter with the opposite sign;
* the accumulation term is d/dt(E - T_a S) = dE/dt - T_a dS/dt, the rate of
  the system's own availability.  A time derivative of an entropy *rate* has
  no place in a power balance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional, Sequence


class SecondLawError(ValueError):
    """Raised with a machine-readable ``code`` when a precondition fails."""

    def __init__(self, code: str, message: str = ""):
        self.code = code
        self.message = message or code
        super().__init__(f"{code}: {self.message}")


@dataclass(frozen=True)
class PhysicalConstants:
    g: float = 9.80665  # m/s^2, standard gravity
    k_B: float = 1.380649e-23  # J/K, exact SI value


STANDARD = PhysicalConstants()


class Direction(str, Enum):
    INLET = "inlet"
    OUTLET = "outlet"


@dataclass(frozen=True)
class Stream:
    name: str
    direction: Direction
    G: float
    h: float
    s: float
    v: float = 0.0
    z: float = 0.0

    def __post_init__(self):
        # accept plain strings from callers and configs
        object.__setattr__(self, "direction", Direction(self.direction))


@dataclass(frozen=True)
class HeatBath:
    name: str
    T: float
    Qdot: float


@dataclass(frozen=True)
class AmbientReference:
    T_a: float


@dataclass(frozen=True)
class Accumulation:
    dSdt: float = 0.0
    dEdt: float = 0.0

    @property
    def dSdt_total(self) -> float:
        # one entropy rate feeds both the entropy and the availability balance
        return self.dSdt


@dataclass(frozen=True)
class SystemSnapshot:
    t: float
    ambient: AmbientReference
    streams: tuple[Stream, ...] = ()
    baths: tuple[HeatBath, ...] = ()
    accumulation: Accumulation = field(default_factory=Accumulation)
    Wdot_effective_declared: Optional[float] = None
    stationary: bool = False
    mass_closed: bool = False

    def __post_init__(self):
        object.__setattr__(self, "streams", tuple(self.streams))
        object.__setattr__(self, "baths", tuple(self.baths))

    @property
    def inlets(self) -> tuple[Stream, ...]:
        return tuple(st for st in self.streams if st.direction is Direction.INLET)

    @property
    def outlets(self) -> tuple[Stream, ...]:
        return tuple(st for st in self.streams if st.direction is Direction.OUTLET)


@dataclass(frozen=True)
class ProcessTimeline:
    snapshots: tuple[SystemSnapshot, ...]
    tau: float

    def __post_init__(self):
        object.__setattr__(self, "snapshots", tuple(self.snapshots))

    @property
    def times(self) -> list[float]:
        return [snap.t for snap in self.snapshots]

    @classmethod
    def steady(cls, snapshot: SystemSnapshot, tau: float, n: int = 2) -> "ProcessTimeline":
        """Repeat one snapshot on a uniform grid of ``n`` points over [0, tau]."""
        if n < 2:
            raise SecondLawError("timeline_too_short", "a timeline needs at least 2 snapshots")
        times = [tau * k / (n - 1) for k in range(n)]
        times[-1] = tau
        snaps = [replace(snapshot, t=t) for t in times]
        return cls(tuple(snaps), tau)


@dataclass(frozen=True)
class Violation:
    code: str
    message: str
    path: str = ""


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    @property
    def codes(self) -> list[str]:
        return [v.code for v in self.violations]

    def __bool__(self) -> bool:
        return self.ok

    def add(self, code: str, message: str, path: str = "") -> None:
        self.violations.append(Violation(code, message, path))


MASS_CLOSURE_RTOL = 1e-9


def _finite(*values: float) -> bool:
    return all(math.isfinite(x) for x in values)


def validate_snapshot(snap: SystemSnapshot, prefix: str = "") -> ValidationReport:
    """Collect every broken invariant of ``snap``; an empty report means valid."""
    report = ValidationReport()
    p = prefix

    if not _finite(snap.t):
        report.add("time_nonfinite", f"t = {snap.t}", f"{p}t")
    T_a = snap.ambient.T_a
    if not (math.isfinite(T_a) and T_a > 0):
        report.add("ambient_nonpositive_temperature", f"T_a = {T_a} K", f"{p}ambient.T_a")

    seen: set[str] = set()
    for i, st in enumerate(snap.streams):
        path = f"{p}streams[{i}]"
        if st.name in seen:
            report.add("duplicate_stream_name", f"stream name {st.name!r} repeated", path)
        seen.add(st.name)
        if not _finite(st.G, st.h, st.s, st.v, st.z):
            report.add("stream_nonfinite", f"stream {st.name!r} has a non-finite field", path)
        elif st.G < 0:
            report.add("stream_negative_flow", f"stream {st.name!r} has G = {st.G} < 0", path)

    seen = set()
    for i, bath in enumerate(snap.baths):
        path = f"{p}baths[{i}]"
        if bath.name in seen:
            report.add("duplicate_bath_name", f"bath name {bath.name!r} repeated", path)
        seen.add(bath.name)
        if not _finite(bath.T, bath.Qdot):
            report.add("bath_nonfinite", f"bath {bath.name!r} has a non-finite field", path)
        elif bath.T <= 0:
            report.add("bath_nonpositive_temperature", f"bath {bath.name!r} at T = {bath.T} K", path)

    acc = snap.accumulation
    if not _finite(acc.dSdt, acc.dEdt):
        report.add("accumulation_nonfinite", "accumulation rates must be finite", f"{p}accumulation")
    elif snap.stationary and (acc.dSdt != 0.0 or acc.dEdt != 0.0):
        report.add(
            "stationary_accumulation_nonzero",
            f"stationary snapshot with dSdt = {acc.dSdt}, dEdt = {acc.dEdt}",
            f"{p}accumulation",
        )

    if snap.Wdot_effective_declared is not None and not _finite(snap.Wdot_effective_declared):
        report.add("declared_power_nonfinite", "declared effective power must be finite", f"{p}Wdot_effective_declared")

    if snap.mass_closed:
        g_in = math.fsum(st.G for st in snap.inlets)
        g_out = math.fsum(st.G for st in snap.outlets)
        if _finite(g_in, g_out) and abs(g_in - g_out) > MASS_CLOSURE_RTOL * max(1.0, g_in, g_out):
            report.add("mass_not_closed", f"inlet {g_in} kg/s != outlet {g_out} kg/s", f"{p}streams")

    return report


def validate_timeline(tl: ProcessTimeline) -> ValidationReport:
    report = ValidationReport()
    if not (math.isfinite(tl.tau) and tl.tau > 0):
        report.add("nonpositive_lifetime", f"tau = {tl.tau} s", "tau")
    snaps = tl.snapshots
    if len(snaps) < 2:
        report.add("timeline_too_short", f"{len(snaps)} snapshot(s); need at least 2", "snapshots")
    if snaps:
        if snaps[0].t != 0.0:
            report.add("timeline_bad_start", f"first time {snaps[0].t} != 0", "snapshots[0].t")
        if snaps[-1].t != tl.tau:
            report.add("timeline_bad_end", f"last time {snaps[-1].t} != tau {tl.tau}", f"snapshots[{len(snaps) - 1}].t")
    for i in range(1, len(snaps)):
        if not snaps[i].t > snaps[i - 1].t:
            report.add("timeline_not_increasing", f"t[{i}] = {snaps[i].t} <= t[{i - 1}]", f"snapshots[{i}].t")
    if len({snap.ambient.T_a for snap in snaps}) > 1:
        report.add("ambient_not_constant", "snapshots disagree on T_a", "snapshots")
    for i, snap in enumerate(snaps):
        report.violations.extend(validate_snapshot(snap, prefix=f"snapshots[{i}].").violations)
    return report


def stream_exergy_flux(st: Stream, amb: AmbientReference, constants: PhysicalConstants = STANDARD) -> float:
    """Flow availability carried by one stream, G (h + v^2/2 + g z - T_a s), in W.

    The stream direction is not applied; callers add inlets and subtract outlets.
    """
    flux = st.G * (st.h + 0.5 * st.v**2 + constants.g * st.z - amb.T_a * st.s)
    if not math.isfinite(flux):
        raise SecondLawError("numeric_overflow", f"exergy flux of stream {st.name!r} is not finite")
    return flux


def check_baths(baths: Sequence[HeatBath]) -> None:
    for bath in baths:
        if not (bath.T > 0):
            raise SecondLawError("invalid_bath", f"bath {bath.name!r} at T = {bath.T} K")
