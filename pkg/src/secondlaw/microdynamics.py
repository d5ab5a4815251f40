"""
Phase-space contraction and time averages on small discrete-time maps.

The per-step contraction of a map S at a point is ``-ln |det J_S(x)|``;
it is positive where the map shrinks phase-space volume.  Its long-orbit
average estimates the expectation under the map's SRB statistics.

Contraction means here are per step.  Entropy production from heat baths is
per second.  The two are never equated directly: ``per_second`` converts a
per-step value only when the caller supplies a step duration.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .balance import entropy_generation_rate
from .model import STANDARD, HeatBath, PhysicalConstants, SecondLawError, SystemSnapshot, check_baths

BRIDGE_RTOL = 1e-9
STREAM_BALANCE_RTOL = 1e-12
_MANTISSA = 2.0**53


@dataclass(frozen=True)
class MapSystem:
    """A differentiable map of a box ``[lower, upper]`` into itself.

    ``refine``, when set, is applied after every step of an orbit.  Expanding
    maps with power-of-two stretching (the baker map) shed one binary digit
    per step in floating point and collapse onto 0 after ~53 steps; the hook
    appends a fresh digit drawn from the orbit's random source, which is the
    lazily sampled expansion of a generic initial point.
    """

    name: str
    dim: int
    step: Callable[[np.ndarray], np.ndarray]
    jacobian: Callable[[np.ndarray], np.ndarray]
    lower: tuple[float, ...]
    upper: tuple[float, ...]
    periodic: tuple[bool, ...] = ()
    refine: Optional[Callable[[np.ndarray, random.Random], np.ndarray]] = None
    params: dict = field(default_factory=dict)

    def contains(self, sigma: Sequence[float]) -> bool:
        return all(lo <= x <= hi for x, lo, hi in zip(sigma, self.lower, self.upper))

    def sample(self, rng: np.random.Generator, n: int, margin: float = 0.0) -> np.ndarray:
        lo = np.asarray(self.lower) + margin
        hi = np.asarray(self.upper) - margin
        return rng.uniform(lo, hi, size=(n, self.dim))


@dataclass(frozen=True)
class OrbitStats:
    T: int
    burn_in: int
    mean: float
    halves: tuple[float, float]
    stderr: float  # batch-means standard error of ``mean``

    @property
    def n(self) -> int:
        return self.T - self.burn_in


# -- map zoo ---------------------------------------------------------------


def cat_map() -> MapSystem:
    """Arnold's cat map (x, y) -> (2x + y, x + y) mod 1; area preserving."""
    jac = np.array([[2.0, 1.0], [1.0, 1.0]])

    def step(sigma):
        x, y = sigma
        return np.array([(2.0 * x + y) % 1.0, (x + y) % 1.0])

    return MapSystem(
        name="cat",
        dim=2,
        step=step,
        jacobian=lambda sigma: jac.copy(),
        lower=(0.0, 0.0),
        upper=(1.0, 1.0),
        periodic=(True, True),
    )


def linear_map(factor: float = 0.5, dim: int = 1) -> MapSystem:
    """Uniform contraction x -> factor * x on [-1, 1]^dim."""
    if not 0 < abs(factor) <= 1:
        raise ValueError("linear map factor must satisfy 0 < |factor| <= 1 to stay in [-1, 1]")
    jac = factor * np.eye(dim)
    return MapSystem(
        name="linear",
        dim=dim,
        step=lambda sigma: factor * np.asarray(sigma, dtype=float),
        jacobian=lambda sigma: jac.copy(),
        lower=(-1.0,) * dim,
        upper=(1.0,) * dim,
        periodic=(False,) * dim,
        params={"factor": factor, "dim": dim},
    )


def _baker_refine(sigma, rng: random.Random):
    # keep x on the 2^-53 grid and fill the vacated last digit
    k = math.floor(sigma[0] * _MANTISSA)
    sigma[0] = ((k & ~1) | rng.getrandbits(1)) / _MANTISSA
    return sigma


def baker_map(r1: float = 0.3, r2: float = 0.2) -> MapSystem:
    """Dissipative baker map on the unit square.

    Left half: (x, y) -> (2x, r1 y).  Right half: (x, y) -> (2x - 1, 1 - r2 + r2 y).
    The Jacobian is diag(2, r_i) on branch i, so the contraction is -ln(2 r_i).
    """
    if not (0 < r1 and 0 < r2 and r1 + r2 <= 1):
        raise ValueError("baker map needs r1, r2 > 0 and r1 + r2 <= 1")

    def step(sigma):
        x, y = sigma
        if x < 0.5:
            return np.array([2.0 * x, r1 * y])
        return np.array([2.0 * x - 1.0, 1.0 - r2 + r2 * y])

    def jacobian(sigma):
        r = r1 if sigma[0] < 0.5 else r2
        return np.array([[2.0, 0.0], [0.0, r]])

    return MapSystem(
        name="baker",
        dim=2,
        step=step,
        jacobian=jacobian,
        lower=(0.0, 0.0),
        upper=(1.0, 1.0),
        periodic=(True, False),
        refine=_baker_refine,
        params={"r1": r1, "r2": r2},
    )


MAP_ZOO: dict[str, Callable[..., MapSystem]] = {
    "cat": cat_map,
    "linear": linear_map,
    "baker": baker_map,
}


def make_map(name: str, **params) -> MapSystem:
    try:
        factory = MAP_ZOO[name]
    except KeyError:
        raise SecondLawError("unknown_map", f"unknown map {name!r}; choose from {sorted(MAP_ZOO)}") from None
    return factory(**params)


# -- map diagnostics ---------------------------------------------------------


def finite_difference_jacobian(m: MapSystem, sigma, h: float = 1e-6) -> np.ndarray:
    """Central differences of ``m.step``; differences of periodic coordinates are wrapped."""
    sigma = np.asarray(sigma, dtype=float)
    jac = np.empty((m.dim, m.dim))
    periods = np.asarray(m.upper) - np.asarray(m.lower)
    for j in range(m.dim):
        e = np.zeros(m.dim)
        e[j] = h
        diff = m.step(sigma + e) - m.step(sigma - e)
        for i, wrap in enumerate(m.periodic):
            if wrap:
                diff[i] -= periods[i] * np.round(diff[i] / periods[i])
        jac[:, j] = diff / (2.0 * h)
    return jac


def jacobian_error(m: MapSystem, sigma, h: float = 1e-6) -> float:
    """Max-norm gap between analytic and finite-difference Jacobians, relative to max(1, |J|)."""
    analytic = np.asarray(m.jacobian(np.asarray(sigma, dtype=float)))
    numeric = finite_difference_jacobian(m, sigma, h)
    return float(np.max(np.abs(analytic - numeric)) / max(1.0, np.max(np.abs(analytic))))


def maps_into_domain(m: MapSystem, n: int = 1000, seed: int = 0) -> bool:
    rng = np.random.default_rng(seed)
    return all(m.contains(m.step(p)) for p in m.sample(rng, n))


# -- contraction and averages ------------------------------------------------


def _log_abs_det(jac) -> float:
    jac = np.asarray(jac, dtype=float)
    if jac.shape == (1, 1):
        det = jac[0, 0]
    elif jac.shape == (2, 2):
        det = jac[0, 0] * jac[1, 1] - jac[0, 1] * jac[1, 0]
    else:
        sign, logdet = np.linalg.slogdet(jac)
        if sign == 0:
            raise SecondLawError("singular_jacobian", "det J = 0")
        return float(logdet)
    if det == 0.0:
        raise SecondLawError("singular_jacobian", "det J = 0")
    return math.log(abs(det))


def phase_contraction(m: MapSystem, sigma) -> float:
    """Per-step phase-space contraction ``-ln |det J(sigma)|``."""
    return -_log_abs_det(m.jacobian(np.asarray(sigma, dtype=float)))


def _batch_stderr(values: np.ndarray, n_batches: int = 32) -> float:
    n = len(values)
    if n < 2 * n_batches:
        return float(np.std(values, ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    size = n // n_batches
    means = values[: size * n_batches].reshape(n_batches, size).mean(axis=1)
    return float(np.std(means, ddof=1) / math.sqrt(n_batches))


def birkhoff_average(
    m: MapSystem,
    sigma0,
    observable: Callable[[np.ndarray], float],
    T: int,
    burn_in: int = 0,
    seed: int = 0,
) -> OrbitStats:
    """Time average of ``observable`` over steps ``burn_in + 1 .. T`` of the orbit of ``sigma0``.

    Deterministic for fixed arguments; ``seed`` only drives ``m.refine``.
    Raises ``orbit_escaped`` if the orbit leaves the map's box.
    """
    if not (T > burn_in >= 0):
        raise ValueError(f"need T > burn_in >= 0, got T={T}, burn_in={burn_in}")
    sigma = np.array(sigma0, dtype=float)
    if not m.contains(sigma):
        raise SecondLawError("orbit_escaped", "initial point outside the map domain (step 0)")
    rng = random.Random(seed)
    step, refine, contains = m.step, m.refine, m.contains
    values = np.empty(T - burn_in)
    for j in range(1, T + 1):
        sigma = step(sigma)
        if refine is not None:
            sigma = refine(sigma, rng)
        if not contains(sigma):
            raise SecondLawError("orbit_escaped", f"orbit left the domain at step {j}")
        if j > burn_in:
            values[j - burn_in - 1] = observable(sigma)
    half = len(values) // 2
    first = float(values[:half].mean()) if half else float(values[0])
    second = float(values[half:].mean())
    return OrbitStats(
        T=T,
        burn_in=burn_in,
        mean=float(values.mean()),
        halves=(first, second),
        stderr=_batch_stderr(values),
    )


def contraction_stats(m: MapSystem, sigma0, T: int, burn_in: int = 1000, seed: int = 0) -> OrbitStats:
    return birkhoff_average(m, sigma0, lambda s: phase_contraction(m, s), T, burn_in, seed)


def entropy_production_contraction(m: MapSystem, sigma0, T: int, burn_in: int = 1000, seed: int = 0) -> float:
    """SRB expectation of the per-step contraction, estimated on one orbit."""
    return contraction_stats(m, sigma0, T, burn_in, seed).mean


def per_second(per_step: float, step_duration: float) -> float:
    if not step_duration > 0:
        raise ValueError("step_duration must be positive")
    return per_step / step_duration


def entropy_production_baths(baths: Sequence[HeatBath], constants: PhysicalConstants = STANDARD) -> float:
    """``sum_i Qdot_i / (k_B T_i)`` in 1/s."""
    check_baths(baths)
    return math.fsum(b.Qdot / b.T for b in baths) / constants.k_B


def bridge_check(snap: SystemSnapshot, constants: PhysicalConstants = STANDARD) -> float:
    """Residual ``Sdot_g + k_B Sigma_prod`` for a stationary snapshot with balanced stream entropy.

    Under those premises both sides reduce to ``-sum Qdot_i / T_i`` and the
    residual is round-off.  Raises ``bridge_premises_unmet`` otherwise and
    ``bridge_residual`` if the identity fails.
    """
    if not snap.stationary or snap.accumulation.dSdt != 0.0 or snap.accumulation.dEdt != 0.0:
        raise SecondLawError("bridge_premises_unmet", "snapshot is not stationary")
    s_out = math.fsum(st.G * st.s for st in snap.outlets)
    s_in = math.fsum(st.G * st.s for st in snap.inlets)
    if abs(s_out - s_in) > STREAM_BALANCE_RTOL * max(1.0, abs(s_out), abs(s_in)):
        raise SecondLawError("bridge_premises_unmet", f"stream entropy outflow {s_out} != inflow {s_in} W/K")
    sdot_g = entropy_generation_rate(snap)
    residual = sdot_g + constants.k_B * entropy_production_baths(snap.baths, constants)
    if abs(residual) > BRIDGE_RTOL * max(1.0, abs(sdot_g)):
        raise SecondLawError("bridge_residual", f"|Sdot_g + k_B Sigma_prod| = {abs(residual)} W/K")
    return residual


def bridge_premises_hold(snap: SystemSnapshot) -> bool:
    try:
        bridge_check(snap)
    except SecondLawError as exc:
        if exc.code == "bridge_premises_unmet":
            return False
        raise
    return True
