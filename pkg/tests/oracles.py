"""Independent reference computations, kept apart from the code they check."""

import math

import numpy as np


def baker_contraction_bruteforce(r1: float, r2: float, T: int, seed: int = 12345) -> tuple[float, float]:
    """Mean and standard error of -ln|det J| along a T-step baker orbit from a generic start.

    Works in symbolic coordinates: the binary digits of x are a fair coin
    sequence for Lebesgue-almost every start, and the left/right branch at
    step j is digit j.  No map code, no Jacobians.
    """
    digits = np.random.default_rng(seed).integers(0, 2, size=T, dtype=np.int8)
    values = np.where(digits == 0, -math.log(2.0 * r1), -math.log(2.0 * r2))
    return float(values.mean()), float(values.std(ddof=1) / math.sqrt(T))


def baker_srb_mean(r1: float, r2: float) -> float:
    # x-marginal of the SRB measure is uniform: each branch has weight 1/2
    return -0.5 * (math.log(2.0 * r1) + math.log(2.0 * r2))
