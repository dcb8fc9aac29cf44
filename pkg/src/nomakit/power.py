"""
Downlink NOMA power allocation.

Two problems over the reduced rate region ``R_k <= C(k; k)``:

* sum-rate maximization under a total power budget, whose optimum gives
  the whole budget to the strongest user;
* total-power minimization under per-user minimum rates, solved in
  closed form by meeting each rate constraint with equality in order of
  decreasing channel gain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .downlink import DownlinkScenario
from .errors import InfeasibleError

__all__ = [
    "PowerSolution",
    "snr_for_rate",
    "min_power_allocation",
    "max_sum_rate_allocation",
    "rate_region_boundary",
    "sum_rate",
]


@dataclass(frozen=True)
class PowerSolution:
    """Per-user powers and their total (the 1-norm of the power vector)."""

    powers: tuple[float, ...]
    total: float

    @classmethod
    def from_powers(cls, powers) -> "PowerSolution":
        powers = tuple(float(p) for p in powers)
        return cls(powers, math.fsum(powers))

    def to_dict(self) -> dict:
        return {"powers": list(self.powers), "total": self.total}


def _sorted_gains(gains) -> np.ndarray:
    a = np.asarray(gains, dtype=float)
    if a.ndim != 1 or a.size == 0:
        raise ValueError("gains must be a non-empty sequence")
    if np.any(~np.isfinite(a)) or np.any(a <= 0):
        raise ValueError("gains must be finite and positive")
    if np.any(np.diff(a) > 0):
        raise ValueError("gains must be sorted nonincreasing")
    return a


def snr_for_rate(rate: float) -> float:
    """``2**rate - 1`` without cancellation for small rates."""
    if rate < 0 or not math.isfinite(rate):
        raise ValueError(f"rate targets must be finite and nonnegative, got {rate!r}")
    if rate >= 1.0:
        return 2.0**rate - 1.0
    return math.expm1(rate * math.log(2.0))


def min_power_allocation(gains, targets, cap: float | None = None) -> PowerSolution:
    """Minimum total power meeting ``C(k; k) >= targets[k]`` for every user.

    Parameters
    ----------
    gains : sequence of float
        Channel gains sorted nonincreasing.
    targets : sequence of float
        Minimum rates in bits per channel use.
    cap : float, optional
        Total power budget. The unconstrained problem has no cap; when one
        is given and the minimum total exceeds it, ``InfeasibleError`` is
        raised.

    Returns
    -------
    PowerSolution
        ``P_k = (2**R_k - 1) * (P_1 + ... + P_{k-1} + 1 / gains[k])``.
    """
    a = _sorted_gains(gains)
    targets = [float(r) for r in targets]
    if len(targets) != a.size:
        raise ValueError(f"got {a.size} gains but {len(targets)} rate targets")
    powers = []
    for alpha, rate in zip(a, targets):
        powers.append(snr_for_rate(rate) * (math.fsum(powers) + 1.0 / alpha))
    sol = PowerSolution.from_powers(powers)
    if cap is not None and sol.total > cap:
        raise InfeasibleError(f"minimum total power {sol.total!r} exceeds the cap {cap!r}")
    return sol


def sum_rate(gains, powers) -> float:
    """Sum of ``C(k; k)`` over users."""
    scen = DownlinkScenario(tuple(gains), tuple(powers))
    g = np.asarray(scen.gains)
    p = np.asarray(scen.powers)
    before = np.concatenate(([0.0], np.cumsum(p)[:-1]))
    return float(np.sum(np.log2(1.0 + g * p / (g * before + 1.0))))


def max_sum_rate_allocation(gains, total_power: float) -> tuple[PowerSolution, float]:
    """Sum-rate optimal split of ``total_power``.

    Every unit of power moved from user 1 to a weaker user lowers the sum
    rate, so user 1 takes the whole budget.

    Returns
    -------
    (PowerSolution, float)
        The allocation and its sum rate ``log2(1 + gains[0] * total_power)``.
    """
    a = _sorted_gains(gains)
    if total_power < 0 or not math.isfinite(total_power):
        raise ValueError("total_power must be finite and nonnegative")
    powers = [float(total_power)] + [0.0] * (a.size - 1)
    return PowerSolution.from_powers(powers), float(np.log2(1.0 + a[0] * total_power))


def rate_region_boundary(gains, total_power: float, grid_points: int) -> np.ndarray:
    """Pareto boundary of the two-user reduced rate region.

    ``P_1`` is swept uniformly over ``[0, total_power]`` (``P_2`` takes
    the rest), from all power at user 2 to all power at user 1.

    Returns
    -------
    numpy.ndarray
        Shape ``(grid_points, 4)`` with columns ``P1, P2, R1, R2``.
    """
    a = _sorted_gains(gains)
    if a.size != 2:
        raise ValueError("the boundary sweep is defined for exactly two users")
    if int(grid_points) != grid_points or grid_points < 2:
        raise ValueError("grid_points must be an integer >= 2")
    if total_power <= 0 or not math.isfinite(total_power):
        raise ValueError("total_power must be positive")
    p1 = np.linspace(0.0, total_power, int(grid_points))
    p2 = total_power - p1
    r1 = np.log2(1.0 + a[0] * p1)
    r2 = np.log2(1.0 + a[1] * p2 / (a[1] * p1 + 1.0))
    return np.column_stack([p1, p2, r1, r2])
