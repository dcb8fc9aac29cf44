"""
Downlink NOMA with superposition coding and SIC at the receivers.

Users are indexed 1..K in decreasing channel gain, ``gains[0] >= gains[1]
>= ...``. Noise variance is normalized to one, so powers are SNRs.

User ``k`` decodes and strips the signals of the weaker users ``K, K-1,
..., k+1`` before decoding its own signal. The rate at which user ``k``
can decode the signal intended for user ``l >= k`` is::

    C(l; k) = log2(1 + gains[k] P[l] / (gains[k] * sum(P[m] for m < l) + 1))
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

__all__ = [
    "DownlinkScenario",
    "achievable_rate",
    "rate_matrix",
    "in_rate_region",
    "reduced_region_check",
]


@dataclass(frozen=True)
class DownlinkScenario:
    """Channel gains, allocated powers and (optionally) transmission rates.

    ``gains`` must be sorted nonincreasing; unsorted input is rejected
    rather than silently reordered, since reordering would permute the
    meaning of ``powers`` and ``rates``.
    """

    gains: tuple[float, ...]
    powers: tuple[float, ...]
    rates: tuple[float, ...] | None = None

    def __post_init__(self):
        gains = tuple(float(a) for a in self.gains)
        powers = tuple(float(p) for p in self.powers)
        object.__setattr__(self, "gains", gains)
        object.__setattr__(self, "powers", powers)
        if not gains:
            raise ValueError("at least one user is required")
        if len(powers) != len(gains):
            raise ValueError(f"got {len(gains)} gains but {len(powers)} powers")
        if any(not np.isfinite(a) or a <= 0 for a in gains):
            raise ValueError("channel gains must be finite and positive")
        if any(not np.isfinite(p) or p < 0 for p in powers):
            raise ValueError("powers must be finite and nonnegative")
        if any(a < b for a, b in zip(gains, gains[1:])):
            raise ValueError("gains must be sorted nonincreasing (alpha_1 >= ... >= alpha_K)")
        if self.rates is not None:
            rates = tuple(float(r) for r in self.rates)
            object.__setattr__(self, "rates", rates)
            if len(rates) != len(gains):
                raise ValueError(f"got {len(gains)} gains but {len(rates)} rates")
            if any(not np.isfinite(r) or r < 0 for r in rates):
                raise ValueError("rates must be finite and nonnegative")

    @property
    def users(self) -> int:
        return len(self.gains)

    def with_rates(self, rates) -> "DownlinkScenario":
        return DownlinkScenario(self.gains, self.powers, tuple(rates))

    def to_dict(self) -> dict:
        d = {"gains": list(self.gains), "powers": list(self.powers)}
        if self.rates is not None:
            d["rates"] = list(self.rates)
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "DownlinkScenario":
        rates = d.get("rates")
        return cls(tuple(d["gains"]), tuple(d["powers"]), None if rates is None else tuple(rates))

    @classmethod
    def from_json(cls, text: str) -> "DownlinkScenario":
        return cls.from_dict(json.loads(text))


def _check_index(scenario: DownlinkScenario, i: int, name: str):
    if not 1 <= i <= scenario.users:
        raise IndexError(f"{name}={i} outside 1..{scenario.users}")


def achievable_rate(scenario: DownlinkScenario, l: int, k: int) -> float:
    """Rate (bits/channel use) at which user ``k`` decodes the signal to user ``l``.

    Indices are 1-based and require ``k <= l``.
    """
    _check_index(scenario, l, "l")
    _check_index(scenario, k, "k")
    if k > l:
        raise ValueError(f"user {k} cannot decode the signal to the stronger user {l}")
    alpha = scenario.gains[k - 1]
    interference = alpha * sum(scenario.powers[: l - 1])
    return float(np.log2(1.0 + alpha * scenario.powers[l - 1] / (interference + 1.0)))


def rate_matrix(scenario: DownlinkScenario) -> np.ndarray:
    """All ``C(l; k)`` as a K x K array indexed ``[l-1, k-1]``; NaN where ``k > l``."""
    gains = np.asarray(scenario.gains)
    powers = np.asarray(scenario.powers)
    before = np.concatenate(([0.0], np.cumsum(powers)[:-1]))
    sinr = gains[None, :] * powers[:, None] / (gains[None, :] * before[:, None] + 1.0)
    c = np.log2(1.0 + sinr)
    c[np.triu_indices(scenario.users, k=1)] = np.nan
    return c


def _require_rates(scenario: DownlinkScenario) -> np.ndarray:
    if scenario.rates is None:
        raise ValueError("scenario has no rates to test")
    return np.asarray(scenario.rates)


def in_rate_region(scenario: DownlinkScenario, tol: float = 0.0) -> bool:
    """Check ``R_l < C(l; k) + tol`` for every receiver ``k`` and every ``l >= k``.

    This is the full set of SIC decodability conditions; with ``tol = 0``
    the region boundary itself is excluded.
    """
    rates = _require_rates(scenario)
    c = rate_matrix(scenario)
    for k in range(scenario.users):
        for l in range(k, scenario.users):
            if not rates[l] < c[l, k] + tol:
                return False
    return True


def reduced_region_check(scenario: DownlinkScenario, tol: float = 0.0) -> bool:
    """Check only ``R_l < C(l; l) + tol``.

    Sufficient for sorted gains, because the weakest receiver of each
    signal is its intended user.
    """
    rates = _require_rates(scenario)
    return bool(np.all(rates < np.diag(rate_matrix(scenario)) + tol))
