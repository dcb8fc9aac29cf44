"""
Uplink NOMA with successive interference cancellation at the BS.

The sum rate ``log2(1 + sum(beta_k Q_k))`` is reached by decoding users
one at a time and stripping each decoded signal. A user decoded at step
``j`` sees as interference only the users not yet decoded, so its rate is

    log2(1 + beta_k Q_k / (1 + sum of beta_l Q_l over users still present)).

Decoding order
--------------
``order`` lists 1-based user indices in the sequence the BS decodes them.
The chain-rule expansion that conditions user ``k`` on users ``k+1..K``
decodes user K first, i.e. ``order = (K, K-1, ..., 1)``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

__all__ = ["UplinkScenario", "total_mutual_information", "sic_rates", "feasible_rate_tuple"]


@dataclass(frozen=True)
class UplinkScenario:
    gains: tuple[float, ...]
    powers: tuple[float, ...]
    order: tuple[int, ...] | None = None

    def __post_init__(self):
        gains = tuple(float(b) for b in self.gains)
        powers = tuple(float(q) for q in self.powers)
        if not gains:
            raise ValueError("at least one user is required")
        if len(powers) != len(gains):
            raise ValueError(f"got {len(gains)} gains but {len(powers)} powers")
        if any(not math.isfinite(b) or b <= 0 for b in gains):
            raise ValueError("channel gains must be finite and positive")
        if any(not math.isfinite(q) or q < 0 for q in powers):
            raise ValueError("powers must be finite and nonnegative")
        order = tuple(range(len(gains), 0, -1)) if self.order is None else tuple(int(i) for i in self.order)
        if sorted(order) != list(range(1, len(gains) + 1)):
            raise ValueError(f"order {order} is not a permutation of 1..{len(gains)}")
        object.__setattr__(self, "gains", gains)
        object.__setattr__(self, "powers", powers)
        object.__setattr__(self, "order", order)

    @property
    def users(self) -> int:
        return len(self.gains)

    def to_dict(self) -> dict:
        return {"gains": list(self.gains), "powers": list(self.powers), "order": list(self.order)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "UplinkScenario":
        order = d.get("order")
        return cls(tuple(d["gains"]), tuple(d["powers"]), None if order is None else tuple(order))

    @classmethod
    def from_json(cls, text: str) -> "UplinkScenario":
        return cls.from_dict(json.loads(text))


def total_mutual_information(scenario: UplinkScenario) -> float:
    """``log2(1 + sum(beta_k Q_k))`` in bits per channel use."""
    snr = math.fsum(b * q for b, q in zip(scenario.gains, scenario.powers))
    return math.log2(1.0 + snr)


def sic_rates(scenario: UplinkScenario) -> list[float]:
    """Per-user SIC rates, listed by user index (not by decoding step)."""
    rx = [b * q for b, q in zip(scenario.gains, scenario.powers)]
    rates = [0.0] * scenario.users
    order = scenario.order
    for step, user in enumerate(order):
        interference = math.fsum(rx[u - 1] for u in order[step + 1 :])
        rates[user - 1] = math.log1p(rx[user - 1] / (1.0 + interference)) / math.log(2.0)
    return rates


def feasible_rate_tuple(scenario: UplinkScenario, rates) -> bool:
    """True iff every user's rate is strictly below its SIC rate."""
    rates = [float(r) for r in rates]
    if len(rates) != scenario.users:
        raise ValueError(f"expected {scenario.users} rates, got {len(rates)}")
    return all(r < c for r, c in zip(rates, sic_rates(scenario)))
