"""
Slotted ALOHA and NOMA-ALOHA throughput.

Each of ``K`` users transmits in a slot with probability ``p_a``. With
NOMA, a transmitting user also picks one of ``L`` power levels, and with
multichannel ALOHA one of ``B`` subcarriers, giving ``B * L`` power-frequency
resource cells. Throughput is the expected number of packets decoded per
slot.

Decoding models for the simulator
---------------------------------
``independent_subchannel``
    A packet succeeds iff it is alone in its (subcarrier, level) cell.
``sic_blocking``
    On each subcarrier the levels are decoded from the highest power down.
    A level holding one packet is decoded and cancelled; a level holding
    two or more packets fails and stops decoding of every lower level on
    that subcarrier. Empty levels are skipped.

Random numbers
--------------
Trials are processed in fixed blocks of ``BLOCK_TRIALS``. Block ``b`` draws
from PCG64 seeded with ``SeedSequence([seed, b])``: first a
``(BLOCK_TRIALS, K)`` array of uniforms (user ``k`` transmits iff its uniform is
below ``p_a``), then a ``(BLOCK_TRIALS, K)`` array of cell indices
``subcarrier * L + level`` (level 0 is the highest power). The draws do
not depend on ``p_a`` or the decoding model, so curves and model
comparisons use common random numbers. A short final block is truncated
from a full draw, so slot ``t`` sees the same draw whatever the trial count.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

__all__ = [
    "BLOCK_TRIALS",
    "DecodingModel",
    "RaConfig",
    "ThroughputCurve",
    "aloha_throughput",
    "noma_aloha_throughput_2level",
    "independent_subchannel_throughput",
    "slot_successes",
    "simulate_multichannel",
    "simulate_models",
    "mean_stderr",
    "default_grid",
    "throughput_curve",
    "refine_peak",
]

BLOCK_TRIALS = 4096


class DecodingModel(str, enum.Enum):
    INDEPENDENT_SUBCHANNEL = "independent_subchannel"
    SIC_BLOCKING = "sic_blocking"


@dataclass(frozen=True)
class RaConfig:
    """Random-access scenario.

    Parameters
    ----------
    users : int
        Number of users K.
    access_prob : float
        Per-slot transmission probability p_a.
    power_levels : int
        Number of NOMA power levels L.
    subcarriers : int
        Number of orthogonal subcarriers B.
    decoding_model : DecodingModel or str
    trials : int
        Monte Carlo slots.
    seed : int
        Unsigned 64-bit seed.
    """

    users: int
    access_prob: float
    power_levels: int = 1
    subcarriers: int = 1
    decoding_model: DecodingModel = DecodingModel.INDEPENDENT_SUBCHANNEL
    trials: int = 10_000
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "decoding_model", DecodingModel(self.decoding_model))
        if self.users < 1:
            raise ValueError("users must be positive")
        if not 0.0 <= self.access_prob <= 1.0:
            raise ValueError(f"access_prob must lie in [0, 1], got {self.access_prob!r}")
        if self.power_levels < 1 or self.subcarriers < 1:
            raise ValueError("power_levels and subcarriers must be >= 1")
        if self.trials < 0:
            raise ValueError("trials must be nonnegative")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")

    @property
    def cells(self) -> int:
        return self.power_levels * self.subcarriers


@dataclass(frozen=True)
class ThroughputCurve:
    """Throughput samples over access probabilities.

    ``stderr`` is set for simulated curves and is ``None`` for analytic ones.
    """

    points: tuple[tuple[float, float], ...]
    peak: tuple[float, float]
    stderr: tuple[float, ...] | None = None
    method: str = "analytic"


def aloha_throughput(K: int, p_a: float) -> float:
    """``K p_a (1 - p_a)^(K - 1)``."""
    _check_prob(p_a)
    return K * p_a * (1.0 - p_a) ** (K - 1)


def noma_aloha_throughput_2level(K: int, p_a: float) -> float:
    """ALOHA throughput plus ``(1/2) C(K, 2) p_a^2 (1 - p_a)^(K - 2)``.

    The second term weights the two-transmitter event by 1/2 (the chance
    the two pick different levels) but credits one packet, not two, for
    that event. It is left in that form; ``simulate_multichannel`` gives
    the count with both packets decoded.
    """
    if K < 2:
        raise ValueError("two-level NOMA-ALOHA needs K >= 2")
    _check_prob(p_a)
    pair = 0.5 * math.comb(K, 2) * p_a**2 * (1.0 - p_a) ** (K - 2)
    return aloha_throughput(K, p_a) + pair


def independent_subchannel_throughput(K: int, p_a: float, levels: int = 1, subcarriers: int = 1) -> float:
    """Exact expected successes under ``independent_subchannel``: ``K p (1 - p/(B L))^(K-1)``."""
    _check_prob(p_a)
    return K * p_a * (1.0 - p_a / (levels * subcarriers)) ** (K - 1)


def _check_prob(p):
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"access probability must lie in [0, 1], got {p!r}")


def slot_successes(counts: np.ndarray, model) -> np.ndarray:
    """Decoded packets per slot from cell occupancy ``counts[..., B, L]``."""
    model = DecodingModel(model)
    single = counts == 1
    if model is DecodingModel.SIC_BLOCKING:
        blocked = np.cumsum(counts >= 2, axis=-1) > 0
        single &= ~blocked
    return single.sum(axis=(-2, -1))


def _block_draws(config: RaConfig, block: int, n: int):
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([config.seed, block])))
    u = rng.random((BLOCK_TRIALS, config.users))
    cell = rng.integers(0, config.cells, size=(BLOCK_TRIALS, config.users))
    return u[:n], cell[:n]


def _occupancy(u: np.ndarray, cell: np.ndarray, p_a: float, subcarriers: int, levels: int) -> np.ndarray:
    n = u.shape[0]
    rows, cols = np.nonzero(u < p_a)
    flat = rows * (subcarriers * levels) + cell[rows, cols]
    counts = np.bincount(flat, minlength=n * subcarriers * levels)
    return counts.reshape(n, subcarriers, levels)


def simulate_models(config: RaConfig, models=tuple(DecodingModel)) -> dict:
    """Per-slot success counts for several decoding models on the same draws.

    Returns
    -------
    dict
        ``{DecodingModel: numpy.ndarray of shape (trials,)}``.
    """
    if config.trials < 1:
        raise ValueError("trials must be positive")
    models = [DecodingModel(m) for m in models]
    out = {m: [] for m in models}
    for block, start in enumerate(range(0, config.trials, BLOCK_TRIALS)):
        n = min(BLOCK_TRIALS, config.trials - start)
        u, cell = _block_draws(config, block, n)
        counts = _occupancy(u, cell, config.access_prob, config.subcarriers, config.power_levels)
        for m in models:
            out[m].append(slot_successes(counts, m))
    return {m: np.concatenate(v) for m, v in out.items()}


def mean_stderr(x: np.ndarray) -> tuple[float, float]:
    mean = float(np.mean(x))
    se = float(np.std(x, ddof=1) / math.sqrt(x.size)) if x.size > 1 else math.nan
    return mean, se


def simulate_multichannel(config: RaConfig) -> tuple[float, float]:
    """Monte Carlo throughput of multichannel NOMA-ALOHA.

    Returns
    -------
    (float, float)
        Mean decoded packets per slot and its standard error.
    """
    x = simulate_models(config, [config.decoding_model])[config.decoding_model]
    return mean_stderr(x)


def default_grid(points: int = 101) -> np.ndarray:
    """Uniform access-probability grid on [0, 1]."""
    return np.linspace(0.0, 1.0, points)


def _analytic_fn(config: RaConfig):
    if config.subcarriers == 1 and config.power_levels == 1:
        return lambda p: aloha_throughput(config.users, p)
    if config.subcarriers == 1 and config.power_levels == 2 and config.users >= 2:
        return lambda p: noma_aloha_throughput_2level(config.users, p)
    return None


def throughput_curve(config: RaConfig, p_a_grid, method: str = "auto") -> ThroughputCurve:
    """Throughput at each grid access probability.

    ``method="auto"`` uses the closed forms when there is one subcarrier
    and one or two power levels (plain ALOHA or the two-level NOMA-ALOHA
    formula), and the simulator otherwise. ``"analytic"`` and
    ``"simulate"`` force one path.
    """
    grid = [float(p) for p in p_a_grid]
    if not grid:
        raise ValueError("p_a grid must not be empty")
    for p in grid:
        _check_prob(p)
    if method not in ("auto", "analytic", "simulate"):
        raise ValueError(f"unknown method {method!r}")
    fn = _analytic_fn(config)
    if method == "analytic" and fn is None:
        raise ValueError("no closed form for this configuration")
    if fn is not None and method != "simulate":
        values = [fn(p) for p in grid]
        stderr = None
        method = "analytic"
    else:
        values, errs = [], []
        for p in grid:
            m, s = simulate_multichannel(_with_p(config, p))
            values.append(m)
            errs.append(s)
        stderr = tuple(errs)
        method = "simulate"
    best = int(np.argmax(values))
    points = tuple(zip(grid, values))
    return ThroughputCurve(points, points[best], stderr, method)


def _with_p(config: RaConfig, p: float) -> RaConfig:
    return RaConfig(
        config.users,
        p,
        config.power_levels,
        config.subcarriers,
        config.decoding_model,
        config.trials,
        config.seed,
    )


def refine_peak(config: RaConfig, curve: ThroughputCurve) -> tuple[float, float]:
    """Continuous maximizer of an analytic curve, searched around its grid peak."""
    fn = _analytic_fn(config)
    if fn is None:
        raise ValueError("peak refinement needs a closed-form throughput")
    grid = [p for p, _ in curve.points]
    i = grid.index(curve.peak[0])
    lo = grid[i - 1] if i > 0 else grid[i]
    hi = grid[i + 1] if i + 1 < len(grid) else grid[i]
    if lo == hi:
        return curve.peak
    res = optimize.minimize_scalar(lambda p: -fn(p), bounds=(lo, hi), method="bounded", options={"xatol": 1e-12})
    if -res.fun >= curve.peak[1]:
        return float(res.x), float(-res.fun)
    return curve.peak
