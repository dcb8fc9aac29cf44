"""
Seeded Rayleigh-fading channel generation.

Every channel vector is a pure function of ``(spec, user_index, trial)``.

Random stream
-------------
The generator is numpy's PCG64 seeded through ``SeedSequence`` with the
entropy words ``[seed, trial, user_index]``. Uniform doubles are taken
from the 64-bit output as ``(x >> 11) * 2**-53`` (numpy's ``random()``).

Complex Gaussian synthesis
--------------------------
Each complex entry consumes two uniforms ``u1, u2`` and applies the
Box-Muller transform in complex form::

    z = sqrt(-ln(1 - u1)) * exp(2j * pi * u2)

which gives real and imaginary parts that are independent N(0, 1/2),
i.e. a unit-variance CSCG sample. Entries are produced in order, so a
vector drawn with more antennas extends (rather than replaces) the
vector drawn with fewer antennas for the same user and trial.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, replace

import numpy as np

__all__ = ["FadingSpec", "as_complex_vector", "cscg", "draw_channel", "draw_channels"]

_UINT64_MAX = 2**64 - 1


@dataclass(frozen=True)
class FadingSpec:
    """Large-scale parameters for i.i.d. Rayleigh channels.

    Parameters
    ----------
    antenna_count : int
        Number of transmit antennas L.
    user_distances : tuple of float
        Normalized BS-user distances, one per user.
    path_loss_exponent : float
        Power decays as ``distance ** -path_loss_exponent``.
    seed : int
        Unsigned 64-bit seed.
    """

    antenna_count: int
    user_distances: tuple[float, ...] = field(default=(1.0,))
    path_loss_exponent: float = 0.0
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "user_distances", tuple(float(d) for d in self.user_distances))
        if int(self.antenna_count) != self.antenna_count or self.antenna_count < 1:
            raise ValueError(f"antenna_count must be a positive integer, got {self.antenna_count!r}")
        if not self.user_distances:
            raise ValueError("user_distances must not be empty")
        if any(not np.isfinite(d) or d <= 0 for d in self.user_distances):
            raise ValueError("user distances must be finite and positive")
        if not np.isfinite(self.path_loss_exponent) or self.path_loss_exponent < 0:
            raise ValueError("path_loss_exponent must be nonnegative")
        if int(self.seed) != self.seed or not 0 <= self.seed <= _UINT64_MAX:
            raise ValueError("seed must be an unsigned 64-bit integer")

    @property
    def users(self) -> int:
        return len(self.user_distances)

    def with_antennas(self, antenna_count: int) -> "FadingSpec":
        return replace(self, antenna_count=antenna_count)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["user_distances"] = list(self.user_distances)
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "FadingSpec":
        return cls(
            antenna_count=int(d["antenna_count"]),
            user_distances=tuple(d["user_distances"]),
            path_loss_exponent=float(d.get("path_loss_exponent", 0.0)),
            seed=int(d.get("seed", 0)),
        )

    @classmethod
    def from_json(cls, text: str) -> "FadingSpec":
        return cls.from_dict(json.loads(text))


def as_complex_vector(x) -> np.ndarray:
    """Validate and return ``x`` as a finite, non-empty 1-D complex array."""
    v = np.atleast_1d(np.asarray(x, dtype=complex))
    if v.ndim != 1 or v.size < 1:
        raise ValueError("a channel vector must be a non-empty 1-D array")
    if not np.all(np.isfinite(v)):
        raise ValueError("channel entries must be finite")
    return v


def cscg(rng: np.random.Generator, size) -> np.ndarray:
    """Unit-variance CSCG samples via the complex Box-Muller transform."""
    u = rng.random((*np.atleast_1d(size), 2))
    radius = np.sqrt(-np.log1p(-u[..., 0]))
    return radius * np.exp(2j * np.pi * u[..., 1])


def _stream(seed: int, trial: int, user_index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, trial, user_index])))


def draw_channel(spec: FadingSpec, user_index: int, trial: int = 0) -> np.ndarray:
    """Draw the L-antenna channel of one user.

    Parameters
    ----------
    spec : FadingSpec
    user_index : int
        0-based index into ``spec.user_distances``.
    trial : int, optional
        Monte Carlo trial number; selects an independent realization.

    Returns
    -------
    numpy.ndarray
        Complex vector of length ``spec.antenna_count`` with per-entry
        variance ``distance ** -path_loss_exponent``.
    """
    if not 0 <= user_index < spec.users:
        raise IndexError(f"user_index {user_index} out of range for {spec.users} users")
    if trial < 0:
        raise ValueError("trial must be nonnegative")
    scale = spec.user_distances[user_index] ** (-spec.path_loss_exponent / 2.0)
    return scale * cscg(_stream(spec.seed, trial, user_index), spec.antenna_count)


def draw_channels(spec: FadingSpec, trial: int = 0) -> np.ndarray:
    """All users' channels for one trial, stacked as rows (users x L)."""
    return np.stack([draw_channel(spec, k, trial) for k in range(spec.users)])
