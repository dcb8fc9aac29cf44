"""Worked-example checks with known answers."""

from __future__ import annotations

import math

import numpy as np

from . import beamforming as bf
from . import downlink as dl
from . import power
from . import random_access as ra
from .channel import FadingSpec


def _worked_example_rates():
    s = dl.DownlinkScenario((1.0, 0.25), (3.0, 7.0))
    c11, c22 = dl.achievable_rate(s, 1, 1), dl.achievable_rate(s, 2, 2)
    return abs(c11 - 2) < 1e-12 and abs(c22 - 1) < 1e-12, f"C11={c11!r} C22={c22!r}"


def _worked_example_powers():
    sol = power.min_power_allocation((1.0, 0.25), (2.0, 1.0))
    ok = np.allclose(sol.powers, (3.0, 7.0), rtol=1e-12, atol=0) and abs(sol.total - 10) <= 1e-11
    return ok, f"P*={list(sol.powers)} total={sol.total!r}"


def _max_sum_rate():
    _, rate = power.max_sum_rate_allocation((1.0, 0.25), 10.0)
    return abs(rate - math.log2(11)) < 1e-12 and round(rate, 3) == 3.459, f"sum rate={rate!r}"


def _solution_on_boundary():
    curve = power.rate_region_boundary((1.0, 0.25), 10.0, 11)
    row = [float(x) for x in curve[3]]
    return abs(row[2] - 2) < 1e-9 and abs(row[3] - 1) < 1e-9, f"P1={row[0]!r} -> (R1, R2)=({row[2]!r}, {row[3]!r})"


def _db_targets():
    g1, g2 = bf.db_to_linear(10.0), bf.db_to_linear(6.0)
    return abs(g1 - 10) < 1e-12 and abs(g2 - 3.981) < 1e-3, f"G1={g1!r} G2={g2!r}"


def _noma_beats_oma():
    spec = FadingSpec(6, (1.0, 2.0) * 3, 3.5, seed=1)
    rows = bf.fig3_experiment([6, 8], 30, spec, bf.db_to_linear(10.0), bf.db_to_linear(6.0))
    ok = all(r.noma_mean_power <= r.oma_mean_power for r in rows)
    return ok, "; ".join(f"L={r.antennas}: NOMA {r.noma_mean_power:.4g} OMA {r.oma_mean_power:.4g}" for r in rows)


def _aloha_limit():
    t = ra.aloha_throughput(1000, 1e-3)
    return abs(t - math.exp(-1)) < 1e-3, f"T(K=1000, p=1/K)={t!r}"


def _aloha_peak():
    curve = ra.throughput_curve(ra.RaConfig(10, 0.0), ra.default_grid())
    return curve.peak[0] == 0.1, f"peak at p_a={curve.peak[0]!r}"


def _noma_aloha_dominates():
    grid = ra.default_grid()
    ok = all(ra.noma_aloha_throughput_2level(10, p) >= ra.aloha_throughput(10, p) for p in grid)
    gain = ra.noma_aloha_throughput_2level(10, 0.1) - ra.aloha_throughput(10, 0.1)
    return ok and gain > 0, f"gain at p_a=0.1: {gain!r}"


def _multichannel_utilization():
    cfg = ra.RaConfig(200, 0.0, power_levels=4, subcarriers=6, trials=2000, seed=0)
    curve = ra.throughput_curve(cfg, np.linspace(0.0, 0.3, 31))
    return curve.peak[1] >= 4.5, f"peak {curve.peak[1]:.4g} at p_a={curve.peak[0]:.3g} (B=6)"


CHECKS = [
    ("downlink worked example rates", _worked_example_rates),
    ("min-power allocation (3, 7), total 10", _worked_example_powers),
    ("max sum rate log2(11)", _max_sum_rate),
    ("min-power point on the P_T=10 boundary", _solution_on_boundary),
    ("SINR targets 10 dB / 6 dB", _db_targets),
    ("NOMA needs less power than OMA", _noma_beats_oma),
    ("ALOHA limit e^-1", _aloha_limit),
    ("ALOHA peak at p_a = 1/K", _aloha_peak),
    ("NOMA-ALOHA improves ALOHA", _noma_aloha_dominates),
    ("multichannel NOMA-ALOHA near B", _multichannel_utilization),
]


def run_checks():
    """Run every check; returns a list of ``(name, passed, detail)``."""
    out = []
    for name, fn in CHECKS:
        passed, detail = fn()
        out.append((name, bool(passed), detail))
    return out
