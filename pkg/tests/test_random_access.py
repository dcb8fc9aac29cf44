import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nomakit.random_access import (
    BLOCK_TRIALS,
    DecodingModel,
    RaConfig,
    aloha_throughput,
    default_grid,
    independent_subchannel_throughput,
    noma_aloha_throughput_2level,
    refine_peak,
    simulate_models,
    simulate_multichannel,
    slot_successes,
    throughput_curve,
)

from oracles import binomial_two_level, enumerate_ra_throughput

IND = DecodingModel.INDEPENDENT_SUBCHANNEL
SIC = DecodingModel.SIC_BLOCKING


class TestClosedForms:
    def test_aloha_k10(self):
        assert aloha_throughput(10, 0.1) == pytest.approx(0.38742, abs=1e-5)

    def test_two_level_k10(self):
        assert noma_aloha_throughput_2level(10, 0.1) == pytest.approx(0.48427, abs=1e-5)

    def test_edges(self):
        assert aloha_throughput(10, 0.0) == 0.0
        assert aloha_throughput(10, 1.0) == 0.0
        assert aloha_throughput(1, 1.0) == 1.0
        assert noma_aloha_throughput_2level(10, 0.0) == 0.0
        assert noma_aloha_throughput_2level(2, 1.0) == 0.5

    def test_two_level_needs_two_users(self):
        with pytest.raises(ValueError):
            noma_aloha_throughput_2level(1, 0.5)

    def test_probability_range(self):
        with pytest.raises(ValueError):
            aloha_throughput(10, 1.5)
        with pytest.raises(ValueError):
            noma_aloha_throughput_2level(10, -0.1)

    def test_limit_large_k(self):
        assert aloha_throughput(10_000, 1e-4) == pytest.approx(math.exp(-1), abs=1e-4)

    @given(st.integers(2, 200), st.floats(0.0, 1.0))
    def test_two_level_dominates(self, K, p):
        assert noma_aloha_throughput_2level(K, p) >= aloha_throughput(K, p)

    @given(st.integers(1, 60), st.floats(0.0, 1.0), st.integers(1, 4), st.integers(1, 4))
    def test_independent_formula_matches_single_cell_aloha(self, K, p, L, B):
        if L == B == 1:
            assert independent_subchannel_throughput(K, p) == pytest.approx(aloha_throughput(K, p), rel=1e-12, abs=1e-300)
        assert independent_subchannel_throughput(K, p, L, B) >= aloha_throughput(K, p) * (1 - 1e-12)

    @pytest.mark.parametrize("K,p", [(10, 0.1), (6, 0.3), (4, 0.9)])
    def test_independent_formula_vs_binomial_oracle(self, K, p):
        assert independent_subchannel_throughput(K, p, 2, 1) == pytest.approx(binomial_two_level(K, p), rel=1e-12)


class TestSlotSuccesses:
    def test_independent(self):
        counts = np.array([[[1, 2, 0, 1]]])
        assert slot_successes(counts, IND).tolist() == [2]

    def test_blocking(self):
        counts = np.array([[[1, 2, 0, 1], [0, 1, 1, 3]]])
        assert slot_successes(counts, SIC).tolist() == [3]

    def test_empty(self):
        assert slot_successes(np.zeros((3, 2, 2), int), "sic_blocking").tolist() == [0, 0, 0]


class TestSimulator:
    def test_matches_aloha(self):
        cfg = RaConfig(10, 0.1, trials=100_000, seed=3)
        mean, se = simulate_multichannel(cfg)
        assert abs(mean - aloha_throughput(10, 0.1)) <= 3 * se

    @pytest.mark.parametrize("model", list(DecodingModel))
    @pytest.mark.parametrize("L,B", [(2, 1), (2, 2), (3, 1)])
    def test_matches_enumeration(self, model, L, B):
        K, p = 6, 0.35
        exact = enumerate_ra_throughput(K, p, L, B, model.value)
        mean, se = simulate_multichannel(RaConfig(K, p, L, B, model, trials=60_000, seed=11))
        assert abs(mean - exact) <= 4 * se

    def test_enumeration_oracle_agrees_with_formula(self):
        exact = enumerate_ra_throughput(5, 0.4, 2, 2, "independent_subchannel")
        assert exact == pytest.approx(independent_subchannel_throughput(5, 0.4, 2, 2), rel=1e-12)

    def test_two_level_closed_form_vs_simulation(self):
        # The closed form credits one packet for a two-user split; the
        # simulator credits both, so it sits above the formula.
        mean, se = simulate_multichannel(RaConfig(10, 0.1, 2, trials=100_000, seed=1))
        assert abs(mean - binomial_two_level(10, 0.1)) <= 4 * se
        assert mean > noma_aloha_throughput_2level(10, 0.1)

    def test_blocking_never_beats_independent(self):
        out = simulate_models(RaConfig(40, 0.2, 4, 3, trials=5000, seed=2))
        assert np.all(out[SIC] <= out[IND])
        assert out[SIC].sum() < out[IND].sum()

    def test_more_subcarriers_help(self):
        vals = [enumerate_ra_throughput(4, 0.6, 1, b, "sic_blocking") for b in (1, 2, 3)]
        assert vals[0] < vals[1] < vals[2]

    def test_deterministic_and_seed_sensitive(self):
        cfg = RaConfig(50, 0.1, 4, 2, trials=BLOCK_TRIALS + 17, seed=9)
        assert simulate_multichannel(cfg) == simulate_multichannel(cfg)
        other = RaConfig(50, 0.1, 4, 2, trials=BLOCK_TRIALS + 17, seed=10)
        assert simulate_multichannel(cfg) != simulate_multichannel(other)

    def test_trial_prefix_is_stable(self):
        a = simulate_models(RaConfig(20, 0.3, 2, 2, trials=BLOCK_TRIALS * 2 + 5, seed=4), [IND])[IND]
        b = simulate_models(RaConfig(20, 0.3, 2, 2, trials=BLOCK_TRIALS + 3, seed=4), [IND])[IND]
        np.testing.assert_array_equal(a[: b.size], b)

    def test_extremes(self):
        assert simulate_multichannel(RaConfig(10, 0.0, trials=100))[0] == 0.0
        assert simulate_multichannel(RaConfig(1, 1.0, 3, 2, trials=100))[0] == 1.0

    def test_zero_trials(self):
        with pytest.raises(ValueError):
            simulate_multichannel(RaConfig(10, 0.1, trials=0))

    @pytest.mark.parametrize(
        "kwargs",
        [dict(users=0), dict(access_prob=1.1), dict(power_levels=0), dict(trials=-1), dict(seed=-1), dict(decoding_model="x")],
    )
    def test_config_validation(self, kwargs):
        base = dict(users=5, access_prob=0.1)
        base.update(kwargs)
        with pytest.raises(ValueError):
            RaConfig(**base)


class TestCurves:
    def test_aloha_peak(self):
        curve = throughput_curve(RaConfig(10, 0.0), default_grid())
        assert curve.method == "analytic" and curve.stderr is None
        assert curve.peak[0] == 0.1

    def test_two_level_peak_moves_right(self):
        cfg = RaConfig(10, 0.0, power_levels=2)
        curve = throughput_curve(cfg, default_grid())
        dense = np.linspace(0, 1, 100_001)
        vals = [noma_aloha_throughput_2level(10, p) for p in dense]
        p_star, t_star = refine_peak(cfg, curve)
        assert p_star > 0.1
        assert p_star == pytest.approx(dense[int(np.argmax(vals))], abs=2e-5)
        assert t_star >= curve.peak[1]

    def test_single_point(self):
        curve = throughput_curve(RaConfig(10, 0.0), [0.3])
        assert curve.points == ((0.3, aloha_throughput(10, 0.3)),)
        assert refine_peak(RaConfig(10, 0.0), curve) == curve.peak

    def test_empty_grid(self):
        with pytest.raises(ValueError):
            throughput_curve(RaConfig(10, 0.0), [])

    def test_forced_methods(self):
        with pytest.raises(ValueError):
            throughput_curve(RaConfig(10, 0.0, 4, 2), [0.1], method="analytic")
        with pytest.raises(ValueError):
            throughput_curve(RaConfig(10, 0.0), [0.1], method="magic")
        sim = throughput_curve(RaConfig(10, 0.0, trials=2000), [0.1, 0.2], method="simulate")
        assert sim.method == "simulate" and len(sim.stderr) == 2

    def test_simulated_curve_uses_seed(self):
        cfg = RaConfig(30, 0.0, 2, 2, trials=3000, seed=5)
        assert throughput_curve(cfg, [0.1, 0.2]) == throughput_curve(cfg, [0.1, 0.2])
