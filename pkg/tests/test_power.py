import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nomakit.downlink import DownlinkScenario, achievable_rate, reduced_region_check
from nomakit.errors import InfeasibleError
from nomakit.power import (
    PowerSolution,
    max_sum_rate_allocation,
    min_power_allocation,
    rate_region_boundary,
    snr_for_rate,
    sum_rate,
)

from oracles import brute_force_min_total


def own_rates(gains, powers):
    """C(k; k) for every k, written out independently of the package."""
    out = []
    for k, (a, p) in enumerate(zip(gains, powers)):
        out.append(math.log2(1 + a * p / (a * sum(powers[:k]) + 1)))
    return out


class TestMinPower:
    def test_worked_example(self):
        sol = min_power_allocation((1.0, 0.25), (2.0, 1.0))
        assert sol.powers == (3.0, 7.0)
        assert sol.total == 10.0

    def test_zero_targets(self):
        sol = min_power_allocation((3.0, 2.0, 1.0), (0.0, 0.0, 0.0))
        assert sol.powers == (0.0, 0.0, 0.0)
        assert sol.total == 0.0

    def test_three_users_by_hand(self):
        sol = min_power_allocation((1.0, 1 / 4, 1 / 9), (1.0, 1.0, 1.0))
        np.testing.assert_allclose(sol.powers, (1.0, 5.0, 15.0), rtol=1e-14)
        scen = DownlinkScenario((1.0, 1 / 4, 1 / 9), sol.powers)
        for k in (1, 2, 3):
            assert achievable_rate(scen, k, k) == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("gains", [(0.25, 1.0), (1.0, 0.0), (1.0, -2.0)])
    def test_bad_gains(self, gains):
        with pytest.raises(ValueError):
            min_power_allocation(gains, (1.0, 1.0))

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            min_power_allocation((1.0, 0.5), (1.0,))

    def test_cap(self):
        assert min_power_allocation((1.0, 0.25), (2.0, 1.0), cap=10.0).total == 10.0
        with pytest.raises(InfeasibleError):
            min_power_allocation((1.0, 0.25), (2.0, 1.0), cap=9.99)

    def test_small_targets_keep_precision(self):
        assert snr_for_rate(1e-12) == pytest.approx(1e-12 * math.log(2), rel=1e-9)
        sol = min_power_allocation((1.0,), (1e-12,))
        assert sol.powers[0] > 0

    @pytest.mark.parametrize(
        "gains,targets",
        [
            ((1.0, 0.25), (2.0, 1.0)),
            ((2.3, 0.7), (0.8, 1.3)),
            ((1.5, 1.1, 0.4), (0.5, 0.7, 0.3)),
            ((1.0, 0.5, 0.5), (0.4, 0.2, 0.6)),
        ],
    )
    def test_brute_force_optimality(self, gains, targets):
        sol = min_power_allocation(gains, targets)
        best = brute_force_min_total(gains, targets, sol.powers, half_width=0.03 if len(gains) == 3 else 0.1)
        assert sol.total <= best * (1 + 1e-12)


@settings(max_examples=300, deadline=None)
@given(st.integers(1, 6).flatmap(lambda k: st.tuples(
    st.lists(st.floats(1e-2, 1e2), min_size=k, max_size=k),
    st.lists(st.floats(0.0, 4.0), min_size=k, max_size=k),
)))
def test_constraints_are_active(case):
    gains, targets = case
    gains = sorted(gains, reverse=True)
    sol = min_power_allocation(gains, targets)
    for c, r in zip(own_rates(gains, sol.powers), targets):
        assert c == pytest.approx(r, abs=1e-9)
    assert sol.total == pytest.approx(sum(sol.powers), rel=1e-12)


@settings(max_examples=200, deadline=None)
@given(st.integers(2, 6).flatmap(lambda k: st.tuples(
    st.lists(st.floats(1e-2, 1e2), min_size=k, max_size=k),
    st.lists(st.floats(0.05, 4.0), min_size=k, max_size=k),
    st.integers(0, k - 1),
    st.floats(0.01, 1.0),
)))
def test_monotonicity(case):
    gains, targets, i, bump = case
    gains = sorted(gains, reverse=True)
    base = min_power_allocation(gains, targets).total
    more = list(targets)
    more[i] += bump
    assert min_power_allocation(gains, more).total > base
    # a better channel for user i (kept in sorted position) never costs power
    better = list(gains)
    better[i] = gains[i - 1] if i > 0 else gains[0] * 2
    assert min_power_allocation(better, targets).total <= base * (1 + 1e-12)


class TestMaxSumRate:
    def test_worked_example(self):
        sol, rate = max_sum_rate_allocation((1.0, 0.25), 10.0)
        assert sol.powers == (10.0, 0.0)
        assert rate == pytest.approx(math.log2(11), abs=1e-12)
        assert round(rate, 3) == 3.459

    def test_zero_budget(self):
        sol, rate = max_sum_rate_allocation((1.0, 0.25), 0.0)
        assert rate == 0.0 and sol.total == 0.0

    def test_formula(self):
        sol, rate = max_sum_rate_allocation((2.0, 1.0), 3.0)
        assert sol.powers == (3.0, 0.0)
        assert rate == pytest.approx(math.log2(7))

    def test_empty(self):
        with pytest.raises(ValueError):
            max_sum_rate_allocation((), 1.0)

    def test_beats_every_split(self):
        gains = (1.7, 0.9, 0.3)
        _, best = max_sum_rate_allocation(gains, 5.0)
        for p1, p2 in itertools.product(np.linspace(0, 5, 21), repeat=2):
            if p1 + p2 <= 5.0:
                assert sum_rate(gains, (p1, p2, 5.0 - p1 - p2)) <= best + 1e-12


class TestBoundary:
    def test_endpoints(self):
        curve = rate_region_boundary((1.0, 0.25), 10.0, 101)
        assert curve.shape == (101, 4)
        np.testing.assert_allclose(curve[-1, 2:], (math.log2(11), 0.0), atol=1e-15)
        np.testing.assert_allclose(curve[0, 2:], (0.0, math.log2(1 + 10 / 4)), atol=1e-15)

    def test_min_power_point_on_boundary(self):
        curve = rate_region_boundary((1.0, 0.25), 10.0, 101)
        row = curve[np.argmin(np.abs(curve[:, 0] - 3.0))]
        assert row[0] == pytest.approx(3.0)
        np.testing.assert_allclose(row[2:], (2.0, 1.0), atol=1e-9)

    def test_grid_too_small(self):
        with pytest.raises(ValueError):
            rate_region_boundary((1.0, 0.25), 10.0, 1)

    def test_two_users_only(self):
        with pytest.raises(ValueError):
            rate_region_boundary((1.0, 0.5, 0.25), 10.0, 5)

    def test_pareto_and_consistency(self):
        gains = (1.0, 0.25)
        curve = rate_region_boundary(gains, 10.0, 201)
        assert np.all(np.diff(curve[:, 2]) > 0) and np.all(np.diff(curve[:, 3]) < 0)
        # endpoints carry a zero rate, which the strict region excludes
        for p1, p2, r1, r2 in curve[1:-1]:
            scen = DownlinkScenario(gains, (p1, p2), (r1 - 1e-9, r2 - 1e-9))
            assert reduced_region_check(scen)


def test_solution_dict():
    sol = PowerSolution.from_powers([1, 2.5])
    assert sol.to_dict() == {"powers": [1.0, 2.5], "total": 3.5}
