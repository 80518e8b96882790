from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qclocksync.estimator import (
    DegenerateStatisticsWarning,
    SingularOffsetWarning,
    amplitude,
    comparison_table,
    delta_method_std,
    invert_probability,
    k_opt,
    monte_carlo_estimates,
    monte_carlo_std,
)
from qclocksync.protocol import ProtocolConfig, analytic_probability, cosine_amplitude, run_protocol_exact
from qclocksync.states import EntangledStateKind

W4 = EntangledStateKind.w(4)
Z42 = EntangledStateKind.dicke(4, 2)
W250 = 2 * np.pi * 250


def grid_search_inverse(p, a0, omega, points=10**6):
    grid = np.linspace(0, np.pi / omega, points)
    return grid[np.argmin(np.abs(0.5 + a0 * np.cos(omega * grid) - p))]


class TestAmplitude:
    def test_four_two(self):
        assert amplitude(4, 2).a0 == Fraction(1, 3)

    def test_w_family(self):
        for n in range(2, 20):
            assert amplitude(n, 1).a0 == Fraction(1, n)

    def test_five_two(self):
        a = amplitude(5, 2)
        assert a.a0 == Fraction(3, 10) and float(a) == 0.3
        table = run_protocol_exact(ProtocolConfig.uniform(EntangledStateKind.dicke(5, 2), 1.0, 0.0))
        assert table.p_pos(1) - 0.5 == pytest.approx(0.3, abs=1e-12)

    def test_range(self):
        with pytest.raises(ValueError):
            amplitude(4, 0)
        with pytest.raises(ValueError):
            amplitude(4, 4)

    @pytest.mark.parametrize("n", range(2, 7))
    def test_matches_simulation(self, n):
        for k in range(1, n):
            table = run_protocol_exact(ProtocolConfig.uniform(EntangledStateKind.dicke(n, k), 1.0, 0.0))
            assert table.p_pos(1) - 0.5 == pytest.approx(float(amplitude(n, k).a0), abs=1e-12)


class TestKOpt:
    def test_examples(self):
        assert k_opt(4) == 2
        assert k_opt(5) == 2

    @pytest.mark.parametrize("n", range(2, 65))
    def test_argmax(self, n):
        best = max(amplitude(n, k).a0 for k in range(1, n))
        assert amplitude(n, k_opt(n)).a0 == best


class TestInvert:
    def test_top_of_cosine(self):
        for a0 in (0.25, 1 / 3, 0.5):
            assert invert_probability(0.5 + a0, a0, 123.0) == pytest.approx(0.0, abs=1e-9)

    def test_quarter_period(self):
        assert invert_probability(0.5, 0.25, W250) == pytest.approx(1e-3, rel=1e-12)

    def test_two_thirds(self):
        got = invert_probability(2 / 3, 1 / 3, W250)
        ref = grid_search_inverse(2 / 3, 1 / 3, W250)
        assert got == pytest.approx(ref, abs=2e-9)
        assert got == pytest.approx(666.6667e-6, abs=1e-10)

    def test_clamps(self):
        assert invert_probability(0.99, 0.25, W250) == 0.0
        assert invert_probability(0.01, 0.25, W250) == pytest.approx(np.pi / W250)

    def test_bad_parameters(self):
        with pytest.raises(ValueError):
            invert_probability(0.5, 0.0, 1.0)
        with pytest.raises(ValueError):
            invert_probability(0.5, 0.25, 0.0)

    @given(st.sampled_from([EntangledStateKind.bell(), W4, Z42, EntangledStateKind.dicke(7, 3)]),
           st.floats(1.0, 2 * np.pi * 1000), st.floats(1e-6, 1 - 1e-6))
    @settings(max_examples=200, deadline=None)
    def test_round_trip(self, kind, omega, frac):
        delta = frac * np.pi / omega
        p = analytic_probability(kind, omega, delta)
        a0 = float(cosine_amplitude(kind))
        assert abs((p - 0.5) / a0) <= 1 + 1e-12
        assert invert_probability(p, a0, omega) == pytest.approx(delta, abs=1e-9)


class TestMonteCarlo:
    def test_many_shots(self):
        std = monte_carlo_std(W4, W250, 1e-3, 10**7, 20, seed=5)
        assert std < 1e-6

    def test_deterministic(self):
        a = monte_carlo_estimates(Z42, W250, 1e-3, 512, 30, seed=11)
        b = monte_carlo_estimates(Z42, W250, 1e-3, 512, 30, seed=11)
        assert a[1].tobytes() == b[1].tobytes()

    def test_seed_changes_draws(self):
        a = monte_carlo_estimates(Z42, W250, 1e-3, 512, 30, seed=11)[1]
        b = monte_carlo_estimates(Z42, W250, 1e-3, 512, 30, seed=12)[1]
        assert not np.array_equal(a, b)

    def test_dicke_beats_w(self):
        std_z = monte_carlo_std(Z42, W250, 1e-3, 4096, 200, 0, cell=(1,))
        assert std_z < monte_carlo_std(W4, W250, 1e-3, 4096, 200, 0, cell=(0,))

    def test_frequency_scaling(self):
        slow = 2 * np.pi * 100
        s_fast = monte_carlo_std(Z42, W250, (np.pi / 2) / W250, 4096, 200, 1, cell=(0,))
        s_slow = monte_carlo_std(Z42, slow, (np.pi / 2) / slow, 4096, 200, 1, cell=(1,))
        assert s_slow * slow / (s_fast * W250) == pytest.approx(1.0, abs=0.15)

    @pytest.mark.parametrize("phase", [np.pi / 4, np.pi / 2, 3 * np.pi / 4])
    def test_delta_method(self, phase):
        for kind in (W4, Z42):
            delta = phase / W250
            mc = monte_carlo_std(kind, W250, delta, 4096, 400, 3)
            assert mc == pytest.approx(delta_method_std(kind, W250, delta, 4096), rel=0.15)

    @pytest.mark.parametrize("phase", [np.pi / 4, np.pi / 2, 3 * np.pi / 4])
    def test_monotone_in_amplitude(self, phase):
        for seed in (100, 200, 300):
            std_w = monte_carlo_std(W4, W250, phase / W250, 4096, 200, seed, cell=(0,))
            std_z = monte_carlo_std(Z42, W250, phase / W250, 4096, 200, seed, cell=(1,))
            assert std_z <= std_w

    def test_singular_flag(self):
        with pytest.warns(SingularOffsetWarning):
            monte_carlo_std(W4, W250, 0.0, 100, 5, 0)

    def test_single_trial(self):
        with pytest.warns(DegenerateStatisticsWarning):
            assert monte_carlo_std(W4, W250, 1e-3, 100, 1, 0) == 0.0


class TestComparisonTable:
    def test_table1_shape_and_order(self):
        omegas = [2 * np.pi * f for f in (100, 150, 250)]
        report = comparison_table(omegas, [W4, Z42], 4096, 200, seed=0)
        grid = report.std_grid()
        assert grid.shape == (2, 3)
        assert np.all(grid[1] <= grid[0])
        assert not report.degenerate
        for c in report.cells:
            assert c.delta_true * c.omega == pytest.approx(np.pi / 2)
            assert c.p_exact == pytest.approx(0.5, abs=1e-12)
            assert 0 <= c.delta_hat <= np.pi / c.omega

    def test_single_cell_matches_monte_carlo(self):
        report = comparison_table([W250], [Z42], 1024, 50, seed=9)
        direct = monte_carlo_std(Z42, W250, (np.pi / 2) / W250, 1024, 50, 9, cell=(0, 0))
        assert report.std_grid()[0, 0] == direct

    def test_single_trial_flagged(self):
        with pytest.warns(DegenerateStatisticsWarning):
            report = comparison_table([W250], [W4], 100, 1, seed=0)
        assert report.degenerate
        assert report.std_grid()[0, 0] == 0.0

    def test_empty(self):
        with pytest.raises(ValueError):
            comparison_table([], [W4], 10, 10, 0)
