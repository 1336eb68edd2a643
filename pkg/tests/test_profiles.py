import numpy as np
import pytest

from rankbreak.common.errors import InvalidArgumentError
from rankbreak.simulate.generators import Ar1Config, gen_ar1_changepoint
from rankbreak.testing.profiles import (
    cusum_profile,
    estimate_changepoint_cusum,
    estimate_changepoint_wilcoxon,
    smallest_argmax,
    t_statistic_cusum,
    t_statistic_wilcoxon,
    wilcoxon_profile,
)

STEP = [0, 0, 0, 10, 10, 10]


def brute_force_doubled(x, m, n):
    """2 * W_{m,n}(k) summed pair by pair; a tied pair scores zero."""
    sub = np.asarray(x[m - 1:n], dtype=float)
    # signs[i, j] = sign(x_j - x_i)
    signs = np.sign(sub[None, :] - sub[:, None]).astype(np.int64)
    return np.array([signs[:k, k:].sum() for k in range(1, sub.size + 1)], dtype=np.int64)


def naive_cusum(x, m, n):
    sub = np.asarray(x[m - 1:n], dtype=float)
    total = sum(sub)
    return np.array([sum(sub[:k]) - k / sub.size * total for k in range(1, sub.size + 1)])


class TestWilcoxonProfile:
    def test_increasing_series(self):
        np.testing.assert_array_equal(wilcoxon_profile([1, 2, 3], 1, 3), [2, 2, 0])

    def test_step_series_peaks_at_the_break(self):
        doubled = wilcoxon_profile(STEP, 1, 6)
        assert doubled[2] == 9
        assert np.argmax(np.abs(doubled)) == 2
        assert np.count_nonzero(np.abs(doubled) == 9) == 1

    def test_last_element_is_zero(self, rng):
        assert wilcoxon_profile(rng.normal(size=17), 1, 17)[-1] == 0

    def test_returns_integers(self, rng):
        assert wilcoxon_profile(rng.normal(size=10), 1, 10).dtype.kind == 'i'

    def test_matches_brute_force(self, rng):
        for _ in range(200):
            n = int(rng.integers(2, 60))
            x = rng.normal(size=n)
            np.testing.assert_array_equal(wilcoxon_profile(x, 1, n), brute_force_doubled(x, 1, n))

    def test_matches_brute_force_on_subranges(self, rng):
        x = rng.normal(size=40)
        for m, n in [(1, 1), (3, 3), (5, 22), (10, 40), (39, 40)]:
            np.testing.assert_array_equal(wilcoxon_profile(x, m, n), brute_force_doubled(x, m, n))

    def test_matches_brute_force_with_ties(self, rng):
        for _ in range(50):
            n = int(rng.integers(2, 50))
            x = rng.integers(0, 4, size=n).astype(float)
            np.testing.assert_array_equal(wilcoxon_profile(x, 1, n), brute_force_doubled(x, 1, n))

    def test_matches_brute_force_on_random_subranges(self, rng):
        for _ in range(1000):
            size = int(rng.integers(2, 301))
            x = rng.normal(size=size)
            m = int(rng.integers(1, size + 1))
            n = int(rng.integers(m, size + 1))
            np.testing.assert_array_equal(wilcoxon_profile(x, m, n), brute_force_doubled(x, m, n))

    def test_constant_series_is_zero(self):
        np.testing.assert_array_equal(wilcoxon_profile([4.2] * 5, 1, 5), np.zeros(5))

    def test_tied_pairs_score_zero(self):
        # across k=2 the pair (1.0, 1.0) ties and the other three pairs decrease
        np.testing.assert_array_equal(wilcoxon_profile([1.0, 2.0, 1.0, 0.0], 1, 4), [0, -3, -3, 0])

    def test_decreasing_transform_negates_profile_with_ties(self):
        x = np.array([0.0, 1.0, 1.0, 2.0, 0.0])
        np.testing.assert_array_equal(wilcoxon_profile(-x, 1, 5), -wilcoxon_profile(x, 1, 5))

    def test_matches_brute_force_at_n_200(self, rng):
        x = rng.normal(size=200)
        np.testing.assert_array_equal(wilcoxon_profile(x, 1, 200), brute_force_doubled(x, 1, 200))

    def test_shift_invariance(self, rng):
        x = rng.normal(size=100)
        np.testing.assert_array_equal(wilcoxon_profile(x + 123.5, 1, 100), wilcoxon_profile(x, 1, 100))

    def test_increasing_transform_keeps_profile(self, rng):
        x = rng.normal(size=100)
        np.testing.assert_array_equal(wilcoxon_profile(np.exp(x), 1, 100), wilcoxon_profile(x, 1, 100))

    def test_decreasing_transform_negates_profile(self, rng):
        x = rng.normal(size=100)
        np.testing.assert_array_equal(wilcoxon_profile(-x ** 3, 1, 100), -wilcoxon_profile(x, 1, 100))

    def test_bound(self, rng):
        n = 150
        doubled = wilcoxon_profile(rng.normal(size=n), 1, n)
        k = np.arange(1, n + 1)
        assert np.all(np.abs(doubled) <= k * (n - k))

    def test_empty_range(self):
        with pytest.raises(InvalidArgumentError, match="empty"):
            wilcoxon_profile([1.0, 2.0, 3.0], 3, 2)

    @pytest.mark.parametrize("m, n", [(0, 2), (1, 4)])
    def test_range_outside_series(self, m, n):
        with pytest.raises(InvalidArgumentError):
            wilcoxon_profile([1.0, 2.0, 3.0], m, n)

    def test_rejects_nan(self):
        with pytest.raises(InvalidArgumentError):
            wilcoxon_profile([1.0, np.nan, 3.0], 1, 3)


class TestCusumProfile:
    def test_increasing_series(self):
        np.testing.assert_allclose(cusum_profile([1, 2, 3], 1, 3), [-1, -1, 0])

    def test_step_series(self):
        profile = cusum_profile(STEP, 1, 6)
        assert profile[2] == pytest.approx(-15.0)
        assert np.argmax(np.abs(profile)) == 2

    def test_constant_series(self):
        np.testing.assert_allclose(cusum_profile([2.5] * 8, 1, 8), np.zeros(8), atol=1e-12)

    def test_matches_naive_sum(self, rng):
        x = rng.normal(size=500)
        np.testing.assert_allclose(cusum_profile(x, 1, 500), naive_cusum(x, 1, 500), rtol=1e-9, atol=1e-9)

    def test_subrange_uses_its_own_length(self, rng):
        x = rng.normal(size=60)
        np.testing.assert_allclose(cusum_profile(x, 11, 50), naive_cusum(x, 11, 50), rtol=1e-9, atol=1e-9)

    def test_ends_at_zero(self, rng):
        assert cusum_profile(rng.normal(size=99), 1, 99)[-1] == 0.0

    def test_location_invariance(self, rng):
        x = rng.normal(size=300)
        c = 1e3
        np.testing.assert_allclose(cusum_profile(x + c, 1, 300), cusum_profile(x, 1, 300), atol=1e-9 * 300 * c)

    def test_empty_range(self):
        with pytest.raises(InvalidArgumentError, match="empty"):
            cusum_profile([1.0, 2.0], 2, 1)


class TestChangepointEstimators:
    def test_smallest_argmax(self):
        assert smallest_argmax(np.array([1, 3, 2, 3])) == 1

    def test_smallest_argmax_with_tolerance(self):
        assert smallest_argmax(np.array([1.0, 3.0 - 1e-12, 3.0]), atol=1e-9) == 1

    def test_step_series(self):
        assert estimate_changepoint_wilcoxon(STEP) == 3
        assert estimate_changepoint_cusum(STEP) == 3

    @pytest.mark.parametrize("estimator", [estimate_changepoint_wilcoxon, estimate_changepoint_cusum])
    def test_constant_series_picks_one(self, estimator):
        assert estimator([4.2] * 5) == 1

    @pytest.mark.parametrize("estimator", [estimate_changepoint_wilcoxon, estimate_changepoint_cusum])
    def test_two_valued_ties(self, estimator):
        # |profile| peaks at k=1 and k=3 with equal height.
        assert estimator([0.0, 1.0, 0.0, 1.0]) == 1

    def test_wilcoxon_never_returns_n(self, rng):
        for _ in range(20):
            x = rng.normal(size=12)
            assert 1 <= estimate_changepoint_wilcoxon(x) < 12

    @pytest.mark.parametrize("estimator", [estimate_changepoint_wilcoxon, estimate_changepoint_cusum])
    def test_needs_two_points(self, estimator):
        with pytest.raises(InvalidArgumentError):
            estimator([1.0])

    def test_wilcoxon_invariant_under_increasing_transform(self, rng):
        x = rng.normal(size=200)
        x[120:] += 1.5
        assert estimate_changepoint_wilcoxon(np.exp(x)) == estimate_changepoint_wilcoxon(x)

    @pytest.mark.slow
    @pytest.mark.parametrize("estimator", [estimate_changepoint_wilcoxon, estimate_changepoint_cusum])
    def test_locates_a_large_shift(self, estimator):
        cfg = Ar1Config(n=500, rho=0.4, theta=0.5, delta=2.0)
        hits = 0
        for seed in range(500):
            x = gen_ar1_changepoint(cfg, np.random.default_rng(seed))
            hits += abs(estimator(x) - 250) <= 25
        assert hits >= 475


class TestStatistics:
    def test_wilcoxon_step(self):
        assert t_statistic_wilcoxon(STEP) == pytest.approx(4.5 / 6 ** 1.5, abs=1e-5)
        assert t_statistic_wilcoxon(STEP) == pytest.approx(0.30619, abs=1e-5)

    def test_wilcoxon_constant(self):
        assert t_statistic_wilcoxon([1.0] * 7) == 0.0

    def test_wilcoxon_matches_brute_force(self, rng):
        x = rng.normal(size=80)
        expected = np.abs(brute_force_doubled(x, 1, 80)).max() / 2 / 80 ** 1.5
        assert t_statistic_wilcoxon(x) == expected

    def test_cusum(self, rng):
        x = rng.normal(size=50)
        assert t_statistic_cusum(x) == pytest.approx(np.abs(naive_cusum(x, 1, 50)).max() / np.sqrt(50))

    @pytest.mark.parametrize("statistic", [t_statistic_wilcoxon, t_statistic_cusum])
    def test_needs_two_points(self, statistic):
        with pytest.raises(InvalidArgumentError):
            statistic([0.5])
