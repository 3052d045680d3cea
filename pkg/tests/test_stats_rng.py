import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats

from gbias.rng import DEFAULT_SEED, make_rng
from gbias.stats import ks_2sample_statistic, ks_critical_value, ks_statistic


class TestRng:
    def test_reproducible(self):
        np.testing.assert_array_equal(make_rng(7).random(5), make_rng(7).random(5))

    def test_streams_differ(self):
        a = make_rng(7, 0).random(5)
        b = make_rng(7, 1).random(5)
        c = make_rng(7, (1, 0)).random(5)
        assert not np.array_equal(a, b)
        assert not np.array_equal(b, c)

    def test_tuple_stream_matches_entropy(self):
        np.testing.assert_array_equal(make_rng(3, (2, 5)).random(4),
                                      make_rng(3, [2, 5]).random(4))

    def test_default_seed(self):
        np.testing.assert_array_equal(make_rng().random(3), make_rng(DEFAULT_SEED).random(3))

    def test_philox(self):
        assert isinstance(make_rng(1).bit_generator, np.random.Philox)


class TestKs:
    def test_critical_value_one_sample(self):
        # c(0.05) = 1.3581 is the textbook asymptotic constant
        np.testing.assert_allclose(ks_critical_value(0.05, 1), 1.3581015157, rtol=1e-9)
        np.testing.assert_allclose(ks_critical_value(0.01, 100), 0.16276, rtol=1e-4)

    def test_critical_value_two_sample(self):
        c = ks_critical_value(0.01, 1)
        np.testing.assert_allclose(ks_critical_value(0.01, 100, 100), c * math.sqrt(0.02),
                                   rtol=1e-15)

    def test_statistic_matches_scipy(self):
        x = make_rng(2).standard_normal(500)
        np.testing.assert_allclose(ks_statistic(x, stats.norm.cdf),
                                   stats.kstest(x, "norm").statistic, rtol=1e-13)

    def test_two_sample_matches_scipy(self):
        rng = make_rng(4)
        x, y = rng.standard_normal(300), rng.standard_normal(450) + 0.1
        np.testing.assert_allclose(ks_2sample_statistic(x, y),
                                   stats.ks_2samp(x, y).statistic, rtol=1e-13)

    def test_two_sample_ties(self):
        assert ks_2sample_statistic([1.0, 1.0, 2.0], [1.0, 2.0, 2.0]) == pytest.approx(1 / 3)

    def test_identical_samples(self):
        x = make_rng(5).random(100)
        assert ks_2sample_statistic(x, x) == 0.0

    @given(st.lists(st.floats(-10, 10), min_size=1, max_size=50))
    def test_bounds(self, x):
        d = ks_statistic(x, stats.norm.cdf)
        assert 1.0 / (2 * len(x)) - 1e-15 <= d <= 1.0

    def test_rejects_shift(self):
        x = make_rng(6).standard_normal(5000) + 0.2
        assert ks_statistic(x, stats.norm.cdf) > ks_critical_value(0.01, x.size)
