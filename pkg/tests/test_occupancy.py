import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
import scipy.stats

from frogsim.occupancy import (
    EXACT_PMF_CAP,
    OccupancySpec,
    PmfUnavailableError,
    empbox_mean,
    empbox_pmf,
    empbox_variance,
    sample_binomial,
    sample_empbox,
    sample_empbox_batch,
    sample_empbox_many,
)


def enumerate_empbox_pmf(b: int, c: int) -> list[Fraction]:
    """Oracle: exact pmf by summing multinomial weights over all occupancy
    count vectors (equivalent to enumerating all c^b placements)."""
    pmf = [Fraction(0)] * (c + 1)
    total = Fraction(c) ** b
    fact = math.factorial
    for counts in _compositions(b, c):
        weight = Fraction(fact(b))
        for k in counts:
            weight /= fact(k)
        empty = sum(1 for k in counts if k == 0)
        pmf[empty] += weight / total
    return pmf


def _compositions(b, c):
    if c == 1:
        yield (b,)
        return
    for head in range(b + 1):
        for rest in _compositions(b - head, c - 1):
            yield (head,) + rest


class TestSpecValidation:
    def test_negative_balls_rejected(self):
        with pytest.raises(ValueError):
            OccupancySpec(-1, 3)

    def test_zero_boxes_rejected(self):
        with pytest.raises(ValueError):
            OccupancySpec(2, 0)

    def test_cap_exceeded(self):
        with pytest.raises(PmfUnavailableError):
            empbox_pmf(OccupancySpec(2, EXACT_PMF_CAP + 1))


class TestPmf:
    def test_zero_balls_point_mass(self):
        pmf = empbox_pmf(OccupancySpec(0, 3))
        assert pmf[3] == pytest.approx(1.0, abs=1e-12)
        assert pmf[:3] == pytest.approx([0, 0, 0], abs=1e-12)

    def test_one_ball(self):
        pmf = empbox_pmf(OccupancySpec(1, 2))
        np.testing.assert_allclose(pmf, [0.0, 1.0, 0.0], atol=1e-12)

    def test_two_balls_two_boxes(self):
        pmf = empbox_pmf(OccupancySpec(2, 2))
        np.testing.assert_allclose(pmf, [0.5, 0.5, 0.0], atol=1e-12)

    @pytest.mark.parametrize("b", range(9))
    @pytest.mark.parametrize("c", range(1, 9))
    def test_matches_enumeration(self, b, c):
        pmf = empbox_pmf(OccupancySpec(b, c))
        oracle = [float(v) for v in enumerate_empbox_pmf(b, c)]
        np.testing.assert_allclose(pmf, oracle, atol=1e-10)

    @pytest.mark.parametrize("b,c", [(5, 4), (20, 8), (100, 16), (0, 64)])
    def test_sums_to_one(self, b, c):
        pmf = empbox_pmf(OccupancySpec(b, c))
        assert abs(pmf.sum() - 1.0) <= 1e-12
        assert (pmf >= -1e-12).all()


class TestMoments:
    def test_mean_zero_balls(self):
        assert empbox_mean(OccupancySpec(0, 5)) == 5.0

    def test_mean_one_ball(self):
        assert empbox_mean(OccupancySpec(1, 2)) == pytest.approx(1.0)

    def test_mean_three_three(self):
        assert empbox_mean(OccupancySpec(3, 3)) == pytest.approx(8 / 9, abs=1e-12)

    def test_variance_deterministic_case(self):
        assert empbox_variance(OccupancySpec(0, 4)) == pytest.approx(0.0, abs=1e-12)

    def test_variance_two_two(self):
        assert empbox_variance(OccupancySpec(2, 2)) == pytest.approx(0.25, abs=1e-12)

    @pytest.mark.parametrize("b", range(9))
    @pytest.mark.parametrize("c", range(1, 9))
    def test_moments_match_pmf(self, b, c):
        pmf = empbox_pmf(OccupancySpec(b, c))
        xs = np.arange(c + 1)
        mean = float(pmf @ xs)
        var = float(pmf @ (xs - mean) ** 2)
        assert empbox_mean(OccupancySpec(b, c)) == pytest.approx(mean, abs=1e-10)
        assert empbox_variance(OccupancySpec(b, c)) == pytest.approx(var, abs=1e-10)

    def test_stable_at_large_counts(self):
        # b ~ N regime: must not underflow or lose the mean entirely.
        m = empbox_mean(OccupancySpec(10**6, 10**6))
        assert m == pytest.approx(10**6 * math.exp(10**6 * math.log1p(-1e-6)), rel=1e-12)
        assert empbox_variance(OccupancySpec(10**6, 10**6)) >= 0.0


class TestEmpboxSampler:
    def test_zero_balls(self):
        rng = np.random.default_rng(0)
        assert sample_empbox(OccupancySpec(0, 7), rng) == 7

    def test_one_ball(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            assert sample_empbox(OccupancySpec(1, 9), rng) == 8

    def test_support(self):
        rng = np.random.default_rng(1)
        for b, c in [(4, 3), (10, 4), (2, 6)]:
            lo = max(0, c - b)
            for _ in range(200):
                x = sample_empbox(OccupancySpec(b, c), rng)
                assert lo <= x <= c

    def test_chi_square_against_pmf(self):
        rng = np.random.default_rng(2)
        draws = sample_empbox_many(OccupancySpec(4, 3), rng, 10**5)
        obs = np.bincount(draws, minlength=4)
        exp = empbox_pmf(OccupancySpec(4, 3)) * 10**5
        keep = exp > 5
        _, pval = scipy.stats.chisquare(obs[keep], exp[keep] * obs[keep].sum() / exp[keep].sum())
        assert pval > 0.001

    def test_batch_matches_law(self):
        rng = np.random.default_rng(3)
        balls = np.full(10**5, 4)
        draws = sample_empbox_batch(balls, 3, rng)
        obs = np.bincount(draws, minlength=4)
        exp = empbox_pmf(OccupancySpec(4, 3)) * 10**5
        keep = exp > 5
        _, pval = scipy.stats.chisquare(obs[keep], exp[keep] * obs[keep].sum() / exp[keep].sum())
        assert pval > 0.001

    def test_batch_mixed_ball_counts(self):
        rng = np.random.default_rng(4)
        balls = np.array([0, 1, 5, 0, 3])
        out = sample_empbox_batch(balls, 4, rng)
        assert out[0] == 4 and out[3] == 4
        assert all(max(0, 4 - b) <= v <= 4 for b, v in zip(balls, out))


class TestBinomialSampler:
    def test_degenerate_q(self):
        rng = np.random.default_rng(0)
        assert sample_binomial(10, 0.0, rng) == 0
        assert sample_binomial(10, 1.0, rng) == 10

    def test_validation(self):
        rng = np.random.default_rng(0)
        with pytest.raises(ValueError):
            sample_binomial(-1, 0.5, rng)
        with pytest.raises(ValueError):
            sample_binomial(3, 1.5, rng)

    def test_clt_band(self):
        rng = np.random.default_rng(5)
        r = 10**5
        draws = np.array([sample_binomial(10, 0.3, rng) for _ in range(r)])
        band = 4 * math.sqrt(10 * 0.3 * 0.7 / r)
        assert abs(draws.mean() - 3.0) <= band


class TestBinomialPgfIdentities:
    @pytest.mark.parametrize("n", [1, 3, 7, 12])
    @pytest.mark.parametrize("q", [0.2, 0.5, 0.85])
    @pytest.mark.parametrize("s", [-0.5, 0.3, 0.9])
    def test_pgf_and_derivative(self, n, q, s):
        pmf = np.array([math.comb(n, k) * q**k * (1 - q) ** (n - k) for k in range(n + 1)])
        ks = np.arange(n + 1)
        lhs1 = float((s**ks) @ pmf)
        lhs2 = float((ks * s**ks) @ pmf)
        assert lhs1 == pytest.approx((1 - q * (1 - s)) ** n, abs=1e-10)
        assert lhs2 == pytest.approx(n * q * s * (1 - q * (1 - s)) ** (n - 1), abs=1e-10)
