import math

import numpy as np
import pytest
from scipy.stats import norm

from synthval.errors import (DegenerateSampleError, FormatError, IngestError,
                             ValidationError)
from synthval.statlab import (BootstrapResult, ContingencyTable2x2,
                              MetricSeries, bootstrap_mean_ci, chi_square_2x2,
                              ecdf_percentile, ema_update, mann_whitney_u,
                              r1_penalty, read_series, shapiro_wilk,
                              tail_fraction)

# frozen before the build from scipy.stats.shapiro on the quantile fixture
SHAPIRO_FIXTURE_W = 0.9992035683859155


def series(values):
    return MetricSeries(points=list(enumerate(values)))


class TestMetricSeries:
    def test_steps_must_increase(self):
        with pytest.raises(ValidationError):
            MetricSeries(points=[(0, 1.0), (0, 2.0)])

    def test_read_series(self, tmp_path):
        path = tmp_path / "s.csv"
        path.write_text("step,value\n1,10.5\n2,9.0\n")
        s = read_series(str(path))
        assert s.points == [(1, 10.5), (2, 9.0)]

    def test_read_series_bad_header(self, tmp_path):
        path = tmp_path / "s.csv"
        path.write_text("a,b\n1,2\n")
        with pytest.raises(FormatError):
            read_series(str(path))

    def test_read_series_names_line(self, tmp_path):
        path = tmp_path / "s.csv"
        path.write_text("step,value\n1,10.5\nx,y\n")
        with pytest.raises(FormatError, match="line 3"):
            read_series(str(path))

    def test_read_series_missing_file(self):
        with pytest.raises(IngestError):
            read_series("/nonexistent/series.csv")


class TestTailFraction:
    def test_last_three_of_ten(self):
        s = tail_fraction(series(range(10)), 0.3)
        assert s.values() == [7.0, 8.0, 9.0]

    def test_whole_series(self):
        s = series(range(5))
        assert tail_fraction(s, 1.0).points == s.points

    def test_ceiling_convention(self):
        s = tail_fraction(series(range(7)), 0.3)
        assert len(s) == 3  # ceil(2.1)


class TestBootstrap:
    def test_degenerate_distribution(self):
        r = bootstrap_mean_ci([21.0] * 10, resamples=200, seed=0)
        assert (r.mean, r.ci_low, r.ci_high) == (21.0, 21.0, 21.0)

    def test_deterministic(self, rng):
        vals = rng.normal(size=40)
        assert bootstrap_mean_ci(vals, seed=5) == bootstrap_mean_ci(vals, seed=5)

    def test_ci_brackets_mean(self, rng):
        vals = rng.normal(size=100)
        r = bootstrap_mean_ci(vals, seed=1)
        assert r.ci_low <= r.mean <= r.ci_high

    def test_ci_narrows_with_sample_size(self):
        rng = np.random.default_rng(3)
        widths = []
        for n in (20, 2000):
            w = [r.ci_high - r.ci_low for r in
                 (bootstrap_mean_ci(rng.normal(size=n), seed=s) for s in range(20))]
            widths.append(np.mean(w))
        assert widths[1] < widths[0]

    def test_rejects_bad_args(self):
        with pytest.raises(ValidationError):
            bootstrap_mean_ci([], seed=0)
        with pytest.raises(ValidationError):
            bootstrap_mean_ci([1.0], resamples=50)
        with pytest.raises(ValidationError):
            bootstrap_mean_ci([1.0], level=1.5)


class TestShapiroWilk:
    def test_normal_quantile_fixture(self):
        n = 50
        vals = norm.ppf((np.arange(1, n + 1) - 0.5) / n)
        r = shapiro_wilk(vals)
        assert abs(r.statistic - SHAPIRO_FIXTURE_W) < 0.005
        assert r.statistic > 0.99
        assert r.p_value > 0.5

    def test_rejects_exponential(self):
        rng = np.random.default_rng(8)
        rejections = sum(shapiro_wilk(rng.exponential(size=100)).p_value < 0.05
                         for _ in range(200))
        assert rejections >= 180

    def test_w_bounded_and_affine_invariant(self, rng):
        x = rng.normal(size=30)
        w = shapiro_wilk(x).statistic
        assert w <= 1.0
        assert shapiro_wilk(3.5 * x + 2.0).statistic == pytest.approx(w, abs=1e-9)

    def test_constant_sample_rejected(self):
        with pytest.raises(DegenerateSampleError):
            shapiro_wilk([1.0] * 10)

    def test_n_out_of_range(self):
        with pytest.raises(ValidationError):
            shapiro_wilk([1.0, 2.0])


class TestMannWhitneyU:
    def test_separated_samples(self):
        r = mann_whitney_u([1.0, 2.0], [3.0, 4.0])
        assert r.statistic == 0.0
        assert r.statistic + r.details["u_other"] == 4.0

    def test_identical_multisets(self):
        x = [1.0, 2.0, 3.0, 4.0]
        r = mann_whitney_u(x, list(x))
        assert r.statistic == len(x) ** 2 / 2
        assert r.p_value > 0.99

    def test_brute_force_oracle_small_samples(self):
        rng = np.random.default_rng(11)
        for _ in range(200):
            n, m = int(rng.integers(1, 9)), int(rng.integers(1, 9))
            x = rng.integers(0, 10, n).astype(float)
            y = rng.integers(0, 10, m).astype(float)
            wins = sum(1.0 for a in x for b in y if a > b)
            ties = sum(1.0 for a in x for b in y if a == b)
            assert mann_whitney_u(x, y).statistic == wins + 0.5 * ties

    def test_u_sum_identity_with_ties(self, rng):
        x = rng.integers(0, 5, 12).astype(float)
        y = rng.integers(0, 5, 9).astype(float)
        r = mann_whitney_u(x, y)
        assert r.statistic + r.details["u_other"] == 12 * 9

    def test_empty_sample_rejected(self):
        with pytest.raises(ValidationError):
            mann_whitney_u([], [1.0])

    def test_large_sample_uses_normal_approx(self, rng):
        r = mann_whitney_u(rng.normal(size=50), rng.normal(size=50) + 2.0)
        assert r.method == "mann-whitney-u-normal"
        assert r.p_value < 1e-6


class TestEcdfPercentile:
    def test_below_minimum(self):
        assert ecdf_percentile([1.0, 2.0], 0.0) == 0.0

    def test_at_maximum(self):
        assert ecdf_percentile([1.0, 2.0], 2.0) == 1.0

    def test_direct_count(self):
        assert ecdf_percentile([1, 2, 3, 4, 5], 3.0) == pytest.approx(0.6)

    def test_nondecreasing_in_query(self, rng):
        vals = rng.normal(size=30)
        qs = np.linspace(-3, 3, 20)
        ps = [ecdf_percentile(vals, q) for q in qs]
        assert all(b >= a for a, b in zip(ps, ps[1:]))


class TestChiSquare:
    def test_uniform_table(self):
        r = chi_square_2x2(ContingencyTable2x2(counts=((10, 10), (10, 10))))
        assert r.statistic == 0.0
        assert r.p_value == 1.0
        assert r.df == 1

    def test_row_swap_invariant(self):
        a = chi_square_2x2(ContingencyTable2x2(counts=((30, 10), (5, 25))))
        b = chi_square_2x2(ContingencyTable2x2(counts=((5, 25), (30, 10))))
        assert a.statistic == pytest.approx(b.statistic, rel=1e-12)

    def test_transpose_invariant(self):
        a = chi_square_2x2(ContingencyTable2x2(counts=((30, 10), (5, 25))))
        b = chi_square_2x2(ContingencyTable2x2(counts=((30, 5), (10, 25))))
        assert a.statistic == pytest.approx(b.statistic, rel=1e-12)

    def test_expected_counts_reported(self):
        r = chi_square_2x2(ContingencyTable2x2(counts=((537, 63), (60, 540))))
        assert r.details["expected_00"] == pytest.approx(298.5)
        assert r.details["expected_01"] == pytest.approx(301.5)

    def test_zero_marginal_rejected(self):
        with pytest.raises(DegenerateSampleError):
            chi_square_2x2(ContingencyTable2x2(counts=((0, 0), (5, 5))))

    def test_yates_correction_shrinks_statistic(self):
        t = ContingencyTable2x2(counts=((30, 10), (5, 25)))
        assert (chi_square_2x2(t, yates=True).statistic
                < chi_square_2x2(t, yates=False).statistic)


class TestEmaUpdate:
    def test_beta_one_keeps_current(self):
        assert np.array_equal(ema_update([1.0, 2.0], [5.0, 5.0], 1.0), [1.0, 2.0])

    def test_beta_zero_takes_incoming(self):
        assert np.array_equal(ema_update([1.0, 2.0], [5.0, 5.0], 0.0), [5.0, 5.0])

    def test_one_step_with_paper_beta(self):
        assert ema_update([1.0], [0.0], 0.998) == pytest.approx([0.998])

    def test_shape_mismatch(self):
        with pytest.raises(ValidationError):
            ema_update([1.0], [1.0, 2.0], 0.5)


class TestR1Penalty:
    def test_constant_field(self, rng):
        assert r1_penalty(lambda x: 3.0, [rng.normal(size=3)]) == 0.0

    def test_linear_field(self, rng):
        a = 1.7
        val = r1_penalty(lambda x: a * x[0], [rng.normal(size=1) for _ in range(4)],
                         gamma=8.0)
        assert val == pytest.approx(4.0 * a * a, rel=1e-4)

    def test_quadratic_field(self):
        val = r1_penalty(lambda x: float(x @ x),
                         [np.array([1.0, 0.0]), np.array([0.0, 2.0])], gamma=8.0)
        assert val == pytest.approx(40.0, rel=1e-4)

    def test_cubic_field_matches_analytic(self):
        # f(x) = x^3 at x=2: grad 12, ||grad||^2 = 144
        val = r1_penalty(lambda x: float(x[0] ** 3), [np.array([2.0])], gamma=2.0)
        assert val == pytest.approx(144.0, rel=1e-4)

    def test_nonfinite_field_rejected(self):
        with pytest.raises(ValidationError):
            r1_penalty(lambda x: float("inf"), [np.array([1.0])])
