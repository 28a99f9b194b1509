#include "helpers.hpp"

#include "tsintel/forecast/ets.hpp"
#include "tsintel/forecast/sarima.hpp"
#include "tsintel/forecast/tree_forecaster.hpp"
#include "tsintel/forecast/var.hpp"

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include <numeric>
#include <random>

using namespace tsi;
using namespace tsi::testing;

namespace {

double sample_mean(const std::vector<double> &v) {
	return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// slope of y_t on y_{t-1} (with intercept) by closed-form least squares
double ols_ar1(const std::vector<double> &y) {
	const std::size_t n = y.size() - 1;
	double sx = 0, sy = 0, sxx = 0, sxy = 0;
	for (std::size_t t = 1; t <= n; ++t) {
		sx += y[t - 1];
		sy += y[t];
		sxx += y[t - 1] * y[t - 1];
		sxy += y[t - 1] * y[t];
	}
	const double nn = static_cast<double>(n);
	return (nn * sxy - sx * sy) / (nn * sxx - sx * sx);
}

std::vector<double> ramp(std::size_t n, double slope, double start = 10.0) {
	std::vector<double> v(n);
	for (std::size_t i = 0; i < n; ++i) {
		v[i] = start + slope * static_cast<double>(i);
	}
	return v;
}

// smallest root modulus of 1 - a_1 z - ... - a_k z^k via companion eigenvalues (reciprocal roots)
double min_root_modulus(const std::vector<double> &a) {
	const auto k = static_cast<Eigen::Index>(a.size());
	Eigen::MatrixXd c = Eigen::MatrixXd::Zero(k, k);
	for (Eigen::Index i = 0; i < k; ++i) {
		c(0, i) = a[static_cast<std::size_t>(i)];
	}
	for (Eigen::Index i = 1; i < k; ++i) {
		c(i, i - 1) = 1.0;
	}
	const double r = c.eigenvalues().cwiseAbs().maxCoeff();
	return r > 0 ? 1.0 / r : std::numeric_limits<double>::infinity();
}

} // namespace

TEST(Sarima, WhiteNoiseMeanAndAic) {
	const auto y = gaussian(300, 1, 2.0, 5.0);
	SarimaOrders o;
	const auto p = sarima_fit(y, o);
	EXPECT_NEAR(p.mean, sample_mean(y), 1e-4);
	double sse = 0;
	for (double v : y) {
		sse += (v - p.mean) * (v - p.mean);
	}
	const double n = static_cast<double>(p.n_used);
	EXPECT_TRUE(std::isfinite(p.aic));
	EXPECT_NEAR(p.aic, n * std::log(p.sse / n) + 2.0 * 2.0, 1e-9);
	EXPECT_NEAR(p.sse, sse, 1e-6 * sse);
}

TEST(Sarima, Ar1CoefficientMatchesOls) {
	const auto y = ar1(2000, 0.8, 11);
	SarimaOrders o;
	o.p = 1;
	const auto p = sarima_fit(y, o);
	ASSERT_EQ(p.phi.size(), 1u);
	EXPECT_NEAR(p.phi[0], 0.8, 0.1);
	EXPECT_NEAR(p.phi[0], ols_ar1(y), 0.01);
}

TEST(Sarima, RandomWalkOnRampHasZeroResiduals) {
	const auto y = ramp(50, 2.0);
	SarimaOrders o;
	o.d = 1;
	const auto p = sarima_fit(y, o);
	EXPECT_NEAR(p.mean, 2.0, 1e-6);
	EXPECT_LT(p.sse, 1e-8);
	const auto f = sarima_forecast(p, y, 3);
	for (std::size_t h = 0; h < 3; ++h) {
		EXPECT_NEAR(f.values[h], y.back() + 2.0 * static_cast<double>(h + 1), 1e-5);
	}
}

TEST(Sarima, HandRecursionAr1) {
	SarimaParams p;
	p.orders.p = 1;
	p.orders.intercept = false;
	p.phi = {0.5};
	p.sigma2 = 1.0;
	const std::vector<double> hist{3, 1, 8};
	const auto f = sarima_forecast(p, hist, 2);
	EXPECT_DOUBLE_EQ(f.values[0], 4.0);
	EXPECT_DOUBLE_EQ(f.values[1], 2.0);
	// psi weights 1, 0.5: se_2 = sqrt(1 + 0.25)
	EXPECT_DOUBLE_EQ(f.stderrs[0], 1.0);
	EXPECT_DOUBLE_EQ(f.stderrs[1], std::sqrt(1.25));
}

TEST(Sarima, FlatForecastWithoutDynamics) {
	SarimaParams p;
	p.mean = 7.5;
	p.sigma2 = 4.0;
	const auto f = sarima_forecast(p, std::vector<double>{1, 2, 3}, 4);
	for (double v : f.values) {
		EXPECT_DOUBLE_EQ(v, 7.5);
	}
}

TEST(Sarima, StderrPositiveNonDecreasing) {
	const auto y = ar1(400, 0.6, 5);
	SarimaOrders o;
	o.p = 1;
	o.q = 1;
	o.d = 1;
	o.intercept = false;
	const auto p = sarima_fit(y, o);
	const auto f = sarima_forecast(p, y, 12);
	for (std::size_t h = 0; h < 12; ++h) {
		EXPECT_GT(f.stderrs[h], 0.0);
		if (h > 0) {
			EXPECT_GE(f.stderrs[h], f.stderrs[h - 1]);
		}
	}
}

TEST(Sarima, SeasonalRequiresPeriodAndLength) {
	SarimaOrders o;
	o.P = 1;
	EXPECT_THROW(sarima_fit(gaussian(100, 1), o), SpecError);
	SarimaOrders s;
	s.p = 2;
	s.q = 2;
	s.m = 12;
	s.P = 1;
	s.D = 1;
	EXPECT_THROW(sarima_fit(gaussian(20, 1), s), SpecError);
}

TEST(Sarima, LagPolyStableMatchesCompanionRoots) {
	std::mt19937_64 rng(31);
	std::uniform_real_distribution<double> u(-1.5, 1.5);
	int checked = 0;
	for (int rep = 0; rep < 2000; ++rep) {
		std::vector<double> a(1 + rep % 6);
		for (auto &v : a) {
			v = u(rng) / static_cast<double>(a.size());
		}
		const double r = min_root_modulus(a);
		if (std::abs(r - 1.0) < 1e-6) {
			continue;
		}
		EXPECT_EQ(lag_poly_stable(a), r > 1.0) << rep;
		++checked;
	}
	EXPECT_GT(checked, 1900);
	EXPECT_TRUE(lag_poly_stable(std::vector<double>{}));
	EXPECT_FALSE(lag_poly_stable(std::vector<double>{1.0}));
	EXPECT_TRUE(lag_poly_stable(std::vector<double>{0.5, 0.3}));
}

TEST(Sarima, NearUnitRootUsesExpandedPolynomials) {
	SarimaParams p;
	p.orders.p = 1;
	p.orders.m = 4;
	p.orders.Q = 1;
	p.phi = {0.5};
	p.seasonal_theta = {0.3};
	EXPECT_FALSE(sarima_near_unit_root(p));
	// seasonal MA root modulus 0.995^(-1/4) ~ 1.0013
	p.seasonal_theta = {-0.995};
	EXPECT_GT(min_root_modulus(sarima_ma_poly(p)), 1.0);
	EXPECT_LT(min_root_modulus(sarima_ma_poly(p)), 1.01);
	EXPECT_TRUE(sarima_near_unit_root(p));
	EXPECT_FALSE(sarima_near_unit_root(p, 1.001));
	p.seasonal_theta = {0.3};
	p.phi = {0.995};
	EXPECT_TRUE(sarima_near_unit_root(p));
}

TEST(Sarima, InsufficientHistory) {
	SarimaParams p;
	p.orders.p = 3;
	p.phi = {0.1, 0.1, 0.1};
	EXPECT_THROW(sarima_forecast(p, std::vector<double>{1.0}, 1), HistoryError);
}

TEST(Sarima, ForecasterStampsAndPrevConditioning) {
	const auto ts = uni(ar1(200, 0.7, 3));
	SarimaOrders o;
	o.p = 1;
	Sarima m(o);
	m.train(ts);
	const std::vector<Timestamp> want{200 * 3600, 201 * 3600, 205 * 3600};
	const auto f = m.forecast(want);
	EXPECT_EQ(f.stamps, want);
	const auto g = m.forecast(want, &ts);
	EXPECT_EQ(f.values, g.values);
	const auto head = ts.slice_rows(0, 150);
	const auto h = m.forecast(std::vector<Timestamp>{150 * 3600}, &head);
	EXPECT_NEAR(h.values[0], m.params().mean + m.params().phi[0] * (head.univariate(0).values().back() - m.params().mean),
	            1e-9);
}

TEST(Ets, SimpleSmoothingFlatAtFinalLevel) {
	const auto y = gaussian(200, 8, 1.0, 20.0);
	const auto p = ets_fit(y, EtsSpec{});
	const auto st = ets_filter(p, y);
	const auto f = ets_forecast(p, y, 5);
	for (double v : f.values) {
		EXPECT_DOUBLE_EQ(v, st.level);
	}
}

TEST(Ets, TrendRecoversSlope) {
	const auto y = ramp(100, 0.75);
	const auto p = ets_fit(y, EtsSpec{true, false, 1});
	const auto f = ets_forecast(p, y, 3);
	EXPECT_NEAR(f.values[1] - f.values[0], 0.75, 1e-3);
	EXPECT_NEAR(f.values[0], y.back() + 0.75, 1e-3);
}

TEST(Ets, SeasonRepeatsPeriod) {
	std::vector<double> y;
	for (int i = 0; i < 48; ++i) {
		y.push_back((std::vector<double>{10, 14, 8, 12})[i % 4]);
	}
	const auto p = ets_fit(y, EtsSpec{false, true, 4});
	const auto f = ets_forecast(p, y, 8);
	for (std::size_t h = 0; h < 8; ++h) {
		EXPECT_NEAR(f.values[h], y[(48 + h) % 4], 1e-3);
	}
}

TEST(Ets, PeriodTooLong) {
	EXPECT_THROW(ets_fit(gaussian(10, 1), EtsSpec{false, true, 10}), SpecError);
}

TEST(Ets, ConstantStderr) {
	Ets m;
	m.train(uni(gaussian(100, 4, 1.0, 3.0)));
	const auto f = m.forecast(4);
	ASSERT_TRUE(f.has_stderr());
	for (double s : f.stderrs) {
		EXPECT_GT(s, 0.0);
	}
}

TEST(Var, LaggedCopyCoefficient) {
	const auto x = gaussian(300, 21);
	RowMatrix data(300, 2);
	for (int t = 0; t < 300; ++t) {
		data(t, 0) = x[static_cast<std::size_t>(t)];
		data(t, 1) = t > 0 ? x[static_cast<std::size_t>(t - 1)] : 0.0;
	}
	const auto m = var_fit_order(data.bottomRows(299), 1);
	EXPECT_NEAR(m.lag_coefs[0](1, 0), 1.0, 1e-6);
	EXPECT_NEAR(m.lag_coefs[0](1, 1), 0.0, 1e-6);
}

TEST(Var, UnivariateReducesToAr) {
	const auto y = ar1(500, 0.5, 9);
	RowMatrix data(500, 1);
	for (int t = 0; t < 500; ++t) {
		data(t, 0) = y[static_cast<std::size_t>(t)];
	}
	const auto m = var_fit_order(data, 1);
	EXPECT_NEAR(m.lag_coefs[0](0, 0), ols_ar1(y), 1e-9);
}

TEST(Var, OrderZeroIsFlatMean) {
	const auto y = gaussian(100, 2, 1.0, 4.0);
	RowMatrix data(100, 1);
	for (int t = 0; t < 100; ++t) {
		data(t, 0) = y[static_cast<std::size_t>(t)];
	}
	const auto m = var_fit_order(data, 0);
	const auto f = var_forecast(m, data, 3);
	for (int h = 0; h < 3; ++h) {
		EXPECT_NEAR(f(h, 0), sample_mean(y), 1e-9);
	}
}

TEST(Var, RequiresAlignment) {
	TimeSeries ts({UnivariateTimeSeries("a", {0, 60, 120}, {1, 2, 3}), UnivariateTimeSeries("b", {0, 60}, {1, 2})});
	VarForecaster v;
	EXPECT_THROW(v.train(ts), AlignmentError);
}

namespace {

TreeEnsembleParams exact_gb() {
	TreeEnsembleParams p;
	p.n_trees = 1;
	p.learning_rate = 1.0;
	p.max_depth = -1;
	return p;
}

TimeSeries two_var(std::size_t n, std::uint64_t seed) {
	const auto a = ar1(n, 0.8, seed);
	const auto b = gaussian(n, seed + 100);
	return TimeSeries({"a", "b"}, grid(n), {a, b});
}

} // namespace

TEST(Trees, ConstantSeriesGivesConstantForecast) {
	ForecasterConfig cfg;
	cfg.max_lags = 5;
	TreeForecaster m({}, cfg);
	m.train(uni(std::vector<double>(60, 4.25)));
	for (double v : m.forecast(5).values) {
		EXPECT_DOUBLE_EQ(v, 4.25);
	}
}

TEST(Trees, MemorizesIncrementMap) {
	ForecasterConfig cfg;
	cfg.max_lags = 3;
	TreeForecaster m(exact_gb(), cfg);
	const auto ts = uni(ramp(80, 1.0, 0.0));
	m.train(ts);
	const auto one = m.one_step(ts);
	for (std::size_t i = 0; i < one.size(); ++i) {
		const auto idx = static_cast<std::size_t>(one.stamps[i] / 3600);
		EXPECT_NEAR(one.values[i], static_cast<double>(idx), 1e-9);
	}
}

TEST(Trees, RolloutEqualsChainedPredictions) {
	for (auto kind : {EnsembleKind::GradientBoosting, EnsembleKind::RandomForest}) {
		TreeEnsembleParams p;
		p.kind = kind;
		p.n_trees = 20;
		p.seed = 4;
		ForecasterConfig cfg;
		cfg.max_lags = 4;
		TreeForecaster m(p, cfg);
		const auto ts = two_var(120, 7);
		m.train(ts);
		std::vector<std::vector<double>> window;
		for (std::size_t r = 116; r < 120; ++r) {
			window.push_back({ts.univariate(0).value(r), ts.univariate(1).value(r)});
		}
		const auto f = m.forecast(3);
		for (std::size_t h = 0; h < 3; ++h) {
			const auto next = m.predict_next(std::span<const std::vector<double>>(window).last(4));
			EXPECT_DOUBLE_EQ(f.values[h], next[0]);
			window.push_back(next);
		}
	}
}

TEST(Trees, DeterministicPerSeed) {
	TreeEnsembleParams p;
	p.kind = EnsembleKind::RandomForest;
	p.n_trees = 10;
	p.seed = 99;
	ForecasterConfig cfg;
	cfg.max_lags = 5;
	const auto ts = two_var(100, 1);
	TreeForecaster a(p, cfg), b(p, cfg);
	a.train(ts);
	b.train(ts);
	EXPECT_EQ(a.forecast(5).values, b.forecast(5).values);
}

TEST(Trees, Preconditions) {
	ForecasterConfig cfg;
	cfg.max_lags = 10;
	TreeForecaster m({}, cfg);
	EXPECT_THROW(m.train(uni(gaussian(11, 1))), SpecError);
	TimeSeries bad({UnivariateTimeSeries("a", grid(40), gaussian(40, 1)),
	                UnivariateTimeSeries("b", grid(39), gaussian(39, 2))});
	EXPECT_THROW(m.train(bad), AlignmentError);
}

TEST(Trees, ReportsResidualSigma) {
	ForecasterConfig cfg;
	cfg.max_lags = 5;
	TreeEnsembleParams p;
	p.n_trees = 10;
	TreeForecaster m(p, cfg);
	m.train(uni(ar1(150, 0.5, 2)));
	const auto f = m.forecast(3);
	ASSERT_TRUE(f.has_stderr());
	EXPECT_GT(f.stderrs[0], 0.0);
	EXPECT_EQ(f.stderrs[0], f.stderrs[2]);
}
