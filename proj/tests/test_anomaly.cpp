#include "helpers.hpp"

#include "tsintel/anomaly/detectors.hpp"
#include "tsintel/forecast/forecaster.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <complex>
#include <numeric>

using namespace tsi;
using namespace tsi::testing;

namespace {

constexpr Timestamp kMonday = 4 * 86400; // 1970-01-05T00:00Z

double sd_of(const std::vector<double> &v) {
	const double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
	double ss = 0;
	for (double x : v) {
		ss += (x - m) * (x - m);
	}
	return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

} // namespace

TEST(WindStats, BucketsStartMonday) {
	EXPECT_EQ(week_bucket(kMonday, 6 * 3600), 0u);
	EXPECT_EQ(week_bucket(kMonday - 1, 6 * 3600), 27u);
	EXPECT_EQ(week_bucket(0, 6 * 3600), 12u); // Thursday 00:00
}

TEST(WindStats, HandFormula) {
	// three Mondays 00:00 with values 8, 10, 12: bucket mean 10, sample sd 2
	const std::vector<Timestamp> t{kMonday, kMonday + 604800, kMonday + 2 * 604800};
	WindStats w;
	w.train(TimeSeries::from_univariate(UnivariateTimeSeries("x", t, {8, 10, 12})));
	EXPECT_FALSE(w.global_fallback());
	const auto s = w.score(TimeSeries::from_univariate(UnivariateTimeSeries("x", {kMonday + 3 * 604800}, {16})));
	EXPECT_DOUBLE_EQ(s.scores[0], 3.0);
	const auto z = w.score(TimeSeries::from_univariate(UnivariateTimeSeries("x", {kMonday + 3 * 604800}, {10})));
	EXPECT_DOUBLE_EQ(z.scores[0], 0.0);
}

TEST(WindStats, BucketStatsMatchBruteForce) {
	const std::size_t n = 24 * 21;
	const auto v = gaussian(n, 5, 3.0, 50.0);
	const auto ts = uni(v, 3600, kMonday + 7200);
	WindStats w;
	w.train(ts);
	std::vector<std::vector<double>> by(28);
	for (std::size_t i = 0; i < n; ++i) {
		const Timestamp t = kMonday + 7200 + static_cast<Timestamp>(i) * 3600;
		const auto days = t / 86400;
		const auto weekday = (days + 3) % 7; // Monday = 0
		const auto hour = (t % 86400) / 3600;
		by[static_cast<std::size_t>(weekday * 4 + hour / 6)].push_back(v[i]);
	}
	for (std::size_t b = 0; b < 28; ++b) {
		const double m = std::accumulate(by[b].begin(), by[b].end(), 0.0) / static_cast<double>(by[b].size());
		EXPECT_NEAR(w.bucket_mean(b), m, 1e-10);
		EXPECT_NEAR(w.bucket_sd(b), sd_of(by[b]), 1e-10);
	}
}

TEST(WindStats, ShortHistoryFallsBackToGlobal) {
	const auto v = gaussian(100, 2);
	WindStats w;
	w.train(uni(v));
	EXPECT_TRUE(w.global_fallback());
	const auto s = w.score(uni({v[0]}));
	const double m = std::accumulate(v.begin(), v.end(), 0.0) / 100.0;
	EXPECT_NEAR(s.scores[0], (v[0] - m) / sd_of(v), 1e-12);
}

TEST(WindStats, ShiftInvariances) {
	const auto v = gaussian(24 * 21, 8, 2.0);
	const auto ts = uni(v, 3600, kMonday);
	WindStats a, b, c;
	const auto base = a.train(ts);
	// whole weeks preserve weekday
	const auto shifted = b.train(uni(v, 3600, kMonday + 3 * 604800));
	EXPECT_EQ(base.scores, shifted.scores);
	auto plus = v;
	for (auto &x : plus) {
		x += 1000.0;
	}
	const auto lifted = c.train(uni(plus, 3600, kMonday));
	for (std::size_t i = 0; i < v.size(); ++i) {
		EXPECT_NEAR(base.scores[i], lifted.scores[i], 1e-9);
	}
}

TEST(Zms, LagSet) {
	EXPECT_EQ(zms_lags(64), (std::vector<std::size_t>{1, 2, 4, 8}));
	EXPECT_EQ(zms_lags(8), (std::vector<std::size_t>{1}));
	EXPECT_EQ(zms_lags(3), (std::vector<std::size_t>{1}));
	EXPECT_EQ(zms_lags(1000), (std::vector<std::size_t>{1, 2, 4, 8, 16, 32, 64}));
}

TEST(Zms, ConstantSeriesScoresZero) {
	Zms z;
	const auto s = z.train(uni(std::vector<double>(64, 3.0)));
	for (double v : s.scores) {
		EXPECT_EQ(v, 0.0);
	}
	EXPECT_TRUE(z.lags().empty());
}

TEST(Zms, LevelShiftHandComputed) {
	const auto v = gaussian(256, 4);
	Zms z;
	z.train(uni(v));
	auto w = v;
	const double jump = 10.0 * z.lag_sd(0);
	std::vector<double> test(w.end() - 16, w.end());
	for (std::size_t i = 8; i < 16; ++i) {
		test[i] += jump;
	}
	const auto prev = uni(std::vector<double>(v.begin(), v.end() - 16));
	const auto s = z.score(uni(test, 3600, 240 * 3600), &prev);
	const double d1 = (test[8] - test[7] - z.lag_mean(0)) / z.lag_sd(0);
	EXPECT_GE(s.scores[8], d1);
	EXPECT_GT(s.scores[8], 8.0);
}

TEST(Zms, ScoreIsMaxOverLags) {
	const auto v = gaussian(128, 6);
	Zms z;
	const auto s = z.train(uni(v));
	const auto &lags = z.lags();
	for (std::size_t t = 0; t < v.size(); ++t) {
		double best = -INFINITY;
		bool any = false;
		for (std::size_t i = 0; i < lags.size(); ++i) {
			if (t >= lags[i]) {
				best = std::max(best, (v[t] - v[t - lags[i]] - z.lag_mean(i)) / z.lag_sd(i));
				any = true;
			}
		}
		EXPECT_DOUBLE_EQ(s.scores[t], any ? best : 0.0);
	}
}

TEST(Zms, AddingConstantLeavesScores) {
	const auto v = gaussian(200, 12);
	auto w = v;
	for (auto &x : w) {
		x += 512.0;
	}
	Zms a, b;
	const auto sa = a.train(uni(v));
	const auto sb = b.train(uni(w));
	for (std::size_t i = 0; i < v.size(); ++i) {
		EXPECT_NEAR(sa.scores[i], sb.scores[i], 1e-9);
	}
}

namespace {

std::vector<std::complex<double>> naive_dft(const std::vector<std::complex<double>> &x, double sign) {
	const std::size_t n = x.size();
	std::vector<std::complex<double>> out(n);
	for (std::size_t k = 0; k < n; ++k) {
		std::complex<double> s = 0;
		for (std::size_t j = 0; j < n; ++j) {
			const double a = sign * 2.0 * std::numbers::pi * static_cast<double>(j * k % n) / static_cast<double>(n);
			s += x[j] * std::complex<double>(std::cos(a), std::sin(a));
		}
		out[k] = s;
	}
	return out;
}

// Spectral residual saliency written out directly from the method's description.
std::vector<double> saliency_oracle(const std::vector<double> &v, std::size_t q, std::size_t ext) {
	std::vector<std::complex<double>> x(v.begin(), v.end());
	const std::size_t n = v.size();
	std::vector<double> prior(v.end() - 7, v.end() - 1);
	double slope_sum = 0.0;
	for (std::size_t i = 0; i + 1 < prior.size(); ++i) {
		slope_sum += (prior.back() - prior[i]) / static_cast<double>(prior.size() - 1 - i);
	}
	const double next = prior[1] + slope_sum;
	for (std::size_t i = 0; i < ext; ++i) {
		x.emplace_back(next, 0.0);
	}
	const std::size_t N = x.size();
	auto X = naive_dft(x, -1.0);
	std::vector<double> lm(N);
	for (std::size_t k = 0; k < N; ++k) {
		lm[k] = std::abs(X[k]) <= 1e-8 ? 0.0 : std::log(std::abs(X[k]));
	}
	for (std::size_t k = 0; k < N; ++k) {
		double s = 0.0;
		std::size_t c = 0;
		for (std::size_t j = k + 1 >= q ? k + 1 - q : 0; j <= k; ++j) {
			s += lm[j];
			++c;
		}
		const double avg = s / static_cast<double>(c);
		const double mag = std::abs(X[k]);
		X[k] = mag <= 1e-8 ? 0.0 : X[k] / mag * std::exp(lm[k] - avg);
	}
	const auto back = naive_dft(X, 1.0);
	std::vector<double> out(n);
	for (std::size_t i = 0; i < n; ++i) {
		out[i] = std::abs(back[i]) / static_cast<double>(N);
	}
	return out;
}

} // namespace

TEST(SpectralResidual, MatchesDirectDft) {
	for (std::uint64_t seed = 0; seed < 5; ++seed) {
		auto v = gaussian(32, seed);
		v[static_cast<std::size_t>(seed * 5 + 3)] += 6.0;
		const auto got = spectral_residual_saliency(v, 3, 5);
		const auto want = saliency_oracle(v, 3, 5);
		ASSERT_EQ(got.size(), want.size());
		for (std::size_t i = 0; i < v.size(); ++i) {
			EXPECT_NEAR(got[i], want[i], 1e-10);
		}
	}
}

TEST(SpectralResidual, SpikeHasMaxSaliency) {
	std::vector<double> v(32, 1.0);
	v[13] = 10.0;
	const auto s = spectral_residual_saliency(v, 3, 5);
	EXPECT_EQ(std::max_element(s.begin(), s.end()) - s.begin(), 13);
}

TEST(SpectralResidual, DcSignalIsFlatAndSmall) {
	const std::vector<double> v(32, 5.0);
	const auto s = spectral_residual_saliency(v, 3, 5);
	for (double x : s) {
		EXPECT_NEAR(x, s[0], 1e-12);
		EXPECT_LE(x, 1.0 / 37.0 + 1e-12);
	}
	const auto z = spectral_residual_saliency(std::vector<double>(32, 0.0), 3, 5);
	for (double x : z) {
		EXPECT_EQ(x, 0.0);
	}
}

TEST(SpectralResidual, OutlierInSinusoidAboveP99) {
	auto v = sine(400, 24, 5.0);
	const auto noise = gaussian(400, 3, 0.1);
	for (std::size_t i = 0; i < v.size(); ++i) {
		v[i] += noise[i];
	}
	v[300] += 8.0;
	SpectralResidual sr;
	const auto s = sr.train(uni(v));
	std::vector<double> others;
	for (std::size_t i = 0; i < s.size(); ++i) {
		if (i != 300) {
			others.push_back(s.scores[i]);
		}
	}
	std::sort(others.begin(), others.end());
	EXPECT_GT(s.scores[300], others[static_cast<std::size_t>(0.99 * static_cast<double>(others.size()))]);
}

TEST(SpectralResidual, ShortPrefixScoresZero) {
	SpectralResidual sr;
	const auto s = sr.train(uni(gaussian(20, 1)));
	for (std::size_t i = 0; i < 7; ++i) {
		EXPECT_EQ(s.scores[i], 0.0);
	}
	EXPECT_THROW(SpectralResidual(SpectralResidualConfig{7, 3, 5, 0}), InvalidArgument);
}

TEST(SpectralResidual, TimeShiftEquivariant) {
	const auto v = gaussian(100, 9);
	SpectralResidual a, b;
	EXPECT_EQ(a.train(uni(v)).scores, b.train(uni(v, 3600, 86400 * 10)).scores);
}

TEST(IsolationForest, PathConstant) {
	EXPECT_EQ(isolation_c(1), 0.0);
	EXPECT_EQ(isolation_c(2), 1.0);
	// 2 H(255) - 2*255/256; the log approximation of H is off by about 1/(2*255)
	double h = 0.0;
	for (int i = 1; i <= 255; ++i) {
		h += 1.0 / i;
	}
	EXPECT_NEAR(isolation_c(256), 2.0 * h - 2.0 * 255.0 / 256.0, 5e-3);
}

TEST(IsolationForest, WindowFeaturesPadWithFirstRow) {
	const TimeSeries ts({"a", "b"}, grid(3), {{1, 2, 3}, {10, 20, 30}});
	const auto f = window_features(ts, 2);
	EXPECT_EQ(f[0], (std::vector<double>{1, 10, 1, 10}));
	EXPECT_EQ(f[2], (std::vector<double>{2, 20, 3, 30}));
}

TEST(IsolationForest, SinglePointIsHalf) {
	IsolationForestConfig c;
	c.window = 3;
	IsolationForest f(c);
	const auto s = f.train(uni({1, 2, 3}).slice_rows(0, 1));
	ASSERT_EQ(s.size(), 1u);
	EXPECT_EQ(s.scores[0], 0.5);
}

TEST(IsolationForest, OutlierRanksFirstAndScoresBounded) {
	auto v = gaussian(500, 17);
	v[250] = 12.0;
	IsolationForestConfig c;
	c.window = 1;
	c.seed = 5;
	IsolationForest f(c);
	const auto s = f.train(uni(v));
	EXPECT_EQ(std::max_element(s.scores.begin(), s.scores.end()) - s.scores.begin(), 250);
	for (double x : s.scores) {
		EXPECT_GE(x, 0.0);
		EXPECT_LE(x, 1.0);
	}
}

TEST(IsolationForest, DeterministicPerSeed) {
	const auto ts = uni(gaussian(300, 2));
	IsolationForestConfig c;
	c.seed = 42;
	IsolationForest a(c), b(c);
	EXPECT_EQ(a.train(ts).scores, b.train(ts).scores);
}

namespace {

// Independent isolation-tree construction following the same random draws.
struct OracleTree {
	struct N {
		int f = -1;
		double s = 0;
		std::unique_ptr<OracleTree::N> l, r;
		std::size_t size = 0;
	};
	std::unique_ptr<N> root;
};

std::unique_ptr<OracleTree::N> oracle_grow(const std::vector<std::vector<double>> &X, std::vector<std::size_t> idx,
                                           std::size_t depth, std::size_t limit, std::mt19937_64 &rng) {
	auto node = std::make_unique<OracleTree::N>();
	node->size = idx.size();
	if (depth >= limit || idx.size() <= 1) {
		return node;
	}
	std::vector<std::size_t> feats;
	for (std::size_t f = 0; f < X[0].size(); ++f) {
		double lo = INFINITY, hi = -INFINITY;
		for (auto i : idx) {
			lo = std::min(lo, X[i][f]);
			hi = std::max(hi, X[i][f]);
		}
		if (hi > lo) {
			feats.push_back(f);
		}
	}
	if (feats.empty()) {
		return node;
	}
	const std::size_t f = feats[std::uniform_int_distribution<std::size_t>(0, feats.size() - 1)(rng)];
	double lo = INFINITY, hi = -INFINITY;
	for (auto i : idx) {
		lo = std::min(lo, X[i][f]);
		hi = std::max(hi, X[i][f]);
	}
	double s = lo + std::uniform_real_distribution<double>(0.0, 1.0)(rng) * (hi - lo);
	if (!(s > lo)) {
		s = (lo + hi) / 2;
	}
	std::vector<std::size_t> L, R;
	for (auto i : idx) {
		(X[i][f] < s ? L : R).push_back(i);
	}
	node->f = static_cast<int>(f);
	node->s = s;
	node->l = oracle_grow(X, L, depth + 1, limit, rng);
	node->r = oracle_grow(X, R, depth + 1, limit, rng);
	return node;
}

double oracle_c(std::size_t n) {
	if (n <= 1) {
		return 0;
	}
	if (n == 2) {
		return 1;
	}
	return 2.0 * (std::log(static_cast<double>(n - 1)) + 0.5772156649015329) -
	       2.0 * static_cast<double>(n - 1) / static_cast<double>(n);
}

double oracle_path(const OracleTree::N *n, const std::vector<double> &x) {
	double d = 0;
	while (n->f >= 0) {
		n = x[static_cast<std::size_t>(n->f)] < n->s ? n->l.get() : n->r.get();
		d += 1;
	}
	return d + oracle_c(n->size);
}

std::vector<double> oracle_scores(const std::vector<std::vector<double>> &X, std::size_t trees, std::size_t psi_cfg,
                                  std::uint64_t seed) {
	const std::size_t psi = std::min(psi_cfg, X.size());
	const auto limit = static_cast<std::size_t>(std::ceil(std::log2(static_cast<double>(psi))));
	std::mt19937_64 rng(seed);
	std::vector<std::unique_ptr<OracleTree::N>> forest;
	for (std::size_t t = 0; t < trees; ++t) {
		std::vector<std::size_t> p(X.size());
		std::iota(p.begin(), p.end(), 0U);
		for (std::size_t i = 0; i < psi; ++i) {
			std::swap(p[i], p[std::uniform_int_distribution<std::size_t>(i, p.size() - 1)(rng)]);
		}
		p.resize(psi);
		forest.push_back(oracle_grow(X, p, 0, limit, rng));
	}
	std::vector<double> out;
	for (const auto &x : X) {
		double tot = 0;
		for (const auto &t : forest) {
			tot += oracle_path(t.get(), x);
		}
		out.push_back(psi <= 1 ? 0.5 : std::exp2(-(tot / static_cast<double>(trees)) / oracle_c(psi)));
	}
	return out;
}

} // namespace

TEST(IsolationForest, MatchesBruteForceConstruction) {
	std::mt19937_64 gen(1);
	for (int rep = 0; rep < 40; ++rep) {
		const std::size_t n = 2 + gen() % 15;
		const std::size_t d = 1 + gen() % 3;
		std::vector<std::vector<double>> X(n, std::vector<double>(d));
		for (auto &r : X) {
			for (auto &x : r) {
				x = static_cast<double>(gen() % 20);
			}
		}
		IsolationForestConfig c;
		c.n_trees = 1 + gen() % 3;
		c.subsample = 4 + gen() % 16;
		c.seed = gen();
		IsolationForest f(c);
		f.fit_rows(X);
		const auto want = oracle_scores(X, c.n_trees, c.subsample, c.seed);
		for (std::size_t i = 0; i < n; ++i) {
			EXPECT_DOUBLE_EQ(f.score_row(X[i]), want[i]);
		}
	}
}

TEST(IsolationForest, RankInvariantUnderPowerOfTwoFeatureScaling) {
	std::mt19937_64 gen(2);
	for (int rep = 0; rep < 40; ++rep) {
		const std::size_t n = 4 + gen() % 13;
		std::vector<std::vector<double>> X(n, std::vector<double>(2));
		for (auto &r : X) {
			r[0] = static_cast<double>(gen() % 50) / 7.0;
			r[1] = static_cast<double>(gen() % 50) / 3.0;
		}
		auto Y = X;
		for (auto &r : Y) {
			r[0] *= 8.0;
			r[1] *= 0.25;
		}
		IsolationForestConfig c;
		c.n_trees = 1 + gen() % 3;
		c.seed = gen();
		IsolationForest a(c), b(c);
		a.fit_rows(X);
		b.fit_rows(Y);
		std::vector<double> sa, sb;
		for (std::size_t i = 0; i < n; ++i) {
			sa.push_back(a.score_row(X[i]));
			sb.push_back(b.score_row(Y[i]));
		}
		std::vector<std::size_t> ra(n), rb(n);
		std::iota(ra.begin(), ra.end(), 0U);
		std::iota(rb.begin(), rb.end(), 0U);
		std::stable_sort(ra.begin(), ra.end(), [&](auto i, auto j) { return sa[i] < sa[j]; });
		std::stable_sort(rb.begin(), rb.end(), [&](auto i, auto j) { return sb[i] < sb[j]; });
		EXPECT_EQ(ra, rb);
	}
}

namespace {

// Predicts `level` with standard error `se` regardless of history.
class FixedForecaster : public Forecaster {
public:
	FixedForecaster(double level, double se) : Forecaster(ForecasterConfig{}), level_(level), se_(se) {}
	std::string name() const override { return "fixed"; }
	std::unique_ptr<Forecaster> clone_untrained() const override {
		return std::make_unique<FixedForecaster>(level_, se_);
	}

protected:
	void train_impl(const TimeSeries &) override {}
	ForecastResult forecast_impl(std::size_t h, const TimeSeries &) const override {
		ForecastResult r;
		r.values.assign(h, level_);
		if (se_ > 0) {
			r.stderrs.assign(h, se_);
		}
		return r;
	}

private:
	double level_, se_;
};

// Predicts the previous value plus one: exact on a unit ramp.
class RampForecaster : public Forecaster {
public:
	RampForecaster() : Forecaster(ForecasterConfig{}) {}
	std::string name() const override { return "ramp"; }
	std::unique_ptr<Forecaster> clone_untrained() const override { return std::make_unique<RampForecaster>(); }

protected:
	void train_impl(const TimeSeries &) override {}
	ForecastResult forecast_impl(std::size_t h, const TimeSeries &hist) const override {
		ForecastResult r;
		for (std::size_t i = 0; i < h; ++i) {
			r.values.push_back(hist.univariate(0).values().back() + static_cast<double>(i + 1));
		}
		r.stderrs.assign(h, 1.0);
		return r;
	}
};

} // namespace

TEST(ForecastResidual, HandFormulaAndSign) {
	ForecastResidual d(std::make_unique<FixedForecaster>(10.0, 2.0));
	d.train(uni({10, 10, 10}));
	const auto prev = uni({10, 10, 10});
	const auto s = d.score(uni({16, 4}, 3600, 3 * 3600), &prev);
	EXPECT_DOUBLE_EQ(s.scores[0], 3.0);
	EXPECT_DOUBLE_EQ(s.scores[1], -3.0);
}

TEST(ForecastResidual, RawResidualWithoutStderr) {
	ForecastResidual d(std::make_unique<FixedForecaster>(10.0, 0.0));
	d.train(uni({10, 10}));
	const auto prev = uni({10, 10});
	EXPECT_DOUBLE_EQ(d.score(uni({13}, 3600, 2 * 3600), &prev).scores[0], 3.0);
}

TEST(ForecastResidual, PerfectForecasterScoresZero) {
	ForecastResidual d(std::make_unique<RampForecaster>());
	std::vector<double> r(50);
	std::iota(r.begin(), r.end(), 0.0);
	const auto s = d.train(uni(r));
	EXPECT_EQ(s.size(), 49u);
	for (double x : s.scores) {
		EXPECT_EQ(x, 0.0);
	}
}
