// Acceptance checks. Usage: acceptance <bench executable> <data dir> [--known-red 6,10]
// Prints one PASS/FAIL line per criterion. Exit status 1 if a criterion fails
// that is not listed as known red; known-red failures are still printed as FAIL.

#include "acceptance/anomaly_suite.hpp"
#include "helpers.hpp"
#include "metric_oracle.hpp"

#include "tsintel/automl.hpp"
#include "tsintel/bench.hpp"
#include "tsintel/evaluation/eval.hpp"
#include "tsintel/evaluation/metrics.hpp"
#include "tsintel/forecast/tree_forecaster.hpp"
#include "tsintel/numerics.hpp"
#include "tsintel/post_process.hpp"
#include "tsintel/transforms.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace tsi;
using tsi::testing::gaussian;
using tsi::testing::grid;
using tsi::testing::uni;

namespace fs = std::filesystem;

namespace {

struct Outcome {
	bool pass = false;
	std::string detail;
};

template <class... A>
std::string fmt(const char *f, A... a) {
	char buf[512];
	std::snprintf(buf, sizeof buf, f, a...);
	return buf;
}

class Stopwatch {
public:
	double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count(); }

private:
	std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

// 1. invert(fit_apply(x)) == x for random invertible chains
Outcome transform_round_trip() {
	Stopwatch sw;
	std::mt19937_64 rng(101);
	std::uniform_int_distribution<int> len(1, 4), vars(1, 3), n_dist(20, 400), coin(0, 1), ord(1, 2);
	std::uniform_real_distribution<double> level(-1e3, 1e3), scale(1e-3, 1e3);
	double worst = 0.0;
	for (int rep = 0; rep < 1000; ++rep) {
		const auto n = static_cast<std::size_t>(n_dist(rng));
		std::vector<UnivariateTimeSeries> us;
		const int d = vars(rng);
		for (int k = 0; k < d; ++k) {
			auto v = gaussian(n, rng(), scale(rng), level(rng));
			for (std::size_t i = 1; i < n; ++i) {
				v[i] += 0.5 * v[i - 1] * coin(rng);
			}
			us.emplace_back("v" + std::to_string(k), grid(n), v);
		}
		const TimeSeries ts(us);
		// differencing totals at most 3, the deepest the order selection produces;
		// beyond that double rounding in the forward pass is amplified past 1e-10
		TransformChain chain;
		int total_order = 0;
		for (int i = len(rng); i > 0; --i) {
			const int o = coin(rng) ? 0 : ord(rng);
			if (o > 0 && total_order + o <= 3) {
				chain.push_back(Transform::difference(o));
				total_order += o;
			} else {
				chain.push_back(Transform::normalize());
			}
		}
		const auto back = chain.invert(chain.fit_apply(ts));
		if (back.dim() != ts.dim() || back.rows() != ts.rows() ||
		    !std::equal(ts.stamps().begin(), ts.stamps().end(), back.stamps().begin())) {
			return {false, fmt("instance %d: shape changed", rep)};
		}
		for (std::size_t k = 0; k < ts.dim(); ++k) {
			const auto &a = ts.univariate(k).values();
			const auto &b = back.univariate(k).values();
			double mag = 0.0;
			for (double x : a) {
				mag = std::max(mag, std::abs(x));
			}
			for (std::size_t i = 0; i < a.size(); ++i) {
				worst = std::max(worst, std::abs(a[i] - b[i]) / mag);
			}
		}
	}
	const double t = sw.seconds();
	return {worst <= 1e-10 && t < 10.0, fmt("max relative error %.3g (<= 1e-10), %.2f s (< 10 s)", worst, t)};
}

// KS distance between a sample of |z| and the half-normal distribution
double ks_half_normal(std::vector<double> a) {
	std::sort(a.begin(), a.end());
	const double n = static_cast<double>(a.size());
	double d = 0.0;
	for (std::size_t i = 0; i < a.size();) {
		std::size_t j = i;
		while (j < a.size() && a[j] == a[i]) {
			++j;
		}
		const double f = 2.0 * numerics::normal_cdf(a[i]) - 1.0;
		d = std::max({d, std::abs(f - static_cast<double>(i) / n), std::abs(f - static_cast<double>(j) / n)});
		i = j;
	}
	return d;
}

// 2. calibrated |z| is close to |N(0,1)| and the map keeps the rank order
Outcome calibration_distribution() {
	using Draw = std::function<double(std::mt19937_64 &)>;
	const std::vector<std::pair<std::string, Draw>> dists{
	    {"uniform", [](auto &r) { return std::uniform_real_distribution<double>(0.0, 1.0)(r); }},
	    {"exponential", [](auto &r) { return std::exponential_distribution<double>(1.0)(r); }},
	    {"bimodal",
	     [](auto &r) {
		     std::normal_distribution<double> z;
		     return (r() % 2 ? 6.0 : 0.0) + z(r);
	     }},
	    {"heavy-tail", [](auto &r) { return std::student_t_distribution<double>(2.0)(r); }},
	    {"discrete", [](auto &r) { return static_cast<double>(std::poisson_distribution<int>(10)(r)); }},
	};
	bool ok = true;
	std::string detail;
	std::mt19937_64 rng(202);
	for (const auto &[name, draw] : dists) {
		std::vector<double> fit(2000), fresh(2000);
		for (auto &x : fit) {
			x = draw(rng);
		}
		for (auto &x : fresh) {
			x = draw(rng);
		}
		const auto c = Calibrator::fit(fit);
		std::vector<double> zin, zout;
		for (double x : fit) {
			zin.push_back(std::abs(c(x)));
		}
		for (double x : fresh) {
			zout.push_back(std::abs(c(x)));
		}
		const double ks_in = ks_half_normal(zin), ks_out = ks_half_normal(zout);
		bool ranks = true;
		std::vector<std::size_t> idx(fit.size());
		std::iota(idx.begin(), idx.end(), 0U);
		std::sort(idx.begin(), idx.end(), [&](auto i, auto j) { return std::abs(fit[i]) < std::abs(fit[j]); });
		for (std::size_t k = 1; k < idx.size(); ++k) {
			const double a = std::abs(fit[idx[k - 1]]), b = std::abs(fit[idx[k]]);
			const double za = zin[idx[k - 1]], zb = zin[idx[k]];
			ranks = ranks && (a == b ? za == zb : za < zb);
		}
		ok = ok && ks_in <= 0.08 && ks_out <= 0.08 && ranks;
		detail += fmt("%s KS %.3f/%.3f%s; ", name.c_str(), ks_in, ks_out, ranks ? "" : " RANK");
	}
	return {ok, detail + "fit/held-out KS <= 0.08, ranks exact"};
}

// 3. library detection metrics against the point-by-point oracle
Outcome metric_oracle() {
	std::mt19937_64 rng(303);
	std::size_t mismatches = 0;
	for (int rep = 0; rep < 500; ++rep) {
		const std::size_t n = 1 + rng() % 200;
		std::vector<int> y(n, 0), p(n, 0);
		const std::size_t windows = rng() % 11;
		for (std::size_t w = 0; w < windows; ++w) {
			const std::size_t a = rng() % n, l = 1 + rng() % 12;
			for (std::size_t i = a; i < std::min(n, a + l); ++i) {
				y[i] = 1;
			}
		}
		if (tsi::testing::oracle_windows(y).size() > 10) {
			--rep;
			continue;
		}
		const double density = std::uniform_real_distribution<double>(0.0, 0.3)(rng);
		for (auto &v : p) {
			v = std::uniform_real_distribution<double>(0.0, 1.0)(rng) < density ? 1 : 0;
		}
		const auto truth = tsi::testing::labels(y), pred = tsi::testing::labels(p);
		const std::pair<AnomalyMetric, tsi::testing::OracleCounts> cases[] = {
		    {AnomalyMetric::PW, tsi::testing::oracle_pw(y, p)},
		    {AnomalyMetric::PA, tsi::testing::oracle_pa(y, p)},
		    {AnomalyMetric::RPA, tsi::testing::oracle_rpa(y, p)},
		};
		for (const auto &[kind, o] : cases) {
			const auto s = anomaly_metric(kind, truth, pred);
			const bool same = s.tp == o.tp && s.fp == o.fp && s.fn == o.fn && s.precision == o.precision &&
			                  s.recall == o.recall && s.f1 == o.f1;
			mismatches += same ? 0 : 1;
		}
	}
	// one window of 11 points with a single interior hit
	std::vector<int> y(30, 0), p(30, 0);
	for (int i = 10; i <= 20; ++i) {
		y[static_cast<std::size_t>(i)] = 1;
	}
	p[15] = 1;
	const auto t = tsi::testing::labels(y), a = tsi::testing::labels(p);
	const auto rpa = anomaly_metric(AnomalyMetric::RPA, t, a);
	const auto pa = anomaly_metric(AnomalyMetric::PA, t, a);
	const bool worked = rpa.f1 == 1.0 && pa.tp == 11;
	return {mismatches == 0 && worked,
	        fmt("%zu mismatches over 1500 comparisons; worked case RPA F1 %.3f, PA TP %zu", mismatches, rpa.f1, pa.tp)};
}

// 4. period detection on sinusoids and white noise
Outcome seasonality_detection() {
	std::mt19937_64 rng(404);
	std::uniform_real_distribution<double> phase(0.0, 2 * std::numbers::pi), amp(0.5, 20.0);
	int sines = 0, hits = 0;
	for (int m : {7, 24, 52}) {
		for (int rep = 0; rep < 20; ++rep) {
			const auto y = tsi::testing::sine(static_cast<std::size_t>(12 * m), m, amp(rng), phase(rng));
			++sines;
			hits += detect_seasonality(y, 0.05).m == m ? 1 : 0;
		}
	}
	int flat = 0;
	for (std::uint64_t s = 0; s < 100; ++s) {
		flat += detect_seasonality(gaussian(240, 4000 + s), 0.05).m == 1 ? 1 : 0;
	}
	return {hits == sines && flat >= 90,
	        fmt("sinusoids %d/%d (need all), white noise m = 1 in %d/100 (need >= 90)", hits, sines, flat)};
}

// 5. seasonal strength
Outcome seasonal_strength_check() {
	std::mt19937_64 rng(505);
	bool exact = true;
	for (int m : {4, 7, 12, 24}) {
		for (int rep = 0; rep < 5; ++rep) {
			std::vector<double> pattern(static_cast<std::size_t>(m));
			for (auto &v : pattern) {
				v = std::uniform_real_distribution<double>(-5.0, 5.0)(rng);
			}
			std::vector<double> y(static_cast<std::size_t>(10 * m));
			for (std::size_t i = 0; i < y.size(); ++i) {
				y[i] = 50.0 + pattern[i % pattern.size()];
			}
			exact = exact && seasonal_strength(y, m) == 1.0;
		}
	}
	int low = 0;
	double worst = 0.0;
	for (std::uint64_t s = 0; s < 100; ++s) {
		const double f = seasonal_strength(gaussian(240, 5000 + s), 24);
		low += f <= 0.2 ? 1 : 0;
		worst = std::max(worst, f);
	}
	return {exact && low >= 95, fmt("periodic F_S == 1 %s; white noise F_S <= 0.2 in %d/100 (need >= 95, max %.3f)",
	                                 exact ? "exact" : "NOT exact", low, worst)};
}

// Durbin-Levinson: partial autocorrelations to AR coefficients a (1 - sum a_i B^i)
std::vector<double> pacf_to_poly(const std::vector<double> &r) {
	std::vector<double> a;
	for (std::size_t k = 0; k < r.size(); ++k) {
		std::vector<double> b(k + 1);
		b[k] = r[k];
		for (std::size_t j = 0; j < k; ++j) {
			b[j] = a[j] - r[k] * a[k - 1 - j];
		}
		a = b;
	}
	return a;
}

// coefficients c of (1 - sum a_i B^i)(1 - sum A_i B^{m i}) = 1 - sum c_k B^k
std::vector<double> seasonal_product(const std::vector<double> &a, const std::vector<double> &A, int m) {
	const std::size_t n = a.size() + static_cast<std::size_t>(m) * A.size();
	std::vector<double> x(a.size() + 1, 0.0), y(static_cast<std::size_t>(m) * A.size() + 1, 0.0), p(n + 1, 0.0);
	x[0] = y[0] = 1.0;
	for (std::size_t i = 0; i < a.size(); ++i) {
		x[i + 1] = -a[i];
	}
	for (std::size_t i = 0; i < A.size(); ++i) {
		y[static_cast<std::size_t>(m) * (i + 1)] = -A[i];
	}
	for (std::size_t i = 0; i < x.size(); ++i) {
		for (std::size_t j = 0; j < y.size(); ++j) {
			p[i + j] += x[i] * y[j];
		}
	}
	std::vector<double> c(n);
	for (std::size_t k = 1; k <= n; ++k) {
		c[k - 1] = -p[k];
	}
	return c;
}

// stationary, invertible SARMA(p,q)x(P,Q)_m draw around a random mean
std::vector<double> sarma_series(std::uint64_t seed, int m, std::size_t n) {
	std::mt19937_64 rng(seed);
	std::uniform_real_distribution<double> u(-0.7, 0.7), u01(0.0, 1.0);
	auto rnd = [&](int k) {
		std::vector<double> r(static_cast<std::size_t>(k));
		for (auto &v : r) {
			v = u(rng);
		}
		return r;
	};
	const int p = static_cast<int>(rng() % 3), q = static_cast<int>(rng() % 3);
	const int P = static_cast<int>(rng() % 2), Q = static_cast<int>(rng() % 2);
	const auto ar = seasonal_product(pacf_to_poly(rnd(p)), pacf_to_poly(rnd(P)), m);
	const auto ma = seasonal_product(pacf_to_poly(rnd(q)), pacf_to_poly(rnd(Q)), m);
	const double mu = 4 * u01(rng) - 2;
	std::normal_distribution<double> z;
	const std::size_t burn = 300;
	std::vector<double> e(n + burn), w(n + burn, 0.0);
	for (auto &v : e) {
		v = z(rng);
	}
	for (std::size_t t = 0; t < w.size(); ++t) {
		double v = e[t];
		for (std::size_t i = 0; i < ar.size() && i < t; ++i) {
			v += ar[i] * w[t - 1 - i];
		}
		for (std::size_t i = 0; i < ma.size() && i < t; ++i) {
			v -= ma[i] * e[t - 1 - i];
		}
		w[t] = v;
	}
	std::vector<double> y(w.end() - static_cast<std::ptrdiff_t>(n), w.end());
	for (auto &v : y) {
		v += mu;
	}
	return y;
}

// 6. stepwise walk vs. exhaustive grid
Outcome stepwise_vs_exhaustive() {
	Stopwatch sw;
	const int m = 4;
	const StepwiseBounds b{3, 3, 2, 2};
	const std::size_t grid_size = 4 * 4 * 3 * 3 * 2;
	int within = 0;
	double frac_max = 0.0, worst_gap = 0.0;
	bool above_optimum = true;
	for (int s = 0; s < 50; ++s) {
		const auto y = sarma_series(1000 + static_cast<std::uint64_t>(s), m, 240);
		double best = std::numeric_limits<double>::infinity();
		for (int p = 0; p <= b.max_p; ++p) {
			for (int q = 0; q <= b.max_q; ++q) {
				for (int P = 0; P <= b.max_P; ++P) {
					for (int Q = 0; Q <= b.max_Q; ++Q) {
						for (bool ic : {false, true}) {
							SarimaOrders o;
							o.p = p;
							o.q = q;
							o.P = P;
							o.Q = Q;
							o.m = m;
							o.intercept = ic;
							try {
								const auto f = sarima_fit(y, o);
								if (!sarima_near_unit_root(f)) {
									best = std::min(best, f.aic);
								}
							} catch (const Error &) {
							}
						}
					}
				}
			}
		}
		const auto r = stepwise_aic_search(y, m, 0, 0, b);
		const double gap = r.best.aic - best;
		worst_gap = std::max(worst_gap, gap);
		within += gap <= 5.0 ? 1 : 0;
		above_optimum = above_optimum && gap >= -1e-9;
		frac_max = std::max(frac_max, static_cast<double>(r.evaluated.size()) / static_cast<double>(grid_size));
	}
	const double t = sw.seconds();
	const bool ok = within >= 45 && frac_max <= 0.30 && t < 300.0;
	return {ok, fmt("within 5.0 of exhaustive minimum in %d/50 (need >= 45, worst gap %.2f%s), max grid fraction %.3f "
	                "(<= 0.30), %.1f s (< 300 s)",
	                within, worst_gap, above_optimum ? "" : ", below optimum seen", frac_max, t)};
}

// one-sided sign test: P(X >= wins) for X ~ Binomial(n, 1/2)
double sign_test_p(int wins, int n) {
	double p = 0.0;
	for (int k = wins; k <= n; ++k) {
		p += std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) - n * std::log(2.0));
	}
	return p;
}

// 7. auto models vs. fixed non-seasonal counterparts on seasonal series
Outcome automl_improvement() {
	const int m = 24;
	const std::size_t n_train = 14 * 24, horizon = 48;
	bench::RunConfig cfg;
	const std::pair<std::string, std::string> pairs[] = {{"auto-sarima", "arima"}, {"auto-ets", "ets"}};
	std::map<std::string, std::vector<double>> err;
	std::mt19937_64 rng(707);
	for (int s = 0; s < 30; ++s) {
		std::uniform_real_distribution<double> u(0.0, 1.0);
		const double amp = 2.0 + 8.0 * u(rng), amp2 = amp * 0.5 * u(rng), ph = 6.283 * u(rng), ph2 = 6.283 * u(rng);
		const double level = 50.0 + 50.0 * u(rng);
		const double signal_var = (amp * amp + amp2 * amp2) / 2.0;
		const auto noise = gaussian(n_train + horizon, 7000 + static_cast<std::uint64_t>(s), std::sqrt(signal_var / 10.0));
		std::vector<double> y(n_train + horizon);
		for (std::size_t i = 0; i < y.size(); ++i) {
			const double t = 2 * std::numbers::pi * static_cast<double>(i) / m;
			y[i] = level + amp * std::sin(t + ph) + amp2 * std::sin(2 * t + ph2) + noise[i];
		}
		const auto train = uni(std::vector<double>(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(n_train)));
		const std::vector<double> truth(y.begin() + static_cast<std::ptrdiff_t>(n_train), y.end());
		for (const auto &[a, b] : pairs) {
			for (const auto &name : {a, b}) {
				auto f = bench::make_forecaster(bench::ModelSpec{name, name, "{}"}, cfg);
				f->train(train);
				err[name].push_back(smape(truth, f->forecast(horizon).values).value);
			}
		}
	}
	bool ok = true;
	std::string detail;
	for (const auto &[a, b] : pairs) {
		int wins = 0, n = 0;
		for (std::size_t i = 0; i < err[a].size(); ++i) {
			if (err[a][i] != err[b][i]) {
				++n;
				wins += err[a][i] < err[b][i] ? 1 : 0;
			}
		}
		const double ma = numerics::mean(err[a]), mb = numerics::mean(err[b]);
		const double p = sign_test_p(wins, n);
		ok = ok && ma < mb && p < 0.05;
		detail += fmt("%s %.2f%% vs %s %.2f%% mean sMAPE, wins %d/%d, sign test p = %.2g; ", a.c_str(), ma, b.c_str(), mb,
		              wins, n, p);
	}
	return {ok, detail + "need lower mean and p < 0.05"};
}

// 8. tree rollout
Outcome tree_rollout() {
	std::mt19937_64 rng(808);
	int consistent = 0;
	for (int rep = 0; rep < 100; ++rep) {
		TreeEnsembleParams tp;
		tp.kind = rng() % 2 ? EnsembleKind::GradientBoosting : EnsembleKind::RandomForest;
		tp.n_trees = 5 + rng() % 40;
		tp.max_depth = 2 + static_cast<int>(rng() % 5);
		tp.learning_rate = std::uniform_real_distribution<double>(0.05, 0.5)(rng);
		tp.seed = rng();
		ForecasterConfig fc;
		fc.max_lags = 2 + rng() % 12;
		const std::size_t n = 60 + rng() % 140;
		auto y = gaussian(n, rng());
		for (std::size_t i = 1; i < n; ++i) {
			y[i] += 0.8 * y[i - 1];
		}
		TreeForecaster f(tp, fc);
		f.train(uni(y));
		const std::size_t h = 1 + rng() % 30;
		const auto a = f.forecast(h), b = f.forecast(h + 1);
		consistent += std::equal(a.values.begin(), a.values.end(), b.values.begin()) ? 1 : 0;
	}
	// noiseless ramp y_t = t; trees predict inside the training range, so the
	// trend is modelled on first differences
	auto ramp_error = [](bool differenced) {
		const std::size_t n = 100;
		std::vector<double> y(n + 3);
		std::iota(y.begin(), y.end(), 0.0);
		ForecasterConfig fc;
		if (differenced) {
			fc.transform.push_back(Transform::difference(1));
		}
		TreeForecaster f({}, fc);
		f.train(uni(std::vector<double>(y.begin(), y.begin() + n)));
		const auto out = f.forecast(3);
		double worst = 0.0;
		for (std::size_t i = 0; i < 3; ++i) {
			worst = std::max(worst, std::abs(out.values[i] - y[n + i]) / std::abs(y[n + i]));
		}
		return worst;
	};
	const double diff_err = ramp_error(true), raw_err = ramp_error(false);
	return {consistent == 100 && diff_err <= 0.01,
	        fmt("prefix consistent %d/100; ramp 3-step error %.3g%% with difference(1) (<= 1%%), %.3g%% on raw values "
	            "(informational)",
	            consistent, 100 * diff_err, 100 * raw_err)};
}

// 9. alert count never grows with the threshold
Outcome threshold_monotonicity() {
	std::mt19937_64 rng(909);
	int violations = 0;
	for (int rep = 0; rep < 200; ++rep) {
		const std::size_t n = 50 + rng() % 400;
		const std::int64_t step = 60;
		auto raw = gaussian(n, rng());
		for (std::size_t k = rng() % 6; k > 0; --k) {
			raw[rng() % n] += 8.0 * (rng() % 2 ? 1 : -1);
		}
		const auto cal = Calibrator::fit(raw);
		AnomalyScoreSeries z{grid(n, step), {}, true};
		for (double v : raw) {
			z.scores.push_back(cal(v));
		}
		ThresholdRule rule;
		rule.min_alerts = 1 + rng() % 3;
		rule.alert_window = step * static_cast<std::int64_t>(1 + rng() % 10);
		rule.suppress = step * static_cast<std::int64_t>(rng() % 20);
		std::size_t prev = n + 1;
		for (double tau = 0.0; tau <= 8.5; tau += 0.05) {
			rule.threshold = tau;
			const std::size_t c = apply_threshold(rule, z).anomalous_count();
			violations += c > prev ? 1 : 0;
			prev = c;
		}
	}
	return {violations == 0, fmt("%d increases over 200 traces x 171 thresholds", violations)};
}

// 10. ensemble vs. its members on the synthetic suite
Outcome ensemble_sanity() {
	bench::RunConfig cfg;
	cfg.task = bench::Task::Anomaly;
	const std::vector<std::string> members{"forecast-residual", "iforest", "zms"};
	std::vector<std::string> names = members;
	names.push_back("ensemble");
	std::map<std::string, std::map<int, std::vector<double>>> f1;
	for (const auto &s : acceptance::make_suite()) {
		for (const auto &nm : names) {
			AnomalyEvalOptions o;
			o.tune_threshold = true;
			o.rule.min_alerts = 1;
			o.rule.suppress = 21600;
			const auto ev = run_anomaly_eval(
			    [&] { return bench::make_anomaly_model(bench::ModelSpec{nm, nm, "{}"}, cfg); }, s.ts, s.labels, o);
			f1[nm][static_cast<int>(s.kind)].push_back(ev.metrics.at("rpa_f1"));
		}
	}
	bool within = true, strictly_best = false;
	std::string detail;
	for (int k = 0; k < 3; ++k) {
		double best = 0.0;
		std::string best_name;
		for (const auto &nm : members) {
			const double v = numerics::mean(f1[nm][k]);
			if (v > best) {
				best = v;
				best_name = nm;
			}
		}
		const double e = numerics::mean(f1["ensemble"][k]);
		within = within && e >= best - 0.05;
		strictly_best = strictly_best || e > best;
		detail += fmt("%s ensemble %.3f vs %s %.3f; ", acceptance::to_string(static_cast<acceptance::Archetype>(k)).c_str(),
		              e, best_name.c_str(), best);
	}
	return {within && strictly_best, detail + "need within 0.05 everywhere and strictly best once"};
}

std::string slurp(const fs::path &p) {
	std::ifstream in(p, std::ios::binary);
	std::ostringstream ss;
	ss << in.rdbuf();
	return ss.str();
}

// 11. two seeded bench runs give identical results.csv
Outcome bench_determinism(const std::string &bench, const fs::path &data) {
	const fs::path root = fs::temp_directory_path() / fmt("tsi_acceptance_%d", static_cast<int>(std::random_device{}() % 1000000));
	fs::create_directories(root);
	std::vector<double> times;
	for (const char *run : {"a", "b"}) {
		Stopwatch sw;
		const std::string cmd = "\"" + bench + "\" anomaly --config \"" + (data / "anomaly_config.json").string() +
		                        "\" --seed 7 --out \"" + (root / run).string() + "\" > /dev/null 2>&1";
		if (std::system(cmd.c_str()) != 0) {
			fs::remove_all(root);
			return {false, "bench exited with an error: " + cmd};
		}
		times.push_back(sw.seconds());
	}
	const auto a = slurp(root / "a" / "results.csv"), b = slurp(root / "b" / "results.csv");
	fs::remove_all(root);
	const bool same = !a.empty() && a == b;
	const double slowest = std::max(times[0], times[1]);
	return {same && slowest < 120.0, fmt("results.csv %s (%zu bytes), slowest run %.1f s (< 120 s)",
	                                     same ? "byte-identical" : "DIFFERS", a.size(), slowest)};
}

} // namespace

int main(int argc, char **argv) {
	if (argc != 3 && !(argc == 5 && std::string(argv[3]) == "--known-red")) {
		std::fprintf(stderr, "usage: %s <bench executable> <data dir> [--known-red i,j,...]\n", argv[0]);
		return 2;
	}
	const std::string bench = argv[1];
	const fs::path data = argv[2];
	std::set<std::size_t> known_red;
	if (argc == 5) {
		std::stringstream ss(argv[4]);
		for (std::string item; std::getline(ss, item, ',');) {
			known_red.insert(static_cast<std::size_t>(std::stoul(item)));
		}
	}
	const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
	    {"transform round-trip", transform_round_trip},
	    {"calibration distribution", calibration_distribution},
	    {"metric oracle equivalence", metric_oracle},
	    {"seasonality detection", seasonality_detection},
	    {"seasonal strength", seasonal_strength_check},
	    {"stepwise AIC vs exhaustive", stepwise_vs_exhaustive},
	    {"automl improvement", automl_improvement},
	    {"tree rollout", tree_rollout},
	    {"threshold monotonicity", threshold_monotonicity},
	    {"ensemble sanity", ensemble_sanity},
	    {"bench determinism", [&] { return bench_determinism(bench, data); }},
	};
	std::size_t passed = 0, unexpected = 0;
	for (std::size_t i = 0; i < criteria.size(); ++i) {
		Outcome o;
		try {
			o = criteria[i].second();
		} catch (const std::exception &e) {
			o = {false, std::string("threw: ") + e.what()};
		}
		passed += o.pass ? 1 : 0;
		unexpected += !o.pass && !known_red.contains(i + 1) ? 1 : 0;
		std::printf("%s %2zu %s: %s%s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str(),
		            !o.pass && known_red.contains(i + 1) ? " [known red]" : "");
		std::fflush(stdout);
	}
	std::printf("%zu/%zu criteria pass, %zu unexpected failures\n", passed, criteria.size(), unexpected);
	return unexpected == 0 ? 0 : 1;
}
