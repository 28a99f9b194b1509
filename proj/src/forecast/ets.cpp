#include "tsintel/forecast/ets.hpp"
#include "tsintel/numerics.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

namespace tsi {

int EtsSpec::parameter_count() const {
	int k = 1 + 1; // alpha, level0
	if (trend) {
		k += 2;
	}
	if (season) {
		k += 1 + (m - 1);
	}
	return k;
}

std::string EtsSpec::to_string() const {
	std::string s = "(A,";
	s += trend ? "A," : "N,";
	s += season ? "A" + std::to_string(m) : std::string("N");
	return s + ")";
}

namespace {

double logistic(double u) { return 1.0 / (1.0 + std::exp(-u)); }
double logit(double p) { return std::log(p / (1.0 - p)); }

struct Weights {
	double alpha;
	double beta;
	double gamma;
};

// One-step errors of the additive recursions for input y and initial state
// (level, trend, season[0..m-1]).
void run_errors(const EtsSpec &spec, const Weights &w, std::span<const double> y, double level, double trend,
                std::span<const double> season, std::span<double> err, std::size_t phase) {
	const std::size_t m = spec.season ? static_cast<std::size_t>(spec.m) : 1;
	double ring_buf[512];
	std::vector<double> ring_vec;
	double *ring = ring_buf;
	if (m > 512) {
		ring_vec.resize(m);
		ring = ring_vec.data();
	}
	for (std::size_t i = 0; i < m; ++i) {
		ring[i] = spec.season ? season[i] : 0.0;
	}
	std::size_t idx = phase % m;
	for (std::size_t t = 0; t < y.size(); ++t) {
		const double s = spec.season ? ring[idx] : 0.0;
		const double e = y[t] - (level + trend + s);
		err[t] = e;
		level = level + trend + w.alpha * e;
		if (spec.trend) {
			trend = trend + w.beta * e;
		}
		if (spec.season) {
			ring[idx] = s + w.gamma * e;
		}
		if (++idx == m) {
			idx = 0;
		}
	}
}

std::size_t state_dim(const EtsSpec &spec) {
	return 1 + (spec.trend ? 1 : 0) + (spec.season ? static_cast<std::size_t>(spec.m - 1) : 0);
}

// Expand packed initial state to (level, trend, season[m]).
void expand_state(const EtsSpec &spec, std::span<const double> x, double &level, double &trend,
                  std::vector<double> &season) {
	std::size_t i = 0;
	level = x[i++];
	trend = spec.trend ? x[i++] : 0.0;
	season.assign(spec.season ? static_cast<std::size_t>(spec.m) : 0, 0.0);
	if (spec.season) {
		double sum = 0.0;
		for (std::size_t j = 0; j + 1 < season.size(); ++j) {
			season[j] = x[i++];
			sum += season[j];
		}
		season.back() = -sum;
	}
}

struct Concentrated {
	double sse;
	Eigen::VectorXd state;
};

Concentrated concentrated_sse(const EtsSpec &spec, const Weights &w, std::span<const double> y) {
	const std::size_t n = y.size();
	const std::size_t k = state_dim(spec);
	std::vector<double> e0(n);
	std::vector<double> zero_season(spec.season ? static_cast<std::size_t>(spec.m) : 0, 0.0);
	run_errors(spec, w, y, 0.0, 0.0, zero_season, e0, 0);

	Eigen::MatrixXd E(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k));
	std::vector<double> zeros(n, 0.0), col(n);
	std::vector<double> basis(k, 0.0);
	double level = 0.0, trend = 0.0;
	std::vector<double> season;
	for (std::size_t j = 0; j < k; ++j) {
		std::fill(basis.begin(), basis.end(), 0.0);
		basis[j] = 1.0;
		expand_state(spec, basis, level, trend, season);
		run_errors(spec, w, zeros, level, trend, season, col, 0);
		for (std::size_t t = 0; t < n; ++t) {
			E(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(j)) = col[t];
		}
	}
	Eigen::Map<const Eigen::VectorXd> e0v(e0.data(), static_cast<Eigen::Index>(n));
	Eigen::VectorXd x = E.colPivHouseholderQr().solve(-e0v);
	if (!x.allFinite()) {
		x.setZero();
	}
	const double sse = (e0v + E * x).squaredNorm();
	return {sse, x};
}

Weights weights_from(const EtsSpec &spec, std::span<const double> u) {
	Weights w{logistic(u[0]), 0.0, 0.0};
	std::size_t i = 1;
	if (spec.trend) {
		w.beta = logistic(u[i++]);
	}
	if (spec.season) {
		w.gamma = logistic(u[i++]);
	}
	return w;
}

} // namespace

EtsParams ets_fit(std::span<const double> y, const EtsSpec &spec, const EtsFitOptions &opts) {
	if (spec.season && (spec.m < 2 || static_cast<std::size_t>(spec.m) >= y.size())) {
		throw SpecError("ETS seasonal period " + std::to_string(spec.m) + " invalid for series of length " +
		                std::to_string(y.size()));
	}
	if (y.size() < 2) {
		throw SpecError("ETS needs at least two observations");
	}
	std::vector<double> u0{logit(0.3)};
	if (spec.trend) {
		u0.push_back(logit(0.05));
	}
	if (spec.season) {
		u0.push_back(logit(0.05));
	}
	numerics::NelderMeadOptions nm;
	nm.max_iterations = opts.max_iterations;
	nm.rel_tol = opts.rel_tol;
	nm.initial_step = 0.5;
	auto objective = [&](std::span<const double> u) { return concentrated_sse(spec, weights_from(spec, u), y).sse; };
	auto res = numerics::nelder_mead(objective, u0, nm);

	const Weights w = weights_from(spec, res.x);
	const auto best = concentrated_sse(spec, w, y);
	EtsParams p;
	p.spec = spec;
	p.alpha = w.alpha;
	p.beta = w.beta;
	p.gamma = w.gamma;
	std::vector<double> x(best.state.data(), best.state.data() + best.state.size());
	expand_state(spec, x, p.level0, p.trend0, p.season0);
	p.sse = best.sse;
	p.n_used = y.size();
	p.sigma2 = best.sse / static_cast<double>(y.size());
	const double nn = static_cast<double>(y.size());
	p.aic = nn * std::log(std::max(best.sse / nn, 1e-300)) + 2.0 * (spec.parameter_count() + 1);
	p.converged = res.converged;
	return p;
}

EtsState ets_filter(const EtsParams &params, std::span<const double> y, std::size_t phase) {
	const auto &spec = params.spec;
	const std::size_t m = spec.season ? static_cast<std::size_t>(spec.m) : 1;
	EtsState st;
	st.level = params.level0;
	st.trend = params.trend0;
	st.ring.assign(m, 0.0);
	if (spec.season) {
		st.ring = params.season0;
	}
	std::size_t idx = phase % m;
	st.fitted.reserve(y.size());
	for (double v : y) {
		const double s = spec.season ? st.ring[idx] : 0.0;
		const double yhat = st.level + st.trend + s;
		st.fitted.push_back(yhat);
		const double e = v - yhat;
		st.level = st.level + st.trend + params.alpha * e;
		if (spec.trend) {
			st.trend += params.beta * e;
		}
		if (spec.season) {
			st.ring[idx] = s + params.gamma * e;
		}
		idx = (idx + 1) % m;
	}
	st.t = phase + y.size();
	return st;
}

EtsForecast ets_forecast(const EtsParams &params, std::span<const double> history, std::size_t horizon,
                         std::size_t phase) {
	const auto st = ets_filter(params, history, phase);
	const std::size_t m = st.ring.size();
	EtsForecast out;
	const double se = std::max(std::sqrt(params.sigma2), 1e-12);
	for (std::size_t h = 1; h <= horizon; ++h) {
		const double s = params.spec.season ? st.ring[(st.t + h - 1) % m] : 0.0;
		out.values.push_back(st.level + static_cast<double>(h) * st.trend + s);
		out.stderrs.push_back(se);
	}
	return out;
}

Ets::Ets(EtsSpec spec, ForecasterConfig cfg, EtsFitOptions opts)
    : Forecaster(std::move(cfg)), spec_(spec), opts_(opts) {}

Ets Ets::from_params(EtsParams params, const TimeSeries &ts, ForecasterConfig cfg) {
	Ets e(params.spec, std::move(cfg));
	e.params_ = std::move(params);
	e.preset_ = true;
	e.train(ts);
	return e;
}

std::unique_ptr<Forecaster> Ets::clone_untrained() const { return std::make_unique<Ets>(spec_, cfg_, opts_); }

std::size_t Ets::phase_of(const UnivariateTimeSeries &u) const {
	if (!spec_.season || u.empty()) {
		return 0;
	}
	const auto m = static_cast<std::int64_t>(spec_.m);
	const double steps = static_cast<double>(u.stamp(0) - origin_) / static_cast<double>(step_);
	auto k = static_cast<std::int64_t>(std::llround(steps)) % m;
	if (k < 0) {
		k += m;
	}
	return static_cast<std::size_t>(k);
}

void Ets::train_impl(const TimeSeries &transformed) {
	const auto &u = target_of(transformed);
	origin_ = u.empty() ? 0 : u.stamp(0);
	step_ = std::max<std::int64_t>(1, median_gap(u.stamps()));
	if (preset_) {
		preset_ = false;
		return;
	}
	params_ = ets_fit(u.values(), spec_, opts_);
}

ForecastResult Ets::forecast_impl(std::size_t horizon, const TimeSeries &history) const {
	const auto &u = target_of(history);
	auto f = ets_forecast(params_, u.values(), horizon, phase_of(u));
	ForecastResult out;
	out.values = std::move(f.values);
	out.stderrs = std::move(f.stderrs);
	return out;
}

ForecastResult Ets::one_step_impl(const TimeSeries &full, Timestamp from) const {
	const auto &u = target_of(full);
	const auto st = ets_filter(params_, u.values(), phase_of(u));
	const double se = std::max(std::sqrt(params_.sigma2), 1e-12);
	ForecastResult out;
	for (std::size_t i = 0; i < u.size(); ++i) {
		if (u.stamp(i) < from) {
			continue;
		}
		out.stamps.push_back(u.stamp(i));
		out.values.push_back(st.fitted[i]);
		out.stderrs.push_back(se);
	}
	return out;
}

} // namespace tsi
