#include "tsintel/forecast/sarima.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace tsi {

std::size_t SarimaOrders::min_length() const {
	return static_cast<std::size_t>(p + d + q + m * (P + D + Q) + 2);
}

std::string SarimaOrders::to_string() const {
	std::ostringstream os;
	os << "(" << p << "," << d << "," << q << ")";
	if (m > 1) {
		os << "x(" << P << "," << D << "," << Q << ")_" << m;
	}
	if (!intercept) {
		os << "-nc";
	}
	return os.str();
}

namespace {

// P(B) = (1 + s sum c_i B^i)(1 + s sum C_j B^{jm}); returns s * P_k for k >= 1.
std::vector<double> multiply_lag_polys(std::span<const double> c, std::span<const double> C, int m, double sign) {
	const std::size_t deg = c.size() + C.size() * static_cast<std::size_t>(m);
	std::vector<double> lhs(c.size() + 1, 0.0);
	lhs[0] = 1.0;
	for (std::size_t i = 0; i < c.size(); ++i) {
		lhs[i + 1] = sign * c[i];
	}
	std::vector<double> rhs(C.size() * static_cast<std::size_t>(m) + 1, 0.0);
	rhs[0] = 1.0;
	for (std::size_t j = 0; j < C.size(); ++j) {
		rhs[(j + 1) * static_cast<std::size_t>(m)] = sign * C[j];
	}
	std::vector<double> prod(deg + 1, 0.0);
	for (std::size_t i = 0; i < lhs.size(); ++i) {
		for (std::size_t j = 0; j < rhs.size(); ++j) {
			prod[i + j] += lhs[i] * rhs[j];
		}
	}
	std::vector<double> out(deg);
	for (std::size_t k = 1; k <= deg; ++k) {
		out[k - 1] = sign * prod[k];
	}
	return out;
}

struct SparseLag {
	std::size_t lag;
	double coef;
};

std::vector<SparseLag> sparse(std::span<const double> poly) {
	std::vector<SparseLag> out;
	for (std::size_t k = 0; k < poly.size(); ++k) {
		if (poly[k] != 0.0) {
			out.push_back({k + 1, poly[k]});
		}
	}
	return out;
}

void unpack(SarimaParams &p, std::span<const double> x) {
	const auto &o = p.orders;
	std::size_t i = 0;
	p.mean = o.intercept ? x[i++] : 0.0;
	p.phi.assign(x.begin() + static_cast<std::ptrdiff_t>(i), x.begin() + static_cast<std::ptrdiff_t>(i + o.p));
	i += static_cast<std::size_t>(o.p);
	p.theta.assign(x.begin() + static_cast<std::ptrdiff_t>(i), x.begin() + static_cast<std::ptrdiff_t>(i + o.q));
	i += static_cast<std::size_t>(o.q);
	p.seasonal_phi.assign(x.begin() + static_cast<std::ptrdiff_t>(i), x.begin() + static_cast<std::ptrdiff_t>(i + o.P));
	i += static_cast<std::size_t>(o.P);
	p.seasonal_theta.assign(x.begin() + static_cast<std::ptrdiff_t>(i),
	                        x.begin() + static_cast<std::ptrdiff_t>(i + o.Q));
}

bool admissible(const SarimaParams &p) {
	auto neg = [](const std::vector<double> &v) {
		std::vector<double> out(v.size());
		std::transform(v.begin(), v.end(), out.begin(), [](double c) { return -c; });
		return out;
	};
	return lag_poly_stable(p.phi) && lag_poly_stable(p.seasonal_phi) && lag_poly_stable(neg(p.theta)) &&
	       lag_poly_stable(neg(p.seasonal_theta));
}

// Conditional SSE and count for packed parameters; infinite outside the stationary and invertible region.
double css(const SarimaOrders &o, std::span<const double> x, std::span<const double> w, std::size_t *count,
           std::vector<double> &scratch) {
	SarimaParams p;
	p.orders = o;
	unpack(p, x);
	if (!admissible(p)) {
		return std::numeric_limits<double>::infinity();
	}
	const auto ar = sparse(sarima_ar_poly(p));
	const auto ma = sparse(sarima_ma_poly(p));
	const std::size_t start = static_cast<std::size_t>(o.p + o.m * o.P);
	const std::size_t n = w.size();
	scratch.assign(n, 0.0);
	double sse = 0.0;
	for (std::size_t t = start; t < n; ++t) {
		double e = w[t] - p.mean;
		for (const auto &[lag, c] : ar) {
			e -= c * (w[t - lag] - p.mean);
		}
		for (const auto &[lag, c] : ma) {
			if (lag <= t) {
				e -= c * scratch[t - lag];
			}
		}
		scratch[t] = e;
		sse += e * e;
		if (!std::isfinite(sse) || sse > 1e300) {
			return std::numeric_limits<double>::infinity();
		}
	}
	if (count != nullptr) {
		*count = n > start ? n - start : 0;
	}
	return sse;
}

double aic_from_sse(double sse, std::size_t n, int k) {
	const double nn = static_cast<double>(n);
	const double ratio = std::max(sse / nn, 1e-300);
	return nn * std::log(ratio) + 2.0 * (k + 1);
}

} // namespace

bool lag_poly_stable(std::span<const double> a) {
	// step-down recursion: every reflection coefficient must lie strictly inside (-1, 1)
	std::vector<double> cur(a.begin(), a.end());
	while (!cur.empty()) {
		const std::size_t j = cur.size();
		const double k = cur[j - 1];
		if (!(std::abs(k) < 1.0)) {
			return false;
		}
		std::vector<double> next(j - 1);
		for (std::size_t i = 0; i + 1 < j; ++i) {
			next[i] = (cur[i] + k * cur[j - 2 - i]) / (1.0 - k * k);
		}
		cur.swap(next);
	}
	return true;
}

bool sarima_near_unit_root(const SarimaParams &params, double min_modulus) {
	// roots of A(z) lie outside radius r iff those of A(r z) lie outside the unit circle
	auto scaled = [&](std::vector<double> a, double sign) {
		double f = 1.0;
		for (auto &c : a) {
			f *= min_modulus;
			c *= sign * f;
		}
		return a;
	};
	return !lag_poly_stable(scaled(sarima_ar_poly(params), 1.0)) ||
	       !lag_poly_stable(scaled(sarima_ma_poly(params), -1.0));
}

std::vector<double> sarima_pack(const SarimaParams &params) {
	std::vector<double> x;
	if (params.orders.intercept) {
		x.push_back(params.mean);
	}
	for (const auto *v : {&params.phi, &params.theta, &params.seasonal_phi, &params.seasonal_theta}) {
		x.insert(x.end(), v->begin(), v->end());
	}
	return x;
}

double SarimaParams::intercept() const {
	const auto a = sarima_ar_poly(*this);
	double s = 1.0;
	for (double c : a) {
		s -= c;
	}
	return mean * s;
}

std::vector<double> sarima_ar_poly(const SarimaParams &params) {
	return multiply_lag_polys(params.phi, params.seasonal_phi, params.orders.m, -1.0);
}

std::vector<double> sarima_ma_poly(const SarimaParams &params) {
	return multiply_lag_polys(params.theta, params.seasonal_theta, params.orders.m, 1.0);
}

std::vector<double> sarima_difference(std::span<const double> y, int d, int D, int m) {
	std::vector<double> w(y.begin(), y.end());
	for (int i = 0; i < D; ++i) {
		const auto mm = static_cast<std::size_t>(m);
		if (w.size() <= mm) {
			return {};
		}
		std::vector<double> next(w.size() - mm);
		for (std::size_t t = mm; t < w.size(); ++t) {
			next[t - mm] = w[t] - w[t - mm];
		}
		w.swap(next);
	}
	for (int i = 0; i < d; ++i) {
		if (w.size() <= 1) {
			return {};
		}
		std::vector<double> next(w.size() - 1);
		for (std::size_t t = 1; t < w.size(); ++t) {
			next[t - 1] = w[t] - w[t - 1];
		}
		w.swap(next);
	}
	return w;
}

std::vector<double> sarima_innovations(const SarimaParams &params, std::span<const double> w) {
	std::vector<double> x;
	if (params.orders.intercept) {
		x.push_back(params.mean);
	}
	x.insert(x.end(), params.phi.begin(), params.phi.end());
	x.insert(x.end(), params.theta.begin(), params.theta.end());
	x.insert(x.end(), params.seasonal_phi.begin(), params.seasonal_phi.end());
	x.insert(x.end(), params.seasonal_theta.begin(), params.seasonal_theta.end());
	std::vector<double> e;
	css(params.orders, x, w, nullptr, e);
	if (e.size() != w.size()) {
		e.assign(w.size(), 0.0);
	}
	return e;
}

SarimaParams sarima_fit(std::span<const double> y, const SarimaOrders &orders, const SarimaFitOptions &opts) {
	if (orders.p < 0 || orders.d < 0 || orders.q < 0 || orders.P < 0 || orders.D < 0 || orders.Q < 0 || orders.m < 1) {
		throw SpecError("negative SARIMA order or seasonality < 1");
	}
	if (orders.m == 1 && (orders.P != 0 || orders.D != 0 || orders.Q != 0)) {
		throw SpecError("seasonal orders require m > 1");
	}
	if (y.size() < orders.min_length()) {
		throw SpecError("series of length " + std::to_string(y.size()) + " too short for SARIMA" + orders.to_string());
	}
	const auto w = sarima_difference(y, orders.d, orders.D, orders.m);

	const std::size_t dim = static_cast<std::size_t>(orders.coefficient_count());
	std::vector<double> x0(dim, 0.0);
	if (!opts.initial.empty()) {
		if (opts.initial.size() != dim) {
			throw InvalidArgument("SARIMA warm start has the wrong size");
		}
		x0 = opts.initial;
		SarimaParams warm;
		warm.orders = orders;
		unpack(warm, x0);
		if (!admissible(warm)) {
			std::fill(x0.begin(), x0.end(), 0.0);
			if (orders.intercept) {
				x0[0] = numerics::mean(w);
			}
		}
	} else if (orders.intercept) {
		x0[0] = numerics::mean(w);
	}

	std::vector<double> scratch;
	numerics::NelderMeadOptions nm;
	nm.max_iterations = opts.max_iterations;
	nm.rel_tol = opts.rel_tol;
	nm.initial_step = 0.1;
	auto objective = [&](std::span<const double> x) { return css(orders, x, w, nullptr, scratch); };
	auto res = numerics::nelder_mead(objective, x0, nm);

	SarimaParams out;
	out.orders = orders;
	unpack(out, res.x);
	std::size_t n = 0;
	const double sse = css(orders, res.x, w, &n, scratch);
	out.sse = sse;
	out.n_used = n;
	out.iterations = res.iterations;
	out.converged = res.converged;
	if (!std::isfinite(sse) || n == 0) {
		out.aic = std::numeric_limits<double>::infinity();
		throw FitError("SARIMA" + orders.to_string() + " produced no finite sum of squares", out);
	}
	out.sigma2 = sse / static_cast<double>(n);
	out.aic = aic_from_sse(sse, n, orders.coefficient_count());
	return out;
}

std::size_t sarima_min_history(const SarimaOrders &o) {
	return static_cast<std::size_t>(std::max(1, o.d + o.m * o.D + o.p + o.m * o.P));
}

SarimaForecast sarima_forecast(const SarimaParams &params, std::span<const double> history, std::size_t horizon) {
	const auto &o = params.orders;
	if (history.size() < sarima_min_history(o)) {
		throw HistoryError("SARIMA forecast needs " + std::to_string(sarima_min_history(o)) + " history points, got " +
		                   std::to_string(history.size()));
	}
	// Integrated AR polynomial A(B) = phi(B)Phi(B^m)(1-B)^d(1-B^m)^D = 1 - sum alpha_k B^k.
	std::vector<double> full{1.0};
	for (double a : sarima_ar_poly(params)) {
		full.push_back(-a);
	}
	auto multiply = [&](std::size_t lag) {
		std::vector<double> next(full.size() + lag, 0.0);
		for (std::size_t i = 0; i < full.size(); ++i) {
			next[i] += full[i];
			next[i + lag] -= full[i];
		}
		full.swap(next);
	};
	for (int i = 0; i < o.d; ++i) {
		multiply(1);
	}
	for (int i = 0; i < o.D; ++i) {
		multiply(static_cast<std::size_t>(o.m));
	}
	std::vector<double> alpha(full.size() - 1);
	for (std::size_t k = 1; k < full.size(); ++k) {
		alpha[k - 1] = -full[k];
	}
	const auto beta = sarima_ma_poly(params);
	const double c = params.intercept();

	const auto w = sarima_difference(history, o.d, o.D, o.m);
	const auto ew = sarima_innovations(params, w);
	const std::size_t offset = history.size() - w.size();
	std::vector<double> y(history.begin(), history.end());
	std::vector<double> e(history.size(), 0.0);
	std::copy(ew.begin(), ew.end(), e.begin() + static_cast<std::ptrdiff_t>(offset));

	SarimaForecast out;
	for (std::size_t h = 0; h < horizon; ++h) {
		const std::size_t t = y.size();
		double v = c;
		for (std::size_t k = 0; k < alpha.size(); ++k) {
			if (k + 1 <= t) {
				v += alpha[k] * y[t - k - 1];
			}
		}
		for (std::size_t k = 0; k < beta.size(); ++k) {
			if (k + 1 <= t) {
				v += beta[k] * e[t - k - 1];
			}
		}
		y.push_back(v);
		e.push_back(0.0);
		out.values.push_back(v);
	}

	// psi weights of beta(B) / A(B)
	std::vector<double> psi(horizon, 0.0);
	double acc = 0.0;
	const double sigma = std::sqrt(std::max(params.sigma2, 0.0));
	for (std::size_t j = 0; j < horizon; ++j) {
		double v = j == 0 ? 1.0 : (j - 1 < beta.size() ? beta[j - 1] : 0.0);
		for (std::size_t k = 1; k <= j && k <= alpha.size(); ++k) {
			v += alpha[k - 1] * psi[j - k];
		}
		psi[j] = v;
		acc += v * v;
		out.stderrs.push_back(std::max(sigma * std::sqrt(acc), 1e-12));
	}
	return out;
}

Sarima::Sarima(SarimaOrders orders, ForecasterConfig cfg, SarimaFitOptions opts)
    : Forecaster(std::move(cfg)), orders_(orders), opts_(std::move(opts)) {}

Sarima Sarima::from_params(SarimaParams params, const TimeSeries &ts, ForecasterConfig cfg) {
	Sarima s(params.orders, std::move(cfg));
	s.params_ = std::move(params);
	s.preset_ = true;
	s.train(ts);
	return s;
}

std::unique_ptr<Forecaster> Sarima::clone_untrained() const {
	return std::make_unique<Sarima>(orders_, cfg_, opts_);
}

void Sarima::train_impl(const TimeSeries &transformed) {
	if (preset_) {
		preset_ = false;
		return;
	}
	params_ = sarima_fit(target_of(transformed).values(), orders_, opts_);
}

ForecastResult Sarima::forecast_impl(std::size_t horizon, const TimeSeries &history) const {
	auto f = sarima_forecast(params_, target_of(history).values(), horizon);
	ForecastResult out;
	out.values = std::move(f.values);
	out.stderrs = std::move(f.stderrs);
	return out;
}

ForecastResult Sarima::one_step_impl(const TimeSeries &full, Timestamp from) const {
	const auto &u = target_of(full);
	const auto y = u.values();
	const auto &o = params_.orders;
	const auto w = sarima_difference(y, o.d, o.D, o.m);
	const auto e = sarima_innovations(params_, w);
	const std::size_t offset = y.size() - w.size();
	const std::size_t ar_start = static_cast<std::size_t>(o.p + o.m * o.P);
	const double sigma = std::max(std::sqrt(params_.sigma2), 1e-12);
	ForecastResult out;
	for (std::size_t i = offset + ar_start; i < y.size(); ++i) {
		if (u.stamp(i) < from) {
			continue;
		}
		out.stamps.push_back(u.stamp(i));
		out.values.push_back(y[i] - e[i - offset]);
		out.stderrs.push_back(sigma);
	}
	return out;
}

} // namespace tsi
