#include "tsintel/numerics.hpp"
#include "tsintel/error.hpp"

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace tsi::numerics {

double mean(std::span<const double> x) {
	if (x.empty()) {
		return 0.0;
	}
	return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double population_variance(std::span<const double> x) {
	if (x.empty()) {
		return 0.0;
	}
	const double m = mean(x);
	double ss = 0.0;
	for (double v : x) {
		ss += (v - m) * (v - m);
	}
	return ss / static_cast<double>(x.size());
}

double variance(std::span<const double> x) {
	if (x.size() < 2) {
		return 0.0;
	}
	return population_variance(x) * static_cast<double>(x.size()) / static_cast<double>(x.size() - 1);
}

double stddev(std::span<const double> x) { return std::sqrt(variance(x)); }

double median(std::vector<double> x) { return quantile(std::move(x), 0.5); }

double quantile(std::vector<double> x, double q) {
	if (x.empty()) {
		throw InvalidArgument("quantile of empty data");
	}
	std::sort(x.begin(), x.end());
	const double h = (static_cast<double>(x.size()) - 1.0) * std::clamp(q, 0.0, 1.0);
	const auto lo = static_cast<std::size_t>(std::floor(h));
	const auto hi = std::min(lo + 1, x.size() - 1);
	return x[lo] + (h - static_cast<double>(lo)) * (x[hi] - x[lo]);
}

std::vector<double> autocorrelation(std::span<const double> x, std::size_t max_lag) {
	std::vector<double> r(max_lag, 0.0);
	const std::size_t n = x.size();
	if (n < 2) {
		return r;
	}
	const double m = mean(x);
	double denom = 0.0;
	for (double v : x) {
		denom += (v - m) * (v - m);
	}
	if (!(denom > 0.0)) {
		return r;
	}
	for (std::size_t k = 1; k <= max_lag && k < n; ++k) {
		double s = 0.0;
		for (std::size_t t = k; t < n; ++t) {
			s += (x[t] - m) * (x[t - k] - m);
		}
		r[k - 1] = s / denom;
	}
	return r;
}

double normal_cdf(double x) { return boost::math::cdf(boost::math::normal_distribution<double>(), x); }

double normal_quantile(double p) {
	if (!(p > 0.0 && p < 1.0)) {
		throw InvalidArgument("normal quantile requires p in (0, 1)");
	}
	return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

double binomial_half_upper_tail(int n, int k) {
	if (k <= 0) {
		return 1.0;
	}
	if (k > n) {
		return 0.0;
	}
	// log C(n, i) - n log 2, summed in linear space
	double total = 0.0;
	for (int i = k; i <= n; ++i) {
		const double lc = std::lgamma(n + 1.0) - std::lgamma(i + 1.0) - std::lgamma(n - i + 1.0);
		total += std::exp(lc - n * std::log(2.0));
	}
	return std::min(1.0, total);
}

double sign_test_p_value(int wins, int n) {
	const int extreme = std::max(wins, n - wins);
	return std::min(1.0, 2.0 * binomial_half_upper_tail(n, extreme));
}

NelderMeadResult nelder_mead(const Objective &f, std::vector<double> x0, const NelderMeadOptions &opts) {
	constexpr double kInf = std::numeric_limits<double>::infinity();
	NelderMeadResult res;
	auto eval = [&](std::span<const double> x) {
		++res.evaluations;
		const double v = f(x);
		return std::isfinite(v) ? v : kInf;
	};

	const std::size_t n = x0.size();
	if (n == 0) {
		res.value = eval(x0);
		res.x = std::move(x0);
		res.converged = true;
		return res;
	}

	std::vector<std::vector<double>> simplex(n + 1, x0);
	for (std::size_t i = 0; i < n; ++i) {
		const double step = x0[i] != 0.0 ? opts.initial_step * std::max(1.0, std::abs(x0[i])) : opts.initial_step;
		simplex[i + 1][i] += step;
	}
	std::vector<double> fv(n + 1);
	for (std::size_t i = 0; i <= n; ++i) {
		fv[i] = eval(simplex[i]);
	}

	std::vector<std::size_t> order(n + 1);
	std::vector<double> centroid(n), xr(n), xe(n), xc(n);
	auto sort_simplex = [&] {
		std::iota(order.begin(), order.end(), 0);
		std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
		std::vector<std::vector<double>> s2(n + 1);
		std::vector<double> f2(n + 1);
		for (std::size_t i = 0; i <= n; ++i) {
			s2[i] = std::move(simplex[order[i]]);
			f2[i] = fv[order[i]];
		}
		simplex.swap(s2);
		fv.swap(f2);
	};

	sort_simplex();
	while (res.iterations < opts.max_iterations) {
		const double fbest = fv.front();
		const double fworst = fv.back();
		if (std::isfinite(fworst) &&
		    (std::abs(fworst - fbest) <= opts.rel_tol * (std::abs(fbest) + std::abs(fworst)) * 0.5 ||
		     std::abs(fworst - fbest) <= opts.abs_tol)) {
			res.converged = true;
			break;
		}
		++res.iterations;

		std::fill(centroid.begin(), centroid.end(), 0.0);
		for (std::size_t i = 0; i < n; ++i) {
			for (std::size_t j = 0; j < n; ++j) {
				centroid[j] += simplex[i][j];
			}
		}
		for (double &c : centroid) {
			c /= static_cast<double>(n);
		}
		const auto &worst = simplex[n];
		for (std::size_t j = 0; j < n; ++j) {
			xr[j] = centroid[j] + (centroid[j] - worst[j]);
		}
		const double fr = eval(xr);
		if (fr < fv[0]) {
			for (std::size_t j = 0; j < n; ++j) {
				xe[j] = centroid[j] + 2.0 * (centroid[j] - worst[j]);
			}
			const double fe = eval(xe);
			if (fe < fr) {
				simplex[n] = xe;
				fv[n] = fe;
			} else {
				simplex[n] = xr;
				fv[n] = fr;
			}
		} else if (fr < fv[n - 1]) {
			simplex[n] = xr;
			fv[n] = fr;
		} else {
			const bool outside = fr < fv[n];
			for (std::size_t j = 0; j < n; ++j) {
				xc[j] = outside ? centroid[j] + 0.5 * (xr[j] - centroid[j])
				                : centroid[j] + 0.5 * (worst[j] - centroid[j]);
			}
			const double fc = eval(xc);
			if (fc < std::min(fr, fv[n])) {
				simplex[n] = xc;
				fv[n] = fc;
			} else {
				for (std::size_t i = 1; i <= n; ++i) {
					for (std::size_t j = 0; j < n; ++j) {
						simplex[i][j] = simplex[0][j] + 0.5 * (simplex[i][j] - simplex[0][j]);
					}
					fv[i] = eval(simplex[i]);
				}
			}
		}
		sort_simplex();
	}
	res.x = simplex.front();
	res.value = fv.front();
	return res;
}

Pchip::Pchip(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
	const std::size_t n = x_.size();
	if (n != y_.size() || n == 0) {
		throw InvalidArgument("pchip needs equally sized, non-empty knot and value arrays");
	}
	for (std::size_t i = 1; i < n; ++i) {
		if (!(x_[i] > x_[i - 1])) {
			throw InvalidArgument("pchip knots must be strictly increasing");
		}
	}
	d_.assign(n, 0.0);
	if (n == 1) {
		return;
	}
	std::vector<double> h(n - 1), delta(n - 1);
	for (std::size_t i = 0; i + 1 < n; ++i) {
		h[i] = x_[i + 1] - x_[i];
		delta[i] = (y_[i + 1] - y_[i]) / h[i];
	}
	if (n == 2) {
		d_[0] = d_[1] = delta[0];
		return;
	}
	for (std::size_t k = 1; k + 1 < n; ++k) {
		if (delta[k - 1] * delta[k] <= 0.0) {
			d_[k] = 0.0;
		} else {
			const double w1 = 2.0 * h[k] + h[k - 1];
			const double w2 = h[k] + 2.0 * h[k - 1];
			d_[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
		}
	}
	auto edge = [](double h0, double h1, double d0, double d1) {
		double d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
		if (d * d0 <= 0.0) {
			d = 0.0;
		} else if (d0 * d1 <= 0.0 && std::abs(d) > 3.0 * std::abs(d0)) {
			d = 3.0 * d0;
		}
		return d;
	};
	d_[0] = edge(h[0], h[1], delta[0], delta[1]);
	d_[n - 1] = edge(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
}

double Pchip::operator()(double t) const {
	const std::size_t n = x_.size();
	if (n == 1) {
		return y_[0];
	}
	if (t <= x_.front()) {
		return y_.front() + d_.front() * (t - x_.front());
	}
	if (t >= x_.back()) {
		return y_.back() + d_.back() * (t - x_.back());
	}
	const auto it = std::upper_bound(x_.begin(), x_.end(), t);
	const std::size_t k = static_cast<std::size_t>(it - x_.begin()) - 1;
	const double h = x_[k + 1] - x_[k];
	const double s = (t - x_[k]) / h;
	const double h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
	const double h10 = s * (1.0 - s) * (1.0 - s);
	const double h01 = s * s * (3.0 - 2.0 * s);
	const double h11 = s * s * (s - 1.0);
	return h00 * y_[k] + h10 * h * d_[k] + h01 * y_[k + 1] + h11 * h * d_[k + 1];
}

} // namespace tsi::numerics
