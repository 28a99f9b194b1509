#pragma once

#include "tsintel/time_series.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

namespace tsi::testing {

inline std::vector<Timestamp> grid(std::size_t n, std::int64_t step = 3600, Timestamp t0 = 0) {
	std::vector<Timestamp> s(n);
	for (std::size_t i = 0; i < n; ++i) {
		s[i] = t0 + static_cast<Timestamp>(i) * step;
	}
	return s;
}

inline TimeSeries uni(const std::vector<double> &v, std::int64_t step = 3600, Timestamp t0 = 0) {
	return TimeSeries::from_univariate(UnivariateTimeSeries("x", grid(v.size(), step, t0), v));
}

inline std::vector<double> gaussian(std::size_t n, std::uint64_t seed, double sd = 1.0, double mu = 0.0) {
	std::mt19937_64 rng(seed);
	std::normal_distribution<double> d(mu, sd);
	std::vector<double> v(n);
	for (auto &x : v) {
		x = d(rng);
	}
	return v;
}

inline std::vector<double> sine(std::size_t n, double period, double amp = 1.0, double phase = 0.0) {
	std::vector<double> v(n);
	for (std::size_t i = 0; i < n; ++i) {
		v[i] = amp * std::sin(2 * std::numbers::pi * static_cast<double>(i) / period + phase);
	}
	return v;
}

inline std::vector<double> ar1(std::size_t n, double phi, std::uint64_t seed, double sd = 1.0) {
	const auto e = gaussian(n + 200, seed, sd);
	std::vector<double> y(n + 200, 0.0);
	for (std::size_t i = 1; i < y.size(); ++i) {
		y[i] = phi * y[i - 1] + e[i];
	}
	return {y.begin() + 200, y.end()};
}

inline AnomalyLabelSeries labels(const std::vector<int> &v, std::int64_t step = 60) {
	std::vector<bool> b(v.begin(), v.end());
	return AnomalyLabelSeries(grid(v.size(), step), b);
}

inline double rel_err(double a, double b) {
	return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

} // namespace tsi::testing
