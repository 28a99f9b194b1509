#pragma once

#include <functional>
#include <span>
#include <vector>

namespace tsi::numerics {

double mean(std::span<const double> x);
/// Sample variance (n - 1 denominator); 0 for fewer than two points.
double variance(std::span<const double> x);
/// Population variance (n denominator).
double population_variance(std::span<const double> x);
double stddev(std::span<const double> x);
double median(std::vector<double> x);
/// Linear-interpolated quantile (type 7) of unsorted data.
double quantile(std::vector<double> x, double q);

/// Sample autocorrelations r_1..r_max_lag. A constant series yields zeros.
std::vector<double> autocorrelation(std::span<const double> x, std::size_t max_lag);

double normal_cdf(double x);
double normal_quantile(double p);

/// Upper-tail probability P[X >= k] for X ~ Binomial(n, 1/2).
double binomial_half_upper_tail(int n, int k);
/// Two-sided exact sign-test p-value for `wins` successes out of `n` non-tied pairs.
double sign_test_p_value(int wins, int n);

struct NelderMeadOptions {
	int max_iterations = 2000;
	double rel_tol = 1e-8;
	double abs_tol = 1e-14;
	double initial_step = 0.1;
};

struct NelderMeadResult {
	std::vector<double> x;
	double value = 0.0;
	int iterations = 0;
	int evaluations = 0;
	bool converged = false;
};

using Objective = std::function<double(std::span<const double>)>;

/**
 * Derivative-free simplex minimization (Nelder & Mead 1965, standard
 * reflection/expansion/contraction/shrink coefficients 1, 2, 0.5, 0.5).
 *
 * Converges when the spread of objective values across the simplex falls below
 * rel_tol relative to their magnitude (or abs_tol absolutely). Non-finite
 * objective values are treated as +infinity.
 */
NelderMeadResult nelder_mead(const Objective &f, std::vector<double> x0, const NelderMeadOptions &opts = {});

/**
 * Monotone piecewise cubic Hermite interpolant (Fritsch-Carlson derivatives, as
 * in PCHIP). Knots must be strictly increasing; values may be any monotone sequence.
 */
class Pchip {
public:
	Pchip() = default;
	Pchip(std::vector<double> x, std::vector<double> y);

	double operator()(double t) const;
	const std::vector<double> &knots() const { return x_; }
	const std::vector<double> &values() const { return y_; }
	const std::vector<double> &slopes() const { return d_; }

private:
	std::vector<double> x_;
	std::vector<double> y_;
	std::vector<double> d_;
};

} // namespace tsi::numerics
