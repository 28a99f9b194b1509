#pragma once

#include "tsintel/forecast/forecaster.hpp"
#include "tsintel/numerics.hpp"

#include <compare>
#include <span>
#include <string>
#include <vector>

namespace tsi {

/// SARIMA(p,d,q)x(P,D,Q)_m orders plus whether a mean term is estimated.
struct SarimaOrders {
	int p = 0;
	int d = 0;
	int q = 0;
	int P = 0;
	int D = 0;
	int Q = 0;
	int m = 1;
	bool intercept = true;

	/// Number of estimated coefficients (ARMA terms plus the mean term).
	int coefficient_count() const { return p + q + P + Q + (intercept ? 1 : 0); }
	/// Minimum series length for a fit.
	std::size_t min_length() const;
	std::string to_string() const;

	auto operator<=>(const SarimaOrders &) const = default;
};

/**
 * Fitted SARIMA model. The ARMA part operates on the differenced series
 * w = (1-B)^d (1-B^m)^D y around mean `mean`:
 *   phi(B) Phi(B^m) (w_t - mean) = theta(B) Theta(B^m) e_t
 */
struct SarimaParams {
	SarimaOrders orders;
	std::vector<double> phi;
	std::vector<double> theta;
	std::vector<double> seasonal_phi;
	std::vector<double> seasonal_theta;
	double mean = 0.0;
	double sigma2 = 0.0;
	double sse = 0.0;
	/// Number of innovations entering the conditional sum of squares.
	std::size_t n_used = 0;
	double aic = 0.0;
	bool converged = false;
	int iterations = 0;

	/// Intercept c of the differenced-series equation: mean * phi(1) * Phi(1).
	double intercept() const;
};

struct SarimaFitOptions {
	int max_iterations = 2000;
	double rel_tol = 1e-8;
	/// Warm start; must match the orders when non-empty.
	std::vector<double> initial;
};

/// True when every root of 1 - a_1 z - ... - a_k z^k lies strictly outside the unit circle.
bool lag_poly_stable(std::span<const double> a);

/// True when the expanded AR or MA polynomial has a root of modulus below `min_modulus`.
bool sarima_near_unit_root(const SarimaParams &params, double min_modulus = 1.01);

/// Parameter vector [mean (if intercept), phi, theta, Phi, Theta], the optimizer's layout.
std::vector<double> sarima_pack(const SarimaParams &params);

/// Expanded polynomial coefficients a_k of phi(B)Phi(B^m) = 1 - sum a_k B^k (k >= 1).
std::vector<double> sarima_ar_poly(const SarimaParams &params);
/// Expanded b_k of theta(B)Theta(B^m) = 1 + sum b_k B^k (k >= 1).
std::vector<double> sarima_ma_poly(const SarimaParams &params);
/// Apply (1-B)^d (1-B^m)^D.
std::vector<double> sarima_difference(std::span<const double> y, int d, int D, int m);
/// Conditional innovations of the differenced series; zero before the AR start.
std::vector<double> sarima_innovations(const SarimaParams &params, std::span<const double> w);

/**
 * Conditional-sum-of-squares fit via Nelder-Mead.
 *
 * AIC = n ln(SSE / n) + 2 (k + 1) with k = orders.coefficient_count(). When
 * the optimizer stops on the iteration limit the result carries converged = false.
 * Throws SpecError if the series is too short and FitError if no finite SSE exists.
 */
SarimaParams sarima_fit(std::span<const double> y, const SarimaOrders &orders, const SarimaFitOptions &opts = {});

struct SarimaForecast {
	std::vector<double> values;
	std::vector<double> stderrs;
};

/// Iterated forecast with future innovations set to zero; stderrs from psi weights.
SarimaForecast sarima_forecast(const SarimaParams &params, std::span<const double> history, std::size_t horizon);
/// History length sarima_forecast needs.
std::size_t sarima_min_history(const SarimaOrders &orders);

/// Fit failure carrying the best parameters found.
class FitError : public Error {
public:
	FitError(const std::string &what, SarimaParams best) : Error(what), best_(std::move(best)) {}
	const SarimaParams &best() const { return best_; }

private:
	SarimaParams best_;
};

/// Forecaster wrapper over sarima_fit / sarima_forecast.
class Sarima : public Forecaster {
public:
	Sarima(SarimaOrders orders, ForecasterConfig cfg = {}, SarimaFitOptions opts = {});
	/// Wrap already-fitted parameters (trained on `ts`).
	static Sarima from_params(SarimaParams params, const TimeSeries &ts, ForecasterConfig cfg = {});

	std::string name() const override { return "arima" + orders_.to_string(); }
	std::unique_ptr<Forecaster> clone_untrained() const override;
	std::size_t min_history() const override { return sarima_min_history(orders_); }

	const SarimaParams &params() const { return params_; }
	const SarimaOrders &orders() const { return orders_; }

protected:
	void train_impl(const TimeSeries &transformed) override;
	ForecastResult forecast_impl(std::size_t horizon, const TimeSeries &history) const override;
	ForecastResult one_step_impl(const TimeSeries &full, Timestamp from) const override;

private:
	SarimaOrders orders_;
	SarimaFitOptions opts_;
	SarimaParams params_;
	bool preset_ = false;
};

} // namespace tsi
