#pragma once

#include "tsintel/forecast/forecaster.hpp"

#include <span>
#include <string>
#include <vector>

namespace tsi {

/// Additive-error ETS form: trend none/additive, season none/additive with period m.
struct EtsSpec {
	bool trend = false;
	bool season = false;
	int m = 1;

	/// Free parameters: smoothing weights plus initial states (seasonal states sum to zero).
	int parameter_count() const;
	std::string to_string() const;
	bool operator==(const EtsSpec &) const = default;
};

struct EtsParams {
	EtsSpec spec;
	double alpha = 0.5;
	double beta = 0.0;
	double gamma = 0.0;
	double level0 = 0.0;
	double trend0 = 0.0;
	/// Seasonal offsets for the first m time steps (sum to zero).
	std::vector<double> season0;
	double sigma2 = 0.0;
	double sse = 0.0;
	std::size_t n_used = 0;
	double aic = 0.0;
	bool converged = false;
};

struct EtsFitOptions {
	int max_iterations = 2000;
	double rel_tol = 1e-8;
};

/**
 * Fit smoothing weights by Nelder-Mead on the one-step SSE. For fixed weights
 * the one-step errors are affine in the initial states, so those are solved by
 * least squares inside every objective evaluation.
 */
EtsParams ets_fit(std::span<const double> y, const EtsSpec &spec, const EtsFitOptions &opts = {});

/// Final filter state after running over `y` from the fitted initial states.
struct EtsState {
	double level = 0.0;
	double trend = 0.0;
	/// ring[i] holds the seasonal offset for time index t with t mod m == i.
	std::vector<double> ring;
	std::size_t t = 0;
	std::vector<double> fitted;
};

/// Run the state equations over `y`; `phase` is the seasonal index of y[0].
EtsState ets_filter(const EtsParams &params, std::span<const double> y, std::size_t phase = 0);

struct EtsForecast {
	std::vector<double> values;
	std::vector<double> stderrs;
};

EtsForecast ets_forecast(const EtsParams &params, std::span<const double> history, std::size_t horizon,
                         std::size_t phase = 0);

class Ets : public Forecaster {
public:
	explicit Ets(EtsSpec spec = {}, ForecasterConfig cfg = {}, EtsFitOptions opts = {});
	static Ets from_params(EtsParams params, const TimeSeries &ts, ForecasterConfig cfg = {});

	std::string name() const override { return "ets" + spec_.to_string(); }
	std::unique_ptr<Forecaster> clone_untrained() const override;

	const EtsParams &params() const { return params_; }

protected:
	void train_impl(const TimeSeries &transformed) override;
	ForecastResult forecast_impl(std::size_t horizon, const TimeSeries &history) const override;
	ForecastResult one_step_impl(const TimeSeries &full, Timestamp from) const override;

private:
	std::size_t phase_of(const UnivariateTimeSeries &u) const;

	EtsSpec spec_;
	EtsFitOptions opts_;
	EtsParams params_;
	Timestamp origin_ = 0;
	std::int64_t step_ = 1;
	bool preset_ = false;
};

} // namespace tsi
