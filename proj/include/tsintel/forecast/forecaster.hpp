#pragma once

#include "tsintel/time_series.hpp"
#include "tsintel/transforms.hpp"

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace tsi {

/// Predictions for the target univariate, optionally with standard errors.
struct ForecastResult {
	std::vector<Timestamp> stamps;
	std::vector<double> values;
	/// Empty when the model produces no standard errors.
	std::vector<double> stderrs;

	std::size_t size() const { return stamps.size(); }
	bool has_stderr() const { return !stderrs.empty(); }
	UnivariateTimeSeries to_univariate(std::string name) const;
};

struct ForecasterConfig {
	/// Index k of the univariate to predict.
	std::size_t target_index = 0;
	/// Lag window length for lag-feature models.
	std::size_t max_lags = 21;
	/// Applied before training; forecasts are mapped back through it.
	TransformChain transform;
};

/**
 * Common interface of every forecaster.
 *
 * train() stores the untransformed training data as the default conditioning
 * history. forecast() may be conditioned on a different history
 * (`time_series_prev`), which replaces the model's rolling state without refitting.
 */
class Forecaster {
public:
	explicit Forecaster(ForecasterConfig cfg) : cfg_(std::move(cfg)) {}
	virtual ~Forecaster() = default;

	Forecaster(const Forecaster &) = default;
	Forecaster &operator=(const Forecaster &) = default;

	void train(const TimeSeries &ts);
	bool trained() const { return trained_; }

	/// Forecast the target at `stamps`, which must follow the conditioning history.
	ForecastResult forecast(std::span<const Timestamp> stamps, const TimeSeries *prev = nullptr) const;
	/// Forecast `horizon` steps on the median sampling interval of the history.
	ForecastResult forecast(std::size_t horizon, const TimeSeries *prev = nullptr) const;

	/**
	 * One-step-ahead predictions of the target at each timestamp of `ts`, each
	 * conditioned on the true values of `prev` followed by `ts` strictly before it.
	 * Timestamps lacking enough history are omitted from the result.
	 */
	ForecastResult one_step(const TimeSeries &ts, const TimeSeries *prev = nullptr) const;

	virtual std::string name() const = 0;
	/// Fresh untrained copy with the same configuration.
	virtual std::unique_ptr<Forecaster> clone_untrained() const = 0;

	const ForecasterConfig &config() const { return cfg_; }
	std::size_t target_index() const { return cfg_.target_index; }
	const TimeSeries &train_data() const { return train_data_; }
	/// Length of the history needed before forecasting (transformed space).
	virtual std::size_t min_history() const { return 1; }

protected:
	virtual void train_impl(const TimeSeries &transformed) = 0;
	/// Forecast `horizon` steps after `history` (transformed space).
	virtual ForecastResult forecast_impl(std::size_t horizon, const TimeSeries &history) const = 0;
	/// One-step predictions at rows of `full` with stamp >= `from` (transformed space).
	virtual ForecastResult one_step_impl(const TimeSeries &full, Timestamp from) const;

	/// Target univariate of `ts`, with bounds checking.
	const UnivariateTimeSeries &target_of(const TimeSeries &ts) const;

	ForecasterConfig cfg_;

private:
	bool trained_ = false;
	TimeSeries train_data_;
};

/// Equally spaced timestamps following `last`.
std::vector<Timestamp> future_stamps(Timestamp last, std::int64_t step, std::size_t horizon);

} // namespace tsi
