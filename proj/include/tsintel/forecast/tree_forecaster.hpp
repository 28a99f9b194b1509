#pragma once

#include "tsintel/forecast/forecaster.hpp"
#include "tsintel/forecast/trees.hpp"

#include <vector>

namespace tsi {

/**
 * Autoregressive tree-ensemble forecaster.
 *
 * One ensemble per variable maps the flattened window of the previous
 * `max_lags` rows (all d variables) to that variable's next value. Forecasting
 * predicts every variable one step ahead, appends the predicted row to the
 * window and repeats, so any horizon is reachable.
 */
class TreeForecaster : public Forecaster {
public:
	explicit TreeForecaster(TreeEnsembleParams params = {}, ForecasterConfig cfg = {});

	std::string name() const override;
	std::unique_ptr<Forecaster> clone_untrained() const override;
	std::size_t min_history() const override { return cfg_.max_lags; }

	/// Predict every variable for the row following `window` (max_lags x d, oldest first).
	std::vector<double> predict_next(std::span<const std::vector<double>> window) const;
	const TreeEnsembleParams &params() const { return params_; }
	std::size_t dim() const { return models_.size(); }

protected:
	void train_impl(const TimeSeries &transformed) override;
	ForecastResult forecast_impl(std::size_t horizon, const TimeSeries &history) const override;
	ForecastResult one_step_impl(const TimeSeries &full, Timestamp from) const override;

private:
	std::vector<double> features(std::span<const std::vector<double>> window) const;

	TreeEnsembleParams params_;
	std::vector<TreeEnsemble> models_;
	double residual_sd_ = 0.0;
};

} // namespace tsi
