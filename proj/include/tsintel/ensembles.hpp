#pragma once

#include "tsintel/evaluation/metrics.hpp"
#include "tsintel/forecast/forecaster.hpp"
#include "tsintel/post_process.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace tsi {

enum class CombineMode { Mean, Median, MetricSelect };

std::string to_string(CombineMode m);
CombineMode combine_mode_from_string(const std::string &s);

struct Combiner {
	CombineMode mode = CombineMode::Mean;
	ForecastMetric metric = ForecastMetric::SMAPE;
	double validation_fraction = 0.2;

	void validate() const;
};

/// Per-position mean or median across member value vectors of equal length.
std::vector<double> combine_values(const std::vector<std::vector<double>> &members, CombineMode mode);

using ForecasterFactory = std::function<std::unique_ptr<Forecaster>()>;

struct ModelSelection {
	std::unique_ptr<Forecaster> model;
	std::size_t chosen = 0;
	/// Validation metric per candidate; NaN for candidates that failed.
	std::vector<double> validation;
};

/**
 * Train each candidate on the leading (1 - validation_fraction) of `ts`, score
 * it on the trailing part, and retrain the best (lowest metric, first listed on
 * ties) on all of `ts`. Failing candidates are excluded.
 */
ModelSelection model_select(const std::vector<ForecasterFactory> &factories, const TimeSeries &ts,
                            ForecastMetric metric = ForecastMetric::SMAPE, double validation_fraction = 0.2);

/**
 * Forecaster combining member forecasts per timestamp (mean or median), or
 * keeping only the member chosen by model_select. Members that fail to train
 * or forecast are dropped and listed in dropped().
 */
class ForecasterEnsemble : public Forecaster {
public:
	ForecasterEnsemble(std::vector<std::unique_ptr<Forecaster>> members, Combiner combiner = {},
	                   ForecasterConfig cfg = {});

	std::string name() const override { return "ensemble"; }
	std::unique_ptr<Forecaster> clone_untrained() const override;
	std::size_t min_history() const override;

	std::size_t member_count() const { return members_.size(); }
	const Forecaster &member(std::size_t i) const { return *members_.at(i); }
	const std::vector<std::string> &dropped() const { return dropped_; }

protected:
	void train_impl(const TimeSeries &transformed) override;
	ForecastResult forecast_impl(std::size_t horizon, const TimeSeries &history) const override;
	ForecastResult one_step_impl(const TimeSeries &full, Timestamp from) const override;

private:
	ForecastResult combine(std::vector<ForecastResult> parts) const;

	std::vector<std::unique_ptr<Forecaster>> prototypes_;
	std::vector<std::unique_ptr<Forecaster>> members_;
	Combiner combiner_;
	mutable std::vector<std::string> dropped_;
};

/// Mean of calibrated score series on the intersection of their timestamps.
AnomalyScoreSeries combine_calibrated(const std::vector<AnomalyScoreSeries> &members);

/// Mean of member calibrated scores; members failing to train are dropped.
class AnomalyEnsemble : public AnomalyModel {
public:
	explicit AnomalyEnsemble(std::vector<std::unique_ptr<AnomalyModel>> members);

	AnomalyScoreSeries train(const TimeSeries &ts) override;
	void retrain(const TimeSeries &ts) override;
	AnomalyScoreSeries score(const TimeSeries &ts, const TimeSeries *prev = nullptr) const override;
	std::string name() const override { return "ensemble"; }
	std::unique_ptr<AnomalyModel> clone_untrained() const override;

	std::size_t member_count() const { return members_.size(); }
	const AnomalyModel &member(std::size_t i) const { return *members_.at(i); }
	const std::vector<std::string> &dropped() const { return dropped_; }

private:
	std::vector<std::unique_ptr<AnomalyModel>> members_;
	std::vector<std::string> dropped_;
};

/// Threshold the mean calibrated score of trained members over `ts`.
AnomalyLabelSeries anomaly_ensemble(const std::vector<const AnomalyModel *> &members, const TimeSeries &ts,
                                    const ThresholdRule &rule, const TimeSeries *prev = nullptr);

} // namespace tsi
