#pragma once

#include "tsintel/evaluation/metrics.hpp"
#include "tsintel/forecast/forecaster.hpp"
#include "tsintel/post_process.hpp"

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace tsi {

enum class Cadence { None, Hourly, Daily, Weekly };

std::string to_string(Cadence c);
Cadence cadence_from_string(const std::string &s);

/// When to retrain and on how much history.
struct RetrainSchedule {
	Cadence cadence = Cadence::None;
	/// Training window length in seconds; 0 means the full history.
	std::int64_t window_seconds = 0;

	std::int64_t cadence_seconds() const;
	void validate() const;
};

enum class InferenceMode { Batch, Streaming, Window };

std::string to_string(InferenceMode m);

/// Batch forecasts a whole retrain segment at once; Window(h) issues rolling
/// h-step forecasts conditioned on the true history; Streaming is Window(1)
/// (for anomaly detection, point-at-a-time scoring).
struct Inference {
	InferenceMode mode = InferenceMode::Batch;
	std::size_t horizon = 1;

	static Inference batch() { return {InferenceMode::Batch, 0}; }
	static Inference streaming() { return {InferenceMode::Streaming, 1}; }
	static Inference window(std::size_t h) { return {InferenceMode::Window, h}; }
};

/// Retrain boundaries s0 + k * cadence (k >= 0) strictly before `last`; only s0 without a cadence.
std::vector<Timestamp> retrain_boundaries(Timestamp s0, Timestamp last, const RetrainSchedule &schedule);

struct ForecastEval {
	std::vector<Timestamp> stamps;
	std::vector<double> truth;
	std::vector<double> predicted;
	std::map<std::string, double> metrics;
	std::size_t retrains = 0;
	std::size_t retrain_failures = 0;
	double train_seconds = 0.0;
	double predict_seconds = 0.0;
};

using ForecasterMaker = std::function<std::unique_ptr<Forecaster>()>;

/**
 * Simulated deployment of a forecaster: train on the data up to the split
 * point, predict the unseen test timestamps up to the next retrain boundary,
 * retrain on the scheduled window, and so on. A failed retrain keeps the
 * previous model. Metrics that are undefined for the series are omitted.
 */
ForecastEval run_forecast_eval(const ForecasterMaker &make, const TimeSeries &ts, double train_fraction,
                               const RetrainSchedule &schedule, const Inference &inference,
                               const std::vector<ForecastMetric> &metrics = {ForecastMetric::SMAPE});

struct AnomalyEval {
	AnomalyScoreSeries test_scores;
	AnomalyLabelSeries alerts;
	AnomalyLabelSeries truth;
	double threshold = 0.0;
	std::map<std::string, double> metrics;
	std::size_t retrains = 0;
	std::size_t retrain_failures = 0;
	double train_seconds = 0.0;
	double predict_seconds = 0.0;
};

using AnomalyMaker = std::function<std::unique_ptr<AnomalyModel>()>;

struct AnomalyEvalOptions {
	double train_fraction = 0.5;
	RetrainSchedule schedule;
	Inference inference = Inference::batch();
	ThresholdRule rule;
	/// Choose the threshold maximizing RPA F1 on the training split (needs training anomalies).
	bool tune_threshold = false;
};

/**
 * Simulated deployment of an anomaly model. Calibration is fitted once on the
 * initial training scores and kept across retrains; the threshold rule runs
 * over the concatenated test scores.
 */
AnomalyEval run_anomaly_eval(const AnomalyMaker &make, const TimeSeries &ts, const AnomalyLabelSeries &labels,
                             const AnomalyEvalOptions &opts);

struct ThresholdChoice {
	double threshold = 0.0;
	double f1 = 0.0;
};

/// Scan thresholds over the sorted unique |z|; maximize the metric's F1, ties to the largest threshold.
ThresholdChoice optimize_threshold(const AnomalyScoreSeries &scores, const AnomalyLabelSeries &truth,
                                   ThresholdRule rule, AnomalyMetric metric = AnomalyMetric::RPA);

/// Per-series results and aggregates of one model on a set of series.
struct EvalReport {
	struct Row {
		std::string series;
		std::string model;
		std::map<std::string, double> metrics;
		std::size_t retrains = 0;
		std::size_t retrain_failures = 0;
		std::string error;
		double train_seconds = 0.0;
		double predict_seconds = 0.0;
	};

	std::string task;
	RetrainSchedule schedule;
	std::vector<Row> rows;

	/// Mean and median of each metric over the rows that report it.
	std::map<std::string, double> aggregate_mean(const std::string &model) const;
	std::map<std::string, double> aggregate_median(const std::string &model) const;
	std::vector<std::string> models() const;
};

} // namespace tsi
