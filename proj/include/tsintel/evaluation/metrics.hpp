#pragma once

#include "tsintel/time_series.hpp"

#include <optional>
#include <span>
#include <string>

namespace tsi {

enum class ForecastMetric { MAE, RMSE, SMAPE, MARRE };

std::string to_string(ForecastMetric m);
ForecastMetric forecast_metric_from_string(const std::string &s);

struct SmapeDetail {
	double value = 0.0;
	/// Terms skipped because |y| + |yhat| = 0.
	std::size_t skipped = 0;
};

/// sMAPE in percent, skipping zero-denominator terms (0 when every term is skipped).
SmapeDetail smape(std::span<const double> y, std::span<const double> yhat);

/// Throws MetricError on length mismatch, empty input, or MARRE with constant truth.
double forecast_metric(ForecastMetric kind, std::span<const double> y, std::span<const double> yhat);

enum class AnomalyMetric { PW, PA, RPA };

std::string to_string(AnomalyMetric m);
AnomalyMetric anomaly_metric_from_string(const std::string &s);

struct DetectionScore {
	std::size_t tp = 0;
	std::size_t fp = 0;
	std::size_t fn = 0;
	double precision = 0.0;
	double recall = 0.0;
	double f1 = 0.0;
};

/// Precision, recall and F1 from counts (each 0 when its denominator is 0).
DetectionScore detection_score(std::size_t tp, std::size_t fp, std::size_t fn);

/**
 * Point-wise (PW), point-adjusted (PA) or revised point-adjusted (RPA) scores.
 * Every predicted alert timestamp must occur in the truth grid.
 *
 * PW counts points. PA marks a whole truth window as true positives when any
 * alert falls inside it, otherwise as false negatives. RPA registers one true
 * positive per detected window and one false negative per missed window.
 * In all three, alerts outside truth windows are false positives, one per point.
 */
DetectionScore anomaly_metric(AnomalyMetric kind, const AnomalyLabelSeries &truth, const AnomalyLabelSeries &pred);

/// Mean seconds from window start to the first alert in it, over detected windows only.
std::optional<double> mean_time_to_detect(const AnomalyLabelSeries &truth, const AnomalyLabelSeries &pred);

} // namespace tsi
