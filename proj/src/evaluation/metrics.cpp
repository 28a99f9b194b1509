#include "tsintel/evaluation/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace tsi {

std::string to_string(ForecastMetric m) {
	switch (m) {
	case ForecastMetric::MAE: return "mae";
	case ForecastMetric::RMSE: return "rmse";
	case ForecastMetric::SMAPE: return "smape";
	case ForecastMetric::MARRE: return "marre";
	}
	return "?";
}

ForecastMetric forecast_metric_from_string(const std::string &s) {
	for (auto m : {ForecastMetric::MAE, ForecastMetric::RMSE, ForecastMetric::SMAPE, ForecastMetric::MARRE}) {
		if (to_string(m) == s) {
			return m;
		}
	}
	throw ConfigError("unknown forecast metric '" + s + "'");
}

std::string to_string(AnomalyMetric m) {
	switch (m) {
	case AnomalyMetric::PW: return "pw";
	case AnomalyMetric::PA: return "pa";
	case AnomalyMetric::RPA: return "rpa";
	}
	return "?";
}

AnomalyMetric anomaly_metric_from_string(const std::string &s) {
	for (auto m : {AnomalyMetric::PW, AnomalyMetric::PA, AnomalyMetric::RPA}) {
		if (to_string(m) == s) {
			return m;
		}
	}
	throw ConfigError("unknown anomaly metric '" + s + "'");
}

namespace {

void check_lengths(std::span<const double> y, std::span<const double> yhat) {
	if (y.size() != yhat.size() || y.empty()) {
		throw MetricError("forecast metric needs equal, non-zero lengths (got " + std::to_string(y.size()) + " and " +
		                  std::to_string(yhat.size()) + ")");
	}
}

} // namespace

SmapeDetail smape(std::span<const double> y, std::span<const double> yhat) {
	check_lengths(y, yhat);
	SmapeDetail d;
	double sum = 0.0;
	for (std::size_t i = 0; i < y.size(); ++i) {
		const double den = std::abs(y[i]) + std::abs(yhat[i]);
		if (den == 0.0) {
			++d.skipped;
			continue;
		}
		sum += std::abs(y[i] - yhat[i]) / den;
	}
	const std::size_t used = y.size() - d.skipped;
	d.value = used > 0 ? 200.0 * sum / static_cast<double>(used) : 0.0;
	return d;
}

double forecast_metric(ForecastMetric kind, std::span<const double> y, std::span<const double> yhat) {
	check_lengths(y, yhat);
	const double n = static_cast<double>(y.size());
	double abs_sum = 0.0, sq_sum = 0.0;
	for (std::size_t i = 0; i < y.size(); ++i) {
		const double e = y[i] - yhat[i];
		abs_sum += std::abs(e);
		sq_sum += e * e;
	}
	switch (kind) {
	case ForecastMetric::MAE: return abs_sum / n;
	case ForecastMetric::RMSE: return std::sqrt(sq_sum / n);
	case ForecastMetric::SMAPE: return smape(y, yhat).value;
	case ForecastMetric::MARRE: {
		const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
		if (*hi == *lo) {
			throw MetricError("MARRE is undefined for constant truth");
		}
		return abs_sum / n / (*hi - *lo);
	}
	}
	return 0.0;
}

DetectionScore detection_score(std::size_t tp, std::size_t fp, std::size_t fn) {
	DetectionScore s{tp, fp, fn};
	s.precision = tp + fp > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
	s.recall = tp + fn > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
	s.f1 = s.precision + s.recall > 0.0 ? 2.0 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
	return s;
}

namespace {

/// Predicted flags on the truth grid.
std::vector<bool> project(const AnomalyLabelSeries &truth, const AnomalyLabelSeries &pred) {
	std::vector<bool> out(truth.size(), false);
	const auto ts = truth.stamps();
	for (std::size_t i = 0; i < pred.size(); ++i) {
		if (!pred.labels()[i]) {
			continue;
		}
		const Timestamp t = pred.stamps()[i];
		const auto it = std::lower_bound(ts.begin(), ts.end(), t);
		if (it == ts.end() || *it != t) {
			throw MetricError("predicted alert at " + std::to_string(t) + " is not on the truth grid");
		}
		out[static_cast<std::size_t>(it - ts.begin())] = true;
	}
	return out;
}

} // namespace

DetectionScore anomaly_metric(AnomalyMetric kind, const AnomalyLabelSeries &truth, const AnomalyLabelSeries &pred) {
	const auto p = project(truth, pred);
	const auto &y = truth.labels();
	std::size_t fp = 0;
	for (std::size_t i = 0; i < p.size(); ++i) {
		fp += p[i] && !y[i] ? 1 : 0;
	}
	std::size_t tp = 0, fn = 0;
	if (kind == AnomalyMetric::PW) {
		for (std::size_t i = 0; i < p.size(); ++i) {
			tp += p[i] && y[i] ? 1 : 0;
			fn += !p[i] && y[i] ? 1 : 0;
		}
		return detection_score(tp, fp, fn);
	}
	for (const auto &w : truth.windows()) {
		const bool hit = std::any_of(p.begin() + static_cast<std::ptrdiff_t>(w.first),
		                             p.begin() + static_cast<std::ptrdiff_t>(w.last + 1), [](bool b) { return b; });
		const std::size_t weight = kind == AnomalyMetric::PA ? w.length() : 1;
		(hit ? tp : fn) += weight;
	}
	return detection_score(tp, fp, fn);
}

std::optional<double> mean_time_to_detect(const AnomalyLabelSeries &truth, const AnomalyLabelSeries &pred) {
	const auto p = project(truth, pred);
	double total = 0.0;
	std::size_t detected = 0;
	for (const auto &w : truth.windows()) {
		for (std::size_t i = w.first; i <= w.last; ++i) {
			if (p[i]) {
				total += static_cast<double>(truth.stamps()[i] - w.start);
				++detected;
				break;
			}
		}
	}
	if (detected == 0) {
		return std::nullopt;
	}
	return total / static_cast<double>(detected);
}

} // namespace tsi
