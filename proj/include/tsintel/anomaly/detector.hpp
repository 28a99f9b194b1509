#pragma once

#include "tsintel/time_series.hpp"

#include <memory>
#include <string>
#include <vector>

namespace tsi {

/// Per-timestamp anomaly scores. Larger |s| means more anomalous.
struct AnomalyScoreSeries {
	std::vector<Timestamp> stamps;
	std::vector<double> scores;
	bool calibrated = false;

	std::size_t size() const { return stamps.size(); }
	bool empty() const { return stamps.empty(); }
	UnivariateTimeSeries to_univariate(std::string name) const;
};

/**
 * Common interface of the anomaly scorers.
 *
 * train() fits the detector and returns its raw scores on the training data,
 * which is what a calibrator is fitted on. score() emits raw scores at every
 * timestamp of `ts`; `prev` supplies earlier history (lag windows, forecaster
 * state) without retraining.
 */
class AnomalyDetector {
public:
	virtual ~AnomalyDetector() = default;

	AnomalyScoreSeries train(const TimeSeries &ts);
	AnomalyScoreSeries score(const TimeSeries &ts, const TimeSeries *prev = nullptr) const;
	bool trained() const { return trained_; }

	virtual std::string name() const = 0;
	virtual std::unique_ptr<AnomalyDetector> clone_untrained() const = 0;

protected:
	virtual void train_impl(const TimeSeries &ts) = 0;
	/// Scores for the points of `full` with timestamp >= `from`.
	virtual AnomalyScoreSeries score_impl(const TimeSeries &full, Timestamp from) const = 0;

private:
	bool trained_ = false;
};

/// Earliest timestamp of any univariate in `ts`.
Timestamp first_stamp(const TimeSeries &ts);

} // namespace tsi
