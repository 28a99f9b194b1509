#include "tsintel/anomaly/detector.hpp"

#include <limits>

namespace tsi {

UnivariateTimeSeries AnomalyScoreSeries::to_univariate(std::string name) const {
	return UnivariateTimeSeries(std::move(name), stamps, scores);
}

Timestamp first_stamp(const TimeSeries &ts) {
	Timestamp best = std::numeric_limits<Timestamp>::max();
	for (const auto &u : ts.univariates()) {
		if (!u.empty()) {
			best = std::min(best, u.stamp(0));
		}
	}
	return best;
}

AnomalyScoreSeries AnomalyDetector::train(const TimeSeries &ts) {
	if (ts.empty()) {
		throw InvalidArgument(name() + ": empty training series");
	}
	train_impl(ts);
	trained_ = true;
	return score_impl(ts, first_stamp(ts));
}

AnomalyScoreSeries AnomalyDetector::score(const TimeSeries &ts, const TimeSeries *prev) const {
	if (!trained_) {
		throw InvalidArgument(name() + ": score called before train");
	}
	if (ts.empty()) {
		return {};
	}
	const Timestamp from = first_stamp(ts);
	if (prev == nullptr || prev->empty()) {
		return score_impl(ts, from);
	}
	const TimeSeries head = prev->slice_time(std::numeric_limits<Timestamp>::min(), from - 1);
	return score_impl(head.concat(ts), from);
}

} // namespace tsi
