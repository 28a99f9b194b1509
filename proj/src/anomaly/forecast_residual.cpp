#include "tsintel/anomaly/detectors.hpp"

#include <limits>

namespace tsi {

ForecastResidual::ForecastResidual(std::unique_ptr<Forecaster> forecaster) : forecaster_(std::move(forecaster)) {
	if (!forecaster_) {
		throw InvalidArgument("forecast residual detector needs a forecaster");
	}
}

std::string ForecastResidual::name() const {
	return "residual(" + forecaster_->name() + ")";
}

std::unique_ptr<AnomalyDetector> ForecastResidual::clone_untrained() const {
	return std::make_unique<ForecastResidual>(forecaster_->clone_untrained());
}

void ForecastResidual::train_impl(const TimeSeries &ts) {
	forecaster_->train(ts);
}

AnomalyScoreSeries ForecastResidual::score_impl(const TimeSeries &full, Timestamp from) const {
	const TimeSeries head = full.slice_time(std::numeric_limits<Timestamp>::min(), from - 1);
	const TimeSeries tail = full.slice_time(from, std::numeric_limits<Timestamp>::max());
	const ForecastResult pred = head.empty() ? forecaster_->one_step(tail) : forecaster_->one_step(tail, &head);

	const auto &target = full.univariate(forecaster_->target_index());
	AnomalyScoreSeries out;
	std::size_t j = 0;
	for (std::size_t i = 0; i < pred.size(); ++i) {
		while (target.stamp(j) < pred.stamps[i]) {
			++j;
		}
		const double resid = target.value(j) - pred.values[i];
		const double se = pred.has_stderr() ? pred.stderrs[i] : 0.0;
		out.stamps.push_back(pred.stamps[i]);
		out.scores.push_back(se > 0.0 ? resid / se : resid);
	}
	return out;
}

} // namespace tsi
