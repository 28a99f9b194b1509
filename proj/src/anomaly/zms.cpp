#include "tsintel/anomaly/detectors.hpp"
#include "tsintel/numerics.hpp"

#include <cmath>
#include <limits>

namespace tsi {

std::vector<std::size_t> zms_lags(std::size_t n) {
	const std::size_t cap = std::max<std::size_t>(1, n / 8);
	std::vector<std::size_t> lags;
	for (std::size_t k = 1; k <= cap; k *= 2) {
		lags.push_back(k);
	}
	return lags;
}

Zms::Zms(ZmsConfig cfg) : cfg_(cfg) {}

std::unique_ptr<AnomalyDetector> Zms::clone_untrained() const {
	return std::make_unique<Zms>(cfg_);
}

void Zms::train_impl(const TimeSeries &ts) {
	const auto &u = ts.univariate(cfg_.target_index);
	const auto x = u.values();
	auto lags = zms_lags(x.size());
	if (cfg_.max_lag > 0) {
		std::erase_if(lags, [&](std::size_t k) { return k > cfg_.max_lag; });
	}
	if (lags.empty() || x.size() < 2 * lags.back()) {
		throw HistoryError("zms needs at least twice the largest lag in training points");
	}
	lags_.clear();
	mu_.clear();
	sd_.clear();
	for (auto k : lags) {
		std::vector<double> d(x.size() - k);
		for (std::size_t t = k; t < x.size(); ++t) {
			d[t - k] = x[t] - x[t - k];
		}
		const double sd = numerics::stddev(d);
		if (!(sd > 0.0)) {
			continue;
		}
		lags_.push_back(k);
		mu_.push_back(numerics::mean(d));
		sd_.push_back(sd);
	}
}

AnomalyScoreSeries Zms::score_impl(const TimeSeries &full, Timestamp from) const {
	const auto &u = full.univariate(cfg_.target_index);
	const auto x = u.values();
	AnomalyScoreSeries out;
	for (std::size_t t = 0; t < x.size(); ++t) {
		if (u.stamp(t) < from) {
			continue;
		}
		double best = -std::numeric_limits<double>::infinity();
		for (std::size_t i = 0; i < lags_.size(); ++i) {
			if (t < lags_[i]) {
				break;
			}
			best = std::max(best, (x[t] - x[t - lags_[i]] - mu_[i]) / sd_[i]);
		}
		out.stamps.push_back(u.stamp(t));
		out.scores.push_back(std::isfinite(best) ? best : 0.0);
	}
	return out;
}

} // namespace tsi
