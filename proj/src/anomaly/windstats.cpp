#include "tsintel/anomaly/detectors.hpp"
#include "tsintel/numerics.hpp"

#include <algorithm>

namespace tsi {

std::size_t week_bucket(Timestamp t, std::int64_t window_seconds) {
	// 1970-01-01 was a Thursday; Monday 1970-01-05 maps to offset 0
	const std::int64_t offset = ((t + 3 * kSecondsPerDay) % kSecondsPerWeek + kSecondsPerWeek) % kSecondsPerWeek;
	return static_cast<std::size_t>(offset / window_seconds);
}

WindStats::WindStats(WindStatsConfig cfg) : cfg_(cfg) {
	if (cfg_.window_minutes <= 0) {
		throw InvalidArgument("windstats window must be positive");
	}
}

std::unique_ptr<AnomalyDetector> WindStats::clone_untrained() const {
	return std::make_unique<WindStats>(cfg_);
}

void WindStats::train_impl(const TimeSeries &ts) {
	const auto &u = ts.univariate(cfg_.target_index);
	if (u.size() < 2) {
		throw HistoryError("windstats needs at least two training points");
	}
	const std::int64_t ws = static_cast<std::int64_t>(cfg_.window_minutes) * 60;
	const std::size_t nb = static_cast<std::size_t>((kSecondsPerWeek + ws - 1) / ws);
	const double g_mu = numerics::mean(u.values());
	double g_sd = numerics::stddev(u.values());
	if (!(g_sd > 0.0)) {
		g_sd = 1.0;
	}
	mu_.assign(nb, g_mu);
	sd_.assign(nb, g_sd);
	global_fallback_ = u.stamps().back() - u.stamps().front() < 2 * kSecondsPerWeek;
	if (global_fallback_) {
		return;
	}
	std::vector<std::vector<double>> buckets(nb);
	for (std::size_t i = 0; i < u.size(); ++i) {
		buckets[week_bucket(u.stamp(i), ws)].push_back(u.value(i));
	}
	for (std::size_t b = 0; b < nb; ++b) {
		if (buckets[b].size() < 2) {
			continue;
		}
		const double sd = numerics::stddev(buckets[b]);
		mu_[b] = numerics::mean(buckets[b]);
		sd_[b] = sd > 0.0 ? sd : g_sd;
	}
}

AnomalyScoreSeries WindStats::score_impl(const TimeSeries &full, Timestamp from) const {
	const auto &u = full.univariate(cfg_.target_index);
	const std::int64_t ws = static_cast<std::int64_t>(cfg_.window_minutes) * 60;
	AnomalyScoreSeries out;
	for (std::size_t i = 0; i < u.size(); ++i) {
		if (u.stamp(i) < from) {
			continue;
		}
		const std::size_t b = week_bucket(u.stamp(i), ws);
		out.stamps.push_back(u.stamp(i));
		out.scores.push_back((u.value(i) - mu_[b]) / sd_[b]);
	}
	return out;
}

} // namespace tsi
