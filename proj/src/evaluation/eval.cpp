#include "tsintel/evaluation/eval.hpp"
#include "tsintel/numerics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace tsi {

namespace {

constexpr Timestamp kMinStamp = std::numeric_limits<Timestamp>::min();
constexpr Timestamp kMaxStamp = std::numeric_limits<Timestamp>::max();

class Stopwatch {
public:
	Stopwatch() : start_(std::chrono::steady_clock::now()) {}
	double seconds() const {
		return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
	}

private:
	std::chrono::steady_clock::time_point start_;
};

Timestamp window_start(Timestamp boundary, const RetrainSchedule &s) {
	return s.window_seconds > 0 ? boundary - s.window_seconds + 1 : kMinStamp;
}

/// Positions [begin, end) of `stamps` inside (lo, hi].
std::pair<std::size_t, std::size_t> segment(std::span<const Timestamp> stamps, Timestamp lo, Timestamp hi) {
	const auto b = std::upper_bound(stamps.begin(), stamps.end(), lo) - stamps.begin();
	const auto e = std::upper_bound(stamps.begin(), stamps.end(), hi) - stamps.begin();
	return {static_cast<std::size_t>(b), static_cast<std::size_t>(std::max(b, e))};
}

std::size_t chunk_size(const Inference &inf, std::size_t segment_len) {
	switch (inf.mode) {
	case InferenceMode::Batch: return std::max<std::size_t>(segment_len, 1);
	case InferenceMode::Streaming: return 1;
	case InferenceMode::Window: return std::max<std::size_t>(inf.horizon, 1);
	}
	return 1;
}

} // namespace

std::string to_string(Cadence c) {
	switch (c) {
	case Cadence::None: return "none";
	case Cadence::Hourly: return "hourly";
	case Cadence::Daily: return "daily";
	case Cadence::Weekly: return "weekly";
	}
	return "?";
}

Cadence cadence_from_string(const std::string &s) {
	for (auto c : {Cadence::None, Cadence::Hourly, Cadence::Daily, Cadence::Weekly}) {
		if (to_string(c) == s) {
			return c;
		}
	}
	throw ConfigError("unknown retrain cadence '" + s + "' (expected none, hourly, daily or weekly)");
}

std::string to_string(InferenceMode m) {
	switch (m) {
	case InferenceMode::Batch: return "batch";
	case InferenceMode::Streaming: return "streaming";
	case InferenceMode::Window: return "window";
	}
	return "?";
}

std::int64_t RetrainSchedule::cadence_seconds() const {
	switch (cadence) {
	case Cadence::None: return 0;
	case Cadence::Hourly: return 3600;
	case Cadence::Daily: return 86400;
	case Cadence::Weekly: return 604800;
	}
	return 0;
}

void RetrainSchedule::validate() const {
	if (window_seconds < 0) {
		throw InvalidArgument("training window must be positive (or 0 for the full history)");
	}
}

std::vector<Timestamp> retrain_boundaries(Timestamp s0, Timestamp last, const RetrainSchedule &schedule) {
	std::vector<Timestamp> out{s0};
	const auto step = schedule.cadence_seconds();
	if (step <= 0) {
		return out;
	}
	for (Timestamp b = s0 + step; b < last; b += step) {
		out.push_back(b);
	}
	return out;
}

ForecastEval run_forecast_eval(const ForecasterMaker &make, const TimeSeries &ts, double train_fraction,
                               const RetrainSchedule &schedule, const Inference &inference,
                               const std::vector<ForecastMetric> &metrics) {
	schedule.validate();
	const auto split = split_at(ts, train_fraction);
	const Timestamp s0 = split.split_point;
	std::unique_ptr<Forecaster> model;
	ForecastEval out;

	auto probe = make();
	const std::size_t k = probe->target_index();
	const auto &target = ts.univariate(k);
	const auto stamps = target.stamps();
	const auto [test_begin, test_end] = segment(stamps, s0, kMaxStamp);
	if (test_begin == test_end) {
		throw SplitError("no test points after the split");
	}
	const auto bounds = retrain_boundaries(s0, stamps[test_end - 1], schedule);

	for (std::size_t bi = 0; bi < bounds.size(); ++bi) {
		const Timestamp b = bounds[bi];
		const Timestamp next = bi + 1 < bounds.size() ? bounds[bi + 1] : kMaxStamp;
		const Timestamp lo = window_start(b, schedule);
		{
			Stopwatch sw;
			auto fresh = bi == 0 ? std::move(probe) : make();
			try {
				fresh->train(ts.slice_time(lo, b));
				model = std::move(fresh);
				++out.retrains;
			} catch (const Error &) {
				if (!model) {
					throw;
				}
				++out.retrain_failures;
			}
			out.train_seconds += sw.seconds();
		}
		Stopwatch sw;
		const auto [sb, se] = segment(stamps, b, next);
		const std::size_t chunk = chunk_size(inference, se - sb);
		for (std::size_t i = sb; i < se; i += chunk) {
			const std::size_t j = std::min(se, i + chunk);
			const std::span<const Timestamp> want = stamps.subspan(i, j - i);
			ForecastResult r;
			if (inference.mode == InferenceMode::Batch) {
				r = model->forecast(want);
			} else {
				const TimeSeries history = ts.slice_time(lo, want.front() - 1);
				r = model->forecast(want, &history);
			}
			for (std::size_t q = 0; q < r.size(); ++q) {
				out.stamps.push_back(want[q]);
				out.truth.push_back(target.value(i + q));
				out.predicted.push_back(r.values[q]);
			}
		}
		out.predict_seconds += sw.seconds();
	}
	for (auto m : metrics) {
		try {
			out.metrics[to_string(m)] = forecast_metric(m, out.truth, out.predicted);
		} catch (const MetricError &) {
		}
	}
	return out;
}

ThresholdChoice optimize_threshold(const AnomalyScoreSeries &scores, const AnomalyLabelSeries &truth,
                                   ThresholdRule rule, AnomalyMetric metric) {
	if (truth.windows().empty()) {
		throw MetricError("threshold optimization needs at least one anomaly in the truth labels");
	}
	if (scores.empty()) {
		throw MetricError("threshold optimization needs scores");
	}
	std::vector<double> levels;
	levels.reserve(scores.size());
	for (double s : scores.scores) {
		levels.push_back(std::abs(s));
	}
	std::sort(levels.begin(), levels.end());
	levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
	ThresholdChoice best{levels.front(), -1.0};
	for (double tau : levels) {
		rule.threshold = tau;
		const double f1 = anomaly_metric(metric, truth, apply_threshold(rule, scores)).f1;
		if (f1 >= best.f1) {
			best = {tau, f1};
		}
	}
	return best;
}

AnomalyEval run_anomaly_eval(const AnomalyMaker &make, const TimeSeries &ts, const AnomalyLabelSeries &labels,
                             const AnomalyEvalOptions &opts) {
	opts.schedule.validate();
	const auto split = split_at(ts, opts.train_fraction);
	const Timestamp s0 = split.split_point;
	const auto grid = ts.stamp_union();
	const auto [test_begin, test_end] = segment(grid, s0, kMaxStamp);
	if (test_begin == test_end) {
		throw SplitError("no test points after the split");
	}
	const auto bounds = retrain_boundaries(s0, grid[test_end - 1], opts.schedule);

	AnomalyEval out;
	auto model = make();
	AnomalyScoreSeries train_scores;
	{
		Stopwatch sw;
		train_scores = model->train(ts.slice_time(window_start(s0, opts.schedule), s0));
		++out.retrains;
		out.train_seconds += sw.seconds();
	}
	ThresholdRule rule = opts.rule;
	if (opts.tune_threshold) {
		const auto train_truth = labels.slice_time(kMinStamp, s0);
		if (!train_truth.windows().empty()) {
			rule.threshold = optimize_threshold(train_scores, train_truth, rule).threshold;
		}
	}
	out.threshold = rule.threshold;

	for (std::size_t bi = 0; bi < bounds.size(); ++bi) {
		const Timestamp b = bounds[bi];
		const Timestamp next = bi + 1 < bounds.size() ? bounds[bi + 1] : kMaxStamp;
		const Timestamp lo = window_start(b, opts.schedule);
		if (bi > 0) {
			Stopwatch sw;
			try {
				model->retrain(ts.slice_time(lo, b));
				++out.retrains;
			} catch (const Error &) {
				++out.retrain_failures;
			}
			out.train_seconds += sw.seconds();
		}
		Stopwatch sw;
		const auto [sb, se] = segment(grid, b, next);
		const std::size_t chunk = chunk_size(opts.inference, se - sb);
		for (std::size_t i = sb; i < se; i += chunk) {
			const std::size_t j = std::min(se, i + chunk);
			const TimeSeries part = ts.slice_time(grid[i], grid[j - 1]);
			const TimeSeries history = ts.slice_time(lo, grid[i] - 1);
			const auto s = model->score(part, &history);
			out.test_scores.stamps.insert(out.test_scores.stamps.end(), s.stamps.begin(), s.stamps.end());
			out.test_scores.scores.insert(out.test_scores.scores.end(), s.scores.begin(), s.scores.end());
		}
		out.predict_seconds += sw.seconds();
	}
	out.test_scores.calibrated = true;
	out.alerts = apply_threshold(rule, out.test_scores);
	out.truth = labels.slice_time(s0 + 1, kMaxStamp);
	for (auto m : {AnomalyMetric::PW, AnomalyMetric::PA, AnomalyMetric::RPA}) {
		const auto sc = anomaly_metric(m, out.truth, out.alerts);
		out.metrics[to_string(m) + "_precision"] = sc.precision;
		out.metrics[to_string(m) + "_recall"] = sc.recall;
		out.metrics[to_string(m) + "_f1"] = sc.f1;
	}
	if (const auto mttd = mean_time_to_detect(out.truth, out.alerts)) {
		out.metrics["mttd"] = *mttd;
	}
	return out;
}

namespace {

std::map<std::string, std::vector<double>> collect(const EvalReport &r, const std::string &model) {
	std::map<std::string, std::vector<double>> by;
	for (const auto &row : r.rows) {
		if (row.model != model || !row.error.empty()) {
			continue;
		}
		for (const auto &[k, v] : row.metrics) {
			by[k].push_back(v);
		}
	}
	return by;
}

} // namespace

std::map<std::string, double> EvalReport::aggregate_mean(const std::string &model) const {
	std::map<std::string, double> out;
	for (const auto &[k, v] : collect(*this, model)) {
		out[k] = numerics::mean(v);
	}
	return out;
}

std::map<std::string, double> EvalReport::aggregate_median(const std::string &model) const {
	std::map<std::string, double> out;
	for (const auto &[k, v] : collect(*this, model)) {
		out[k] = numerics::median(v);
	}
	return out;
}

std::vector<std::string> EvalReport::models() const {
	std::vector<std::string> out;
	for (const auto &row : rows) {
		if (std::find(out.begin(), out.end(), row.model) == out.end()) {
			out.push_back(row.model);
		}
	}
	return out;
}

} // namespace tsi
