#include "tsintel/forecast/forecaster.hpp"

#include <algorithm>

namespace tsi {

UnivariateTimeSeries ForecastResult::to_univariate(std::string name) const {
	return UnivariateTimeSeries(std::move(name), stamps, values);
}

std::vector<Timestamp> future_stamps(Timestamp last, std::int64_t step, std::size_t horizon) {
	if (step <= 0) {
		step = 1;
	}
	std::vector<Timestamp> out(horizon);
	for (std::size_t i = 0; i < horizon; ++i) {
		out[i] = last + step * static_cast<std::int64_t>(i + 1);
	}
	return out;
}

const UnivariateTimeSeries &Forecaster::target_of(const TimeSeries &ts) const {
	if (cfg_.target_index >= ts.dim()) {
		throw InvalidArgument("target index " + std::to_string(cfg_.target_index) + " out of range for a " +
		                      std::to_string(ts.dim()) + "-variable series");
	}
	return ts.univariate(cfg_.target_index);
}

void Forecaster::train(const TimeSeries &ts) {
	target_of(ts);
	TimeSeries transformed = cfg_.transform.fit_apply(ts);
	train_impl(transformed);
	train_data_ = ts;
	trained_ = true;
}

ForecastResult Forecaster::forecast(std::span<const Timestamp> stamps, const TimeSeries *prev) const {
	if (!trained_) {
		throw InvalidArgument(name() + ": forecast called before train");
	}
	const TimeSeries &history = prev != nullptr ? *prev : train_data_;
	const auto &target = target_of(history);
	for (std::size_t i = 0; i < stamps.size(); ++i) {
		if ((i > 0 && stamps[i] <= stamps[i - 1]) || (!target.empty() && stamps[i] <= target.stamps().back())) {
			throw InvalidArgument(name() + ": forecast stamps must be increasing and follow the history");
		}
	}
	const TimeSeries transformed = cfg_.transform.apply(history);
	if (target_of(transformed).size() < min_history()) {
		throw HistoryError(name() + ": needs at least " + std::to_string(min_history()) + " history points, got " +
		                   std::to_string(target_of(transformed).size()));
	}
	ForecastResult raw = forecast_impl(stamps.size(), transformed);
	ForecastResult out;
	out.stamps.assign(stamps.begin(), stamps.end());
	out.values = cfg_.transform.invert_continuation(cfg_.target_index, raw.values, history);
	if (raw.has_stderr()) {
		out.stderrs = cfg_.transform.invert_continuation_se(cfg_.target_index, raw.stderrs);
	}
	return out;
}

ForecastResult Forecaster::forecast(std::size_t horizon, const TimeSeries *prev) const {
	const TimeSeries &history = prev != nullptr ? *prev : train_data_;
	const auto &target = target_of(history);
	if (target.empty()) {
		throw HistoryError(name() + ": empty history");
	}
	const auto stamps = future_stamps(target.stamps().back(), median_gap(target.stamps()), horizon);
	return forecast(stamps, prev);
}

ForecastResult Forecaster::one_step(const TimeSeries &ts, const TimeSeries *prev) const {
	if (!trained_) {
		throw InvalidArgument(name() + ": one_step called before train");
	}
	const TimeSeries full = prev != nullptr ? prev->concat(ts) : ts;
	const auto &target = target_of(ts);
	if (target.empty()) {
		return {};
	}
	const Timestamp from = target.stamps().front();

	const auto &chain = cfg_.transform;
	std::vector<TimeSeries> stage_inputs;
	TimeSeries cur = full;
	for (const auto &t : chain.transforms()) {
		stage_inputs.push_back(cur);
		cur = t.apply(cur);
	}
	ForecastResult raw = one_step_impl(cur, from);
	if (chain.empty()) {
		return raw;
	}

	const std::size_t k = cfg_.target_index;
	ForecastResult out;
	for (std::size_t j = 0; j < raw.size(); ++j) {
		const Timestamp t = raw.stamps[j];
		std::vector<double> v{raw.values[j]};
		bool ok = true;
		for (std::size_t i = chain.size(); i-- > 0 && ok;) {
			const auto &u = stage_inputs[i].univariate(k);
			const auto pos = static_cast<std::size_t>(std::lower_bound(u.stamps().begin(), u.stamps().end(), t) -
			                                          u.stamps().begin());
			try {
				v = chain.at(i).invert_continuation(k, v, u.values().subspan(0, pos));
			} catch (const HistoryError &) {
				ok = false;
			}
		}
		if (!ok) {
			continue;
		}
		out.stamps.push_back(t);
		out.values.push_back(v[0]);
		if (raw.has_stderr()) {
			out.stderrs.push_back(chain.invert_continuation_se(k, std::span<const double>(&raw.stderrs[j], 1))[0]);
		}
	}
	return out;
}

ForecastResult Forecaster::one_step_impl(const TimeSeries &full, Timestamp from) const {
	ForecastResult out;
	const auto &target = target_of(full);
	const auto stamps = target.stamps();
	const auto start = static_cast<std::size_t>(std::lower_bound(stamps.begin(), stamps.end(), from) - stamps.begin());
	const bool aligned = full.is_aligned();
	for (std::size_t i = std::max(start, min_history()); i < stamps.size(); ++i) {
		TimeSeries history = aligned ? full.slice_rows(0, i) : full.slice_time(stamps.front(), stamps[i] - 1);
		ForecastResult r = forecast_impl(1, history);
		out.stamps.push_back(stamps[i]);
		out.values.push_back(r.values.at(0));
		if (r.has_stderr()) {
			out.stderrs.push_back(r.stderrs.at(0));
		}
	}
	return out;
}

} // namespace tsi
