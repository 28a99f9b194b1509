#include "tsintel/automl.hpp"

#include <limits>

namespace tsi {

namespace {

ForecasterConfig inner_config(const ForecasterConfig &cfg) {
	ForecasterConfig c;
	c.target_index = cfg.target_index;
	c.max_lags = cfg.max_lags;
	return c;
}

std::pair<TimeSeries, TimeSeries> split_history(const TimeSeries &full, Timestamp from) {
	return {full.slice_time(std::numeric_limits<Timestamp>::min(), from - 1),
	        full.slice_time(from, std::numeric_limits<Timestamp>::max())};
}

ForecastResult strip_stamps(ForecastResult r) {
	r.stamps.clear();
	return r;
}

} // namespace

AutoSarima::AutoSarima(AutoSarimaConfig acfg, ForecasterConfig cfg) : Forecaster(std::move(cfg)), acfg_(acfg) {}

std::unique_ptr<Forecaster> AutoSarima::clone_untrained() const {
	return std::make_unique<AutoSarima>(acfg_, cfg_);
}

std::size_t AutoSarima::min_history() const {
	return inner_ ? inner_->min_history() : 1;
}

std::vector<ThetaCandidate> AutoSarima::generate_theta(std::span<const double> y) const {
	(void)y;
	std::vector<ThetaCandidate> out;
	for (const auto &o : stepwise_starts(selection_.m, selection_.d, selection_.D, acfg_.bounds)) {
		out.push_back({o, 0.0, false});
	}
	return out;
}

ThetaCandidate AutoSarima::evaluate_theta(std::span<const double> y, std::vector<ThetaCandidate> candidates) const {
	std::vector<SarimaOrders> starts;
	for (const auto &c : candidates) {
		starts.push_back(std::get<SarimaOrders>(c.theta));
	}
	auto res = stepwise_walk(y, starts, acfg_.bounds, acfg_.options);
	if (res.fallback) {
		throw FitError("stepwise search found no fittable SARIMA model", SarimaParams{});
	}
	last_fit_ = res.best;
	return {res.best.orders, res.best.aic, true};
}

void AutoSarima::set_theta(const ThetaCandidate &theta) {
	orders_ = std::get<SarimaOrders>(theta.theta);
}

void AutoSarima::train_impl(const TimeSeries &transformed) {
	const auto &u = target_of(transformed);
	const auto y = u.values();
	selection_ = acfg_.m > 0 ? select_orders_for_period(y, acfg_.m)
	                         : select_orders(y, median_gap(u.stamps()), acfg_.significance);
	try {
		set_theta(evaluate_theta(y, generate_theta(y)));
		params_ = *last_fit_;
	} catch (const FitError &) {
		params_ = stepwise_aic_search(y, selection_.m, selection_.D, selection_.d, acfg_.bounds, acfg_.options).best;
		orders_ = params_.orders;
	}
	inner_ = std::make_unique<Sarima>(Sarima::from_params(params_, transformed, inner_config(cfg_)));
}

ForecastResult AutoSarima::forecast_impl(std::size_t horizon, const TimeSeries &history) const {
	return strip_stamps(inner_->forecast(horizon, &history));
}

ForecastResult AutoSarima::one_step_impl(const TimeSeries &full, Timestamp from) const {
	const auto [head, tail] = split_history(full, from);
	return head.empty() ? inner_->one_step(tail) : inner_->one_step(tail, &head);
}

AutoEts::AutoEts(AutoEtsConfig acfg, ForecasterConfig cfg) : Forecaster(std::move(cfg)), acfg_(acfg) {}

std::unique_ptr<Forecaster> AutoEts::clone_untrained() const {
	return std::make_unique<AutoEts>(acfg_, cfg_);
}

std::vector<ThetaCandidate> AutoEts::generate_theta(std::span<const double> y) const {
	std::vector<ThetaCandidate> out{{EtsSpec{false, false, 1}, 0.0, false}, {EtsSpec{true, false, 1}, 0.0, false}};
	if (m_ > 1 && y.size() >= 2 * static_cast<std::size_t>(m_)) {
		out.push_back({EtsSpec{false, true, m_}, 0.0, false});
		out.push_back({EtsSpec{true, true, m_}, 0.0, false});
	}
	return out;
}

ThetaCandidate AutoEts::evaluate_theta(std::span<const double> y, std::vector<ThetaCandidate> candidates) const {
	ThetaCandidate best;
	bool have = false;
	for (auto &c : candidates) {
		try {
			c.aic = ets_fit(y, std::get<EtsSpec>(c.theta)).aic;
			c.evaluated = true;
		} catch (const Error &) {
			continue;
		}
		if (!have || c.aic < best.aic) {
			best = c;
			have = true;
		}
	}
	if (!have) {
		throw SpecError("no ETS candidate could be fit");
	}
	return best;
}

void AutoEts::set_theta(const ThetaCandidate &theta) {
	spec_ = std::get<EtsSpec>(theta.theta);
}

void AutoEts::train_impl(const TimeSeries &transformed) {
	const auto &u = target_of(transformed);
	const auto y = u.values();
	m_ = acfg_.m > 0 ? acfg_.m
	                 : detect_seasonality(y, acfg_.significance, default_candidate_periods(median_gap(u.stamps()))).m;
	set_theta(evaluate_theta(y, generate_theta(y)));
	params_ = ets_fit(y, spec_);
	inner_ = std::make_unique<Ets>(Ets::from_params(params_, transformed, inner_config(cfg_)));
}

ForecastResult AutoEts::forecast_impl(std::size_t horizon, const TimeSeries &history) const {
	return strip_stamps(inner_->forecast(horizon, &history));
}

ForecastResult AutoEts::one_step_impl(const TimeSeries &full, Timestamp from) const {
	const auto [head, tail] = split_history(full, from);
	return head.empty() ? inner_->one_step(tail) : inner_->one_step(tail, &head);
}

} // namespace tsi
