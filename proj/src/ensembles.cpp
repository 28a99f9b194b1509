#include "tsintel/ensembles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace tsi {

std::string to_string(CombineMode m) {
	switch (m) {
	case CombineMode::Mean: return "mean";
	case CombineMode::Median: return "median";
	case CombineMode::MetricSelect: return "select";
	}
	return "?";
}

CombineMode combine_mode_from_string(const std::string &s) {
	for (auto m : {CombineMode::Mean, CombineMode::Median, CombineMode::MetricSelect}) {
		if (to_string(m) == s) {
			return m;
		}
	}
	throw ConfigError("unknown combiner '" + s + "' (expected mean, median or select)");
}

void Combiner::validate() const {
	if (!(validation_fraction > 0.0 && validation_fraction <= 0.5)) {
		throw InvalidArgument("validation fraction must lie in (0, 0.5]");
	}
}

namespace {

// Equal inputs return that value exactly; the result never leaves [min, max].
double bounded_mean(const std::vector<double> &col) {
	const auto [lo, hi] = std::minmax_element(col.begin(), col.end());
	if (*lo == *hi) {
		return *lo;
	}
	double s = 0.0;
	for (double v : col) {
		s += v;
	}
	return std::clamp(s / static_cast<double>(col.size()), *lo, *hi);
}

} // namespace

std::vector<double> combine_values(const std::vector<std::vector<double>> &members, CombineMode mode) {
	if (members.empty()) {
		throw EnsembleError("nothing to combine");
	}
	const std::size_t n = members.front().size();
	std::vector<double> out(n);
	std::vector<double> col(members.size());
	for (std::size_t i = 0; i < n; ++i) {
		for (std::size_t j = 0; j < members.size(); ++j) {
			col[j] = members[j].at(i);
		}
		if (mode == CombineMode::Median) {
			std::sort(col.begin(), col.end());
			const std::size_t m = col.size();
			out[i] = m % 2 == 1 ? col[m / 2] : 0.5 * (col[m / 2 - 1] + col[m / 2]);
		} else {
			out[i] = bounded_mean(col);
		}
	}
	return out;
}

ModelSelection model_select(const std::vector<ForecasterFactory> &factories, const TimeSeries &ts,
                            ForecastMetric metric, double validation_fraction) {
	if (factories.empty()) {
		throw EnsembleError("model selection needs at least one candidate");
	}
	Combiner{CombineMode::MetricSelect, metric, validation_fraction}.validate();
	const auto split = split_at(ts, 1.0 - validation_fraction);

	ModelSelection sel;
	double best = std::numeric_limits<double>::infinity();
	bool found = false;
	for (std::size_t i = 0; i < factories.size(); ++i) {
		double value = std::numeric_limits<double>::quiet_NaN();
		try {
			auto m = factories[i]();
			m->train(split.train);
			const auto &truth = split.test.univariate(m->target_index());
			const auto pred = m->forecast(truth.stamps());
			value = forecast_metric(metric, truth.values(), pred.values);
		} catch (const Error &) {
		}
		sel.validation.push_back(value);
		if (std::isfinite(value) && (!found || value < best)) {
			best = value;
			sel.chosen = i;
			found = true;
		}
	}
	if (!found) {
		throw EnsembleError("every model-selection candidate failed");
	}
	sel.model = factories[sel.chosen]();
	sel.model->train(ts);
	return sel;
}

ForecasterEnsemble::ForecasterEnsemble(std::vector<std::unique_ptr<Forecaster>> members, Combiner combiner,
                                       ForecasterConfig cfg)
    : Forecaster(std::move(cfg)), prototypes_(std::move(members)), combiner_(combiner) {
	if (prototypes_.empty()) {
		throw EnsembleError("ensemble needs at least one member");
	}
	combiner_.validate();
	for (const auto &m : prototypes_) {
		if (m->target_index() != cfg_.target_index) {
			throw InvalidArgument("ensemble members must share the ensemble's target index");
		}
	}
}

std::unique_ptr<Forecaster> ForecasterEnsemble::clone_untrained() const {
	std::vector<std::unique_ptr<Forecaster>> copies;
	for (const auto &m : prototypes_) {
		copies.push_back(m->clone_untrained());
	}
	return std::make_unique<ForecasterEnsemble>(std::move(copies), combiner_, cfg_);
}

std::size_t ForecasterEnsemble::min_history() const {
	std::size_t h = 1;
	for (const auto &m : members_.empty() ? prototypes_ : members_) {
		h = std::max(h, m->min_history());
	}
	return h;
}

void ForecasterEnsemble::train_impl(const TimeSeries &transformed) {
	members_.clear();
	dropped_.clear();
	if (combiner_.mode == CombineMode::MetricSelect) {
		std::vector<ForecasterFactory> factories;
		for (const auto &p : prototypes_) {
			factories.push_back([&p] { return p->clone_untrained(); });
		}
		auto sel = model_select(factories, transformed, combiner_.metric, combiner_.validation_fraction);
		for (std::size_t i = 0; i < sel.validation.size(); ++i) {
			if (std::isnan(sel.validation[i])) {
				dropped_.push_back(prototypes_[i]->name());
			}
		}
		members_.push_back(std::move(sel.model));
		return;
	}
	for (const auto &p : prototypes_) {
		auto m = p->clone_untrained();
		try {
			m->train(transformed);
			members_.push_back(std::move(m));
		} catch (const Error &) {
			dropped_.push_back(p->name());
		}
	}
	if (members_.empty()) {
		throw EnsembleError("every ensemble member failed to train");
	}
}

ForecastResult ForecasterEnsemble::combine(std::vector<ForecastResult> parts) const {
	if (parts.empty()) {
		throw EnsembleError("every ensemble member failed to forecast");
	}
	// intersection of member timestamps
	std::vector<Timestamp> common = parts.front().stamps;
	for (std::size_t j = 1; j < parts.size(); ++j) {
		std::vector<Timestamp> next;
		std::set_intersection(common.begin(), common.end(), parts[j].stamps.begin(), parts[j].stamps.end(),
		                      std::back_inserter(next));
		common = std::move(next);
	}
	const bool all_se = std::all_of(parts.begin(), parts.end(), [](const auto &p) { return p.has_stderr(); });
	std::vector<std::vector<double>> vals(parts.size()), ses(parts.size());
	for (std::size_t j = 0; j < parts.size(); ++j) {
		std::size_t k = 0;
		for (Timestamp t : common) {
			while (parts[j].stamps[k] < t) {
				++k;
			}
			vals[j].push_back(parts[j].values[k]);
			if (all_se) {
				ses[j].push_back(parts[j].stderrs[k]);
			}
		}
	}
	ForecastResult out;
	out.stamps = common;
	out.values = combine_values(vals, combiner_.mode);
	if (all_se) {
		out.stderrs = combine_values(ses, CombineMode::Mean);
	}
	return out;
}

ForecastResult ForecasterEnsemble::forecast_impl(std::size_t horizon, const TimeSeries &history) const {
	std::vector<ForecastResult> parts;
	const auto &target = target_of(history);
	const auto stamps = future_stamps(target.stamps().back(), std::max<std::int64_t>(1, median_gap(target.stamps())),
	                                  horizon);
	for (const auto &m : members_) {
		try {
			parts.push_back(m->forecast(stamps, &history));
		} catch (const Error &) {
			dropped_.push_back(m->name());
		}
	}
	return combine(std::move(parts));
}

ForecastResult ForecasterEnsemble::one_step_impl(const TimeSeries &full, Timestamp from) const {
	const TimeSeries head = full.slice_time(std::numeric_limits<Timestamp>::min(), from - 1);
	const TimeSeries tail = full.slice_time(from, std::numeric_limits<Timestamp>::max());
	std::vector<ForecastResult> parts;
	for (const auto &m : members_) {
		try {
			parts.push_back(head.empty() ? m->one_step(tail) : m->one_step(tail, &head));
		} catch (const Error &) {
			dropped_.push_back(m->name());
		}
	}
	return combine(std::move(parts));
}

AnomalyScoreSeries combine_calibrated(const std::vector<AnomalyScoreSeries> &members) {
	if (members.empty()) {
		throw EnsembleError("no anomaly scores to combine");
	}
	std::vector<Timestamp> common = members.front().stamps;
	for (std::size_t j = 1; j < members.size(); ++j) {
		std::vector<Timestamp> next;
		std::set_intersection(common.begin(), common.end(), members[j].stamps.begin(), members[j].stamps.end(),
		                      std::back_inserter(next));
		common = std::move(next);
	}
	if (common.empty()) {
		throw EnsembleError("member score grids do not intersect");
	}
	std::vector<std::vector<double>> vals(members.size());
	for (std::size_t j = 0; j < members.size(); ++j) {
		std::size_t k = 0;
		for (Timestamp t : common) {
			while (members[j].stamps[k] < t) {
				++k;
			}
			vals[j].push_back(members[j].scores[k]);
		}
	}
	return AnomalyScoreSeries{common, combine_values(vals, CombineMode::Mean), true};
}

AnomalyEnsemble::AnomalyEnsemble(std::vector<std::unique_ptr<AnomalyModel>> members) : members_(std::move(members)) {
	if (members_.empty()) {
		throw EnsembleError("anomaly ensemble needs at least one member");
	}
}

AnomalyScoreSeries AnomalyEnsemble::train(const TimeSeries &ts) {
	std::vector<AnomalyScoreSeries> parts;
	std::vector<std::unique_ptr<AnomalyModel>> kept;
	dropped_.clear();
	for (auto &m : members_) {
		try {
			parts.push_back(m->train(ts));
			kept.push_back(std::move(m));
		} catch (const Error &) {
			dropped_.push_back(m->name());
		}
	}
	members_ = std::move(kept);
	if (members_.empty()) {
		throw EnsembleError("every anomaly ensemble member failed to train");
	}
	return combine_calibrated(parts);
}

void AnomalyEnsemble::retrain(const TimeSeries &ts) {
	for (auto &m : members_) {
		m->retrain(ts);
	}
}

AnomalyScoreSeries AnomalyEnsemble::score(const TimeSeries &ts, const TimeSeries *prev) const {
	std::vector<AnomalyScoreSeries> parts;
	for (const auto &m : members_) {
		parts.push_back(m->score(ts, prev));
	}
	return combine_calibrated(parts);
}

std::unique_ptr<AnomalyModel> AnomalyEnsemble::clone_untrained() const {
	std::vector<std::unique_ptr<AnomalyModel>> copies;
	for (const auto &m : members_) {
		copies.push_back(m->clone_untrained());
	}
	return std::make_unique<AnomalyEnsemble>(std::move(copies));
}

AnomalyLabelSeries anomaly_ensemble(const std::vector<const AnomalyModel *> &members, const TimeSeries &ts,
                                    const ThresholdRule &rule, const TimeSeries *prev) {
	std::vector<AnomalyScoreSeries> parts;
	for (const auto *m : members) {
		parts.push_back(m->score(ts, prev));
	}
	return apply_threshold(rule, combine_calibrated(parts));
}

} // namespace tsi
