#include "tsintel/time_series.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <unordered_set>

namespace tsi {

UnivariateTimeSeries::UnivariateTimeSeries(std::string name, std::vector<Timestamp> stamps,
                                           std::vector<double> values)
    : name_(std::move(name)), stamps_(std::move(stamps)), values_(std::move(values)) {
	if (stamps_.size() != values_.size()) {
		throw InvalidArgument("univariate '" + name_ + "': timestamp and value counts differ");
	}
	for (std::size_t i = 0; i < stamps_.size(); ++i) {
		if (!std::isfinite(values_[i])) {
			throw InvalidArgument("univariate '" + name_ + "': non-finite value at index " + std::to_string(i));
		}
		if (i > 0 && stamps_[i] <= stamps_[i - 1]) {
			throw InvalidArgument("univariate '" + name_ + "': timestamps not strictly increasing at index " +
			                      std::to_string(i));
		}
	}
}

UnivariateTimeSeries UnivariateTimeSeries::slice_time(Timestamp lo, Timestamp hi) const {
	auto b = std::lower_bound(stamps_.begin(), stamps_.end(), lo);
	auto e = std::upper_bound(stamps_.begin(), stamps_.end(), hi);
	if (e < b) {
		e = b;
	}
	return slice_index(static_cast<std::size_t>(b - stamps_.begin()), static_cast<std::size_t>(e - stamps_.begin()));
}

UnivariateTimeSeries UnivariateTimeSeries::slice_index(std::size_t begin, std::size_t end) const {
	end = std::min(end, stamps_.size());
	begin = std::min(begin, end);
	UnivariateTimeSeries out;
	out.name_ = name_;
	out.stamps_.assign(stamps_.begin() + static_cast<std::ptrdiff_t>(begin),
	                   stamps_.begin() + static_cast<std::ptrdiff_t>(end));
	out.values_.assign(values_.begin() + static_cast<std::ptrdiff_t>(begin),
	                   values_.begin() + static_cast<std::ptrdiff_t>(end));
	return out;
}

UnivariateTimeSeries UnivariateTimeSeries::renamed(std::string name) const {
	UnivariateTimeSeries out = *this;
	out.name_ = std::move(name);
	return out;
}

TimeSeries::TimeSeries(std::vector<UnivariateTimeSeries> univariates) : univariates_(std::move(univariates)) {
	if (univariates_.empty()) {
		throw InvalidArgument("time series needs at least one univariate");
	}
	std::unordered_set<std::string> seen;
	for (const auto &u : univariates_) {
		if (!seen.insert(u.name()).second) {
			throw InvalidArgument("duplicate univariate name '" + u.name() + "'");
		}
	}
}

TimeSeries::TimeSeries(std::vector<std::string> names, std::vector<Timestamp> stamps,
                       const std::vector<std::vector<double>> &columns) {
	if (names.size() != columns.size()) {
		throw InvalidArgument("name and column counts differ");
	}
	std::vector<UnivariateTimeSeries> us;
	us.reserve(names.size());
	for (std::size_t i = 0; i < names.size(); ++i) {
		us.emplace_back(std::move(names[i]), stamps, columns[i]);
	}
	*this = TimeSeries(std::move(us));
}

TimeSeries TimeSeries::from_univariate(UnivariateTimeSeries u) {
	std::vector<UnivariateTimeSeries> us;
	us.push_back(std::move(u));
	return TimeSeries(std::move(us));
}

std::vector<std::string> TimeSeries::names() const {
	std::vector<std::string> out;
	for (const auto &u : univariates_) {
		out.push_back(u.name());
	}
	return out;
}

bool TimeSeries::is_aligned() const {
	if (univariates_.empty()) {
		return true;
	}
	const auto first = univariates_.front().stamps();
	return std::all_of(univariates_.begin() + 1, univariates_.end(), [&](const UnivariateTimeSeries &u) {
		return std::equal(first.begin(), first.end(), u.stamps().begin(), u.stamps().end());
	});
}

std::span<const Timestamp> TimeSeries::stamps() const {
	if (univariates_.empty()) {
		return {};
	}
	if (!is_aligned()) {
		throw AlignmentError("time series is not aligned");
	}
	return univariates_.front().stamps();
}

std::size_t TimeSeries::rows() const { return stamps().size(); }

std::vector<Timestamp> TimeSeries::stamp_union() const {
	std::vector<Timestamp> out;
	for (const auto &u : univariates_) {
		std::vector<Timestamp> merged;
		merged.reserve(out.size() + u.size());
		std::set_union(out.begin(), out.end(), u.stamps().begin(), u.stamps().end(), std::back_inserter(merged));
		out.swap(merged);
	}
	return out;
}

bool TimeSeries::empty() const {
	return std::all_of(univariates_.begin(), univariates_.end(), [](const auto &u) { return u.empty(); });
}

TimeSeries TimeSeries::slice_time(Timestamp lo, Timestamp hi) const {
	TimeSeries out;
	for (const auto &u : univariates_) {
		out.univariates_.push_back(u.slice_time(lo, hi));
	}
	return out;
}

TimeSeries TimeSeries::slice_rows(std::size_t begin, std::size_t end) const {
	if (!is_aligned()) {
		throw AlignmentError("row slicing requires an aligned series");
	}
	TimeSeries out;
	for (const auto &u : univariates_) {
		out.univariates_.push_back(u.slice_index(begin, end));
	}
	return out;
}

TimeSeries TimeSeries::concat(const TimeSeries &other) const {
	if (empty()) {
		return other;
	}
	if (other.empty()) {
		return *this;
	}
	if (names() != other.names()) {
		throw InvalidArgument("cannot concatenate series with different variables");
	}
	std::vector<UnivariateTimeSeries> us;
	for (std::size_t i = 0; i < dim(); ++i) {
		const auto &a = univariates_[i];
		const auto &b = other.univariates_[i];
		std::vector<Timestamp> t(a.stamps().begin(), a.stamps().end());
		std::vector<double> v(a.values().begin(), a.values().end());
		t.insert(t.end(), b.stamps().begin(), b.stamps().end());
		v.insert(v.end(), b.values().begin(), b.values().end());
		us.emplace_back(a.name(), std::move(t), std::move(v));
	}
	return TimeSeries(std::move(us));
}

AnomalyLabelSeries::AnomalyLabelSeries(std::vector<Timestamp> stamps, std::vector<bool> labels)
    : stamps_(std::move(stamps)), labels_(std::move(labels)) {
	if (stamps_.size() != labels_.size()) {
		throw InvalidArgument("label series: timestamp and label counts differ");
	}
	for (std::size_t i = 1; i < stamps_.size(); ++i) {
		if (stamps_[i] <= stamps_[i - 1]) {
			throw InvalidArgument("label series: timestamps not strictly increasing");
		}
	}
	for (std::size_t i = 0; i < labels_.size(); ++i) {
		if (!labels_[i]) {
			continue;
		}
		if (!windows_.empty() && windows_.back().last + 1 == i) {
			windows_.back().last = i;
			windows_.back().end = stamps_[i];
		} else {
			windows_.push_back({stamps_[i], stamps_[i], i, i});
		}
	}
}

std::size_t AnomalyLabelSeries::anomalous_count() const {
	return static_cast<std::size_t>(std::count(labels_.begin(), labels_.end(), true));
}

AnomalyLabelSeries AnomalyLabelSeries::slice_time(Timestamp lo, Timestamp hi) const {
	auto b = std::lower_bound(stamps_.begin(), stamps_.end(), lo);
	auto e = std::upper_bound(stamps_.begin(), stamps_.end(), hi);
	if (e < b) {
		e = b;
	}
	const auto bi = b - stamps_.begin();
	const auto ei = e - stamps_.begin();
	return AnomalyLabelSeries(std::vector<Timestamp>(b, e),
	                          std::vector<bool>(labels_.begin() + bi, labels_.begin() + ei));
}

namespace {

std::optional<double> value_at(const UnivariateTimeSeries &u, Timestamp t, FillPolicy fill) {
	const auto stamps = u.stamps();
	auto it = std::lower_bound(stamps.begin(), stamps.end(), t);
	const auto idx = static_cast<std::size_t>(it - stamps.begin());
	if (it != stamps.end() && *it == t) {
		return u.value(idx);
	}
	switch (fill) {
	case FillPolicy::None:
		return std::nullopt;
	case FillPolicy::ForwardFill:
		if (idx == 0) {
			return std::nullopt;
		}
		return u.value(idx - 1);
	case FillPolicy::Linear: {
		if (idx == 0 || idx == stamps.size()) {
			return std::nullopt;
		}
		const double t0 = static_cast<double>(stamps[idx - 1]);
		const double t1 = static_cast<double>(stamps[idx]);
		const double w = (static_cast<double>(t) - t0) / (t1 - t0);
		return u.value(idx - 1) + w * (u.value(idx) - u.value(idx - 1));
	}
	}
	return std::nullopt;
}

} // namespace

TimeSeries align(const TimeSeries &ts, JoinPolicy policy, FillPolicy fill) {
	if (ts.dim() == 0 || ts.empty()) {
		throw AlignmentError("cannot align an empty time series");
	}
	std::vector<Timestamp> grid;
	if (policy == JoinPolicy::Outer) {
		grid = ts.stamp_union();
	} else {
		const auto s0 = ts.univariate(0).stamps();
		grid.assign(s0.begin(), s0.end());
		for (std::size_t i = 1; i < ts.dim(); ++i) {
			const auto si = ts.univariate(i).stamps();
			std::vector<Timestamp> next;
			std::set_intersection(grid.begin(), grid.end(), si.begin(), si.end(), std::back_inserter(next));
			grid.swap(next);
		}
		if (grid.empty()) {
			throw AlignmentError("inner join produced an empty timestamp intersection");
		}
	}

	const std::size_t d = ts.dim();
	std::vector<Timestamp> kept;
	std::vector<std::vector<double>> cols(d);
	for (Timestamp t : grid) {
		std::vector<double> row(d);
		bool complete = true;
		for (std::size_t i = 0; i < d && complete; ++i) {
			auto v = value_at(ts.univariate(i), t, fill);
			if (!v) {
				complete = false;
			} else {
				row[i] = *v;
			}
		}
		if (!complete) {
			continue;
		}
		kept.push_back(t);
		for (std::size_t i = 0; i < d; ++i) {
			cols[i].push_back(row[i]);
		}
	}
	if (kept.empty()) {
		throw AlignmentError("alignment left no complete rows");
	}
	return TimeSeries(ts.names(), std::move(kept), cols);
}

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
	std::int64_t q = a / b;
	if ((a % b != 0) && ((a < 0) != (b < 0))) {
		--q;
	}
	return q;
}

} // namespace

UnivariateTimeSeries resample(const UnivariateTimeSeries &u, std::int64_t granularity, Aggregation agg) {
	if (granularity <= 0) {
		throw InvalidArgument("resample granularity must be positive");
	}
	std::vector<Timestamp> out_t;
	std::vector<double> out_v;
	std::size_t i = 0;
	const std::size_t n = u.size();
	while (i < n) {
		const std::int64_t bucket = floor_div(u.stamp(i), granularity) * granularity;
		double sum = 0.0;
		double last = 0.0;
		std::size_t count = 0;
		while (i < n && floor_div(u.stamp(i), granularity) * granularity == bucket) {
			sum += u.value(i);
			last = u.value(i);
			++count;
			++i;
		}
		out_t.push_back(bucket);
		out_v.push_back(agg == Aggregation::Mean ? sum / static_cast<double>(count) : last);
	}
	return UnivariateTimeSeries(u.name(), std::move(out_t), std::move(out_v));
}

TimeSeries resample(const TimeSeries &ts, std::int64_t granularity, Aggregation agg) {
	std::vector<UnivariateTimeSeries> us;
	for (const auto &u : ts.univariates()) {
		us.push_back(resample(u, granularity, agg));
	}
	return TimeSeries(std::move(us));
}

Timestamp split_point(const TimeSeries &ts, double fraction) {
	if (!(fraction > 0.0 && fraction < 1.0)) {
		throw SplitError("split fraction must lie in (0, 1)");
	}
	const auto all = ts.stamp_union();
	if (all.empty()) {
		throw SplitError("cannot split an empty time series");
	}
	auto k = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(all.size()) - 1e-9));
	k = std::clamp<std::size_t>(k, 1, all.size());
	return all[k - 1];
}

TrainTestSplit split_at(const TimeSeries &ts, double fraction) {
	for (const auto &u : ts.univariates()) {
		if (u.size() < 2) {
			throw SplitError("univariate '" + u.name() + "' needs at least two points to split");
		}
	}
	const Timestamp sp = split_point(ts, fraction);
	std::vector<UnivariateTimeSeries> train;
	std::vector<UnivariateTimeSeries> test;
	for (const auto &u : ts.univariates()) {
		auto it = std::upper_bound(u.stamps().begin(), u.stamps().end(), sp);
		const auto k = static_cast<std::size_t>(it - u.stamps().begin());
		if (k == 0 || k == u.size()) {
			throw SplitError("split leaves univariate '" + u.name() + "' with an empty side");
		}
		train.push_back(u.slice_index(0, k));
		test.push_back(u.slice_index(k, u.size()));
	}
	return {TimeSeries(std::move(train)), TimeSeries(std::move(test)), sp};
}

std::int64_t median_gap(std::span<const Timestamp> stamps) {
	if (stamps.size() < 2) {
		return 0;
	}
	std::vector<std::int64_t> gaps;
	gaps.reserve(stamps.size() - 1);
	for (std::size_t i = 1; i < stamps.size(); ++i) {
		gaps.push_back(stamps[i] - stamps[i - 1]);
	}
	auto mid = gaps.begin() + static_cast<std::ptrdiff_t>(gaps.size() / 2);
	std::nth_element(gaps.begin(), mid, gaps.end());
	return *mid;
}

} // namespace tsi
