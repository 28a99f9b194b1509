#pragma once

#include "tsintel/error.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace tsi {

/// Seconds since the Unix epoch.
using Timestamp = std::int64_t;

/**
 * A single named variable sampled at strictly increasing timestamps.
 *
 * Missing data is represented by the absence of a point; every stored value
 * is finite. Instances are immutable once constructed.
 */
class UnivariateTimeSeries {
public:
	UnivariateTimeSeries() = default;
	UnivariateTimeSeries(std::string name, std::vector<Timestamp> stamps, std::vector<double> values);

	const std::string &name() const { return name_; }
	std::span<const Timestamp> stamps() const { return stamps_; }
	std::span<const double> values() const { return values_; }
	std::size_t size() const { return stamps_.size(); }
	bool empty() const { return stamps_.empty(); }

	Timestamp stamp(std::size_t i) const { return stamps_[i]; }
	double value(std::size_t i) const { return values_[i]; }

	/// Points with lo <= t <= hi.
	UnivariateTimeSeries slice_time(Timestamp lo, Timestamp hi) const;
	/// Points with index in [begin, end).
	UnivariateTimeSeries slice_index(std::size_t begin, std::size_t end) const;
	UnivariateTimeSeries renamed(std::string name) const;

	friend bool operator==(const UnivariateTimeSeries &, const UnivariateTimeSeries &) = default;

private:
	std::string name_;
	std::vector<Timestamp> stamps_;
	std::vector<double> values_;
};

/**
 * Multivariate time series: an ordered collection of univariates with unique
 * names. Univariates may have different lengths and sampling; models that need
 * a shared grid call align() first.
 */
class TimeSeries {
public:
	TimeSeries() = default;
	explicit TimeSeries(std::vector<UnivariateTimeSeries> univariates);
	/// Convenience for an aligned multivariate series with a shared grid.
	/// columns[i] holds the values of variable i.
	TimeSeries(std::vector<std::string> names, std::vector<Timestamp> stamps,
	           const std::vector<std::vector<double>> &columns);

	static TimeSeries from_univariate(UnivariateTimeSeries u);

	std::size_t dim() const { return univariates_.size(); }
	const UnivariateTimeSeries &univariate(std::size_t i) const { return univariates_.at(i); }
	const std::vector<UnivariateTimeSeries> &univariates() const { return univariates_; }
	std::vector<std::string> names() const;

	/// True when every univariate shares the exact same timestamps.
	bool is_aligned() const;
	/// Shared timestamps of an aligned series; throws AlignmentError otherwise.
	std::span<const Timestamp> stamps() const;
	/// Number of rows of an aligned series.
	std::size_t rows() const;
	/// Sorted union of the timestamps of all univariates.
	std::vector<Timestamp> stamp_union() const;
	bool empty() const;

	TimeSeries slice_time(Timestamp lo, Timestamp hi) const;
	/// Row slice of an aligned series.
	TimeSeries slice_rows(std::size_t begin, std::size_t end) const;
	/// Concatenate two aligned series with identical names; other must start after this ends.
	TimeSeries concat(const TimeSeries &other) const;

	friend bool operator==(const TimeSeries &, const TimeSeries &) = default;

private:
	std::vector<UnivariateTimeSeries> univariates_;
};

/// Maximal run of consecutive anomalous points, expressed in timestamps and indices.
struct AnomalyWindow {
	Timestamp start = 0;
	Timestamp end = 0;
	std::size_t first = 0;
	std::size_t last = 0;

	std::size_t length() const { return last - first + 1; }
	bool contains(Timestamp t) const { return t >= start && t <= end; }
	friend bool operator==(const AnomalyWindow &, const AnomalyWindow &) = default;
};

/// Binary anomaly labels on a timestamp grid, with derived anomaly windows.
class AnomalyLabelSeries {
public:
	AnomalyLabelSeries() = default;
	AnomalyLabelSeries(std::vector<Timestamp> stamps, std::vector<bool> labels);

	std::span<const Timestamp> stamps() const { return stamps_; }
	const std::vector<bool> &labels() const { return labels_; }
	const std::vector<AnomalyWindow> &windows() const { return windows_; }
	std::size_t size() const { return stamps_.size(); }
	std::size_t anomalous_count() const;

	AnomalyLabelSeries slice_time(Timestamp lo, Timestamp hi) const;

	friend bool operator==(const AnomalyLabelSeries &a, const AnomalyLabelSeries &b) {
		return a.stamps_ == b.stamps_ && a.labels_ == b.labels_;
	}

private:
	std::vector<Timestamp> stamps_;
	std::vector<bool> labels_;
	std::vector<AnomalyWindow> windows_;
};

enum class JoinPolicy { Outer, Inner };
enum class FillPolicy { ForwardFill, Linear, None };
enum class Aggregation { Mean, Last };

/**
 * Put every univariate on a shared timestamp grid.
 *
 * Outer join uses the union of timestamps, inner join the intersection. Gaps are
 * filled per `fill`; linear fill never extrapolates outside a univariate's span.
 * Rows still missing a value afterwards are dropped.
 */
TimeSeries align(const TimeSeries &ts, JoinPolicy policy, FillPolicy fill);

/// Bucket points into multiples of `granularity` seconds; empty buckets are omitted.
UnivariateTimeSeries resample(const UnivariateTimeSeries &u, std::int64_t granularity, Aggregation agg);
TimeSeries resample(const TimeSeries &ts, std::int64_t granularity, Aggregation agg);

struct TrainTestSplit {
	TimeSeries train;
	TimeSeries test;
	Timestamp split_point = 0;
};

/// Timestamp at `fraction` of the union of all timestamps (train gets t <= it).
Timestamp split_point(const TimeSeries &ts, double fraction);
TrainTestSplit split_at(const TimeSeries &ts, double fraction);

/// Median gap between consecutive timestamps (0 for fewer than two points).
std::int64_t median_gap(std::span<const Timestamp> stamps);

} // namespace tsi
