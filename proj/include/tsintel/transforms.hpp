#pragma once

#include "tsintel/time_series.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace tsi {

enum class TransformKind { Normalize, Difference, MovingAverage, Resample };

std::string to_string(TransformKind kind);
TransformKind transform_kind_from_string(const std::string &s);

/**
 * One pre-processing step applied independently to each univariate.
 *
 * Normalize and Difference are exactly invertible on the data they produced.
 * MovingAverage (trailing window) and Resample are not.
 */
class Transform {
public:
	static Transform normalize();
	static Transform difference(int order = 1);
	static Transform moving_average(int window);
	static Transform resample(std::int64_t granularity, Aggregation agg = Aggregation::Mean);

	TransformKind kind() const { return kind_; }
	int order() const { return order_; }
	int window() const { return window_; }
	std::int64_t granularity() const { return granularity_; }
	Aggregation aggregation() const { return agg_; }

	bool invertible() const { return kind_ == TransformKind::Normalize || kind_ == TransformKind::Difference; }
	bool fitted() const { return fitted_; }

	/// Learn state from `ts` and return the transformed series.
	TimeSeries fit_apply(const TimeSeries &ts);
	/// Apply with the fitted state; differencing consumes the head of `ts` itself.
	TimeSeries apply(const TimeSeries &ts) const;
	/// Inverse of fit_apply on its own output, restoring the stored differencing head.
	TimeSeries invert(const TimeSeries &ts) const;

	/**
	 * Map values that continue a transformed series back to the original scale.
	 * `input_tail` is the untransformed series the continuation follows; its last
	 * values seed the inverse of differencing. Non-invertible kinds pass values through.
	 */
	std::vector<double> invert_continuation(std::size_t var, std::span<const double> values,
	                                        std::span<const double> input_tail) const;
	/// Standard errors of a continuation mapped to the original scale.
	std::vector<double> invert_continuation_se(std::size_t var, std::span<const double> se) const;

	/// Fitted normalization parameters for variable `var`.
	double mean(std::size_t var) const { return mu_.at(var); }
	double stddev(std::size_t var) const { return sigma_.at(var); }
	/// True if the fitted series for `var` was constant and sigma was replaced by 1.
	bool sigma_defaulted(std::size_t var) const { return sigma_defaulted_.at(var); }

private:
	explicit Transform(TransformKind kind) : kind_(kind) {}

	TransformKind kind_;
	int order_ = 1;
	int window_ = 1;
	std::int64_t granularity_ = 60;
	Aggregation agg_ = Aggregation::Mean;

	bool fitted_ = false;
	std::vector<double> mu_;
	std::vector<double> sigma_;
	std::vector<bool> sigma_defaulted_;
	std::vector<UnivariateTimeSeries> heads_;
};

/// Ordered composition of transforms; inverse runs in reverse order.
class TransformChain {
public:
	TransformChain() = default;
	explicit TransformChain(std::vector<Transform> transforms) : transforms_(std::move(transforms)) {}

	bool empty() const { return transforms_.empty(); }
	std::size_t size() const { return transforms_.size(); }
	const Transform &at(std::size_t i) const { return transforms_.at(i); }
	const std::vector<Transform> &transforms() const { return transforms_; }
	void push_back(Transform t) { transforms_.push_back(std::move(t)); }

	bool invertible() const;
	/// Fit each element on the output of its predecessor.
	TimeSeries fit_apply(const TimeSeries &ts);
	TimeSeries apply(const TimeSeries &ts) const;
	TimeSeries invert(const TimeSeries &ts) const;

	/// Map a forecast continuation of variable `var` back through every stage.
	/// `history` is the untransformed series the forecast follows.
	std::vector<double> invert_continuation(std::size_t var, std::span<const double> values,
	                                        const TimeSeries &history) const;
	std::vector<double> invert_continuation_se(std::size_t var, std::span<const double> se) const;

private:
	std::vector<Transform> transforms_;
};

} // namespace tsi
