#include "tsintel/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace tsi {

std::string to_string(TransformKind kind) {
	switch (kind) {
	case TransformKind::Normalize:
		return "normalize";
	case TransformKind::Difference:
		return "difference";
	case TransformKind::MovingAverage:
		return "moving-average";
	case TransformKind::Resample:
		return "resample";
	}
	return "unknown";
}

TransformKind transform_kind_from_string(const std::string &s) {
	if (s == "normalize") {
		return TransformKind::Normalize;
	}
	if (s == "difference") {
		return TransformKind::Difference;
	}
	if (s == "moving-average" || s == "moving_average") {
		return TransformKind::MovingAverage;
	}
	if (s == "resample") {
		return TransformKind::Resample;
	}
	throw ConfigError("unknown transform kind '" + s + "'");
}

Transform Transform::normalize() { return Transform(TransformKind::Normalize); }

Transform Transform::difference(int order) {
	if (order < 1) {
		throw InvalidArgument("difference order must be >= 1");
	}
	Transform t(TransformKind::Difference);
	t.order_ = order;
	return t;
}

Transform Transform::moving_average(int window) {
	if (window < 1) {
		throw InvalidArgument("moving average window must be >= 1");
	}
	Transform t(TransformKind::MovingAverage);
	t.window_ = window;
	return t;
}

Transform Transform::resample(std::int64_t granularity, Aggregation agg) {
	if (granularity <= 0) {
		throw InvalidArgument("resample granularity must be positive");
	}
	Transform t(TransformKind::Resample);
	t.granularity_ = granularity;
	t.agg_ = agg;
	return t;
}

namespace {

// Coefficients c_i of (1 - B)^k = sum_i c_i B^i.
std::vector<double> difference_poly(int k) {
	std::vector<double> c{1.0};
	for (int j = 0; j < k; ++j) {
		std::vector<double> next(c.size() + 1, 0.0);
		for (std::size_t i = 0; i < c.size(); ++i) {
			next[i] += c[i];
			next[i + 1] -= c[i];
		}
		c.swap(next);
	}
	return c;
}

UnivariateTimeSeries difference_once(const UnivariateTimeSeries &u, int k) {
	const auto c = difference_poly(k);
	const std::size_t n = u.size();
	const auto kk = static_cast<std::size_t>(k);
	std::vector<Timestamp> t;
	std::vector<double> v;
	for (std::size_t i = kk; i < n; ++i) {
		double s = 0.0;
		for (std::size_t j = 0; j <= kk; ++j) {
			s += c[j] * u.value(i - j);
		}
		t.push_back(u.stamp(i));
		v.push_back(s);
	}
	return UnivariateTimeSeries(u.name(), std::move(t), std::move(v));
}

// x_t = z_t - sum_{i>=1} c_i x_{t-i}, seeded by the last k values in `seed`.
std::vector<double> integrate(std::span<const double> seed, std::span<const double> z, int k) {
	const auto c = difference_poly(k);
	const auto kk = static_cast<std::size_t>(k);
	std::vector<double> x(seed.end() - static_cast<std::ptrdiff_t>(kk), seed.end());
	x.reserve(kk + z.size());
	for (double zt : z) {
		double s = zt;
		const std::size_t t = x.size();
		for (std::size_t i = 1; i <= kk; ++i) {
			s -= c[i] * x[t - i];
		}
		x.push_back(s);
	}
	return {x.begin() + static_cast<std::ptrdiff_t>(kk), x.end()};
}

} // namespace

TimeSeries Transform::fit_apply(const TimeSeries &ts) {
	if (ts.dim() == 0 || ts.empty()) {
		throw InvalidArgument("cannot fit a transform on an empty time series");
	}
	const std::size_t d = ts.dim();
	switch (kind_) {
	case TransformKind::Normalize:
		mu_.assign(d, 0.0);
		sigma_.assign(d, 1.0);
		sigma_defaulted_.assign(d, false);
		for (std::size_t i = 0; i < d; ++i) {
			const auto v = ts.univariate(i).values();
			if (v.empty()) {
				sigma_defaulted_[i] = true;
				continue;
			}
			const double n = static_cast<double>(v.size());
			const double m = std::accumulate(v.begin(), v.end(), 0.0) / n;
			double ss = 0.0;
			for (double x : v) {
				ss += (x - m) * (x - m);
			}
			const double sd = v.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
			mu_[i] = m;
			if (sd > 0.0 && std::isfinite(sd)) {
				sigma_[i] = sd;
			} else {
				sigma_defaulted_[i] = true;
			}
		}
		break;
	case TransformKind::Difference:
		heads_.clear();
		for (const auto &u : ts.univariates()) {
			if (u.size() <= static_cast<std::size_t>(order_)) {
				throw InvalidArgument("univariate '" + u.name() + "' too short to difference");
			}
			heads_.push_back(u.slice_index(0, static_cast<std::size_t>(order_)));
		}
		break;
	case TransformKind::MovingAverage:
	case TransformKind::Resample:
		break;
	}
	fitted_ = true;
	return apply(ts);
}

TimeSeries Transform::apply(const TimeSeries &ts) const {
	if (!fitted_) {
		throw InvalidArgument("transform '" + to_string(kind_) + "' used before fitting");
	}
	std::vector<UnivariateTimeSeries> out;
	for (std::size_t i = 0; i < ts.dim(); ++i) {
		const auto &u = ts.univariate(i);
		switch (kind_) {
		case TransformKind::Normalize: {
			std::vector<double> v(u.values().begin(), u.values().end());
			for (double &x : v) {
				x = (x - mu_.at(i)) / sigma_.at(i);
			}
			out.emplace_back(u.name(), std::vector<Timestamp>(u.stamps().begin(), u.stamps().end()), std::move(v));
			break;
		}
		case TransformKind::Difference:
			out.push_back(difference_once(u, order_));
			break;
		case TransformKind::MovingAverage: {
			std::vector<double> v(u.size());
			double run = 0.0;
			for (std::size_t j = 0; j < u.size(); ++j) {
				run += u.value(j);
				if (j >= static_cast<std::size_t>(window_)) {
					run -= u.value(j - static_cast<std::size_t>(window_));
				}
				const std::size_t cnt = std::min<std::size_t>(j + 1, static_cast<std::size_t>(window_));
				v[j] = run / static_cast<double>(cnt);
			}
			out.emplace_back(u.name(), std::vector<Timestamp>(u.stamps().begin(), u.stamps().end()), std::move(v));
			break;
		}
		case TransformKind::Resample:
			out.push_back(tsi::resample(u, granularity_, agg_));
			break;
		}
	}
	return TimeSeries(std::move(out));
}

TimeSeries Transform::invert(const TimeSeries &ts) const {
	if (!invertible()) {
		throw InvertibilityError("transform '" + to_string(kind_) + "' is not invertible");
	}
	if (!fitted_) {
		throw InvertibilityError("transform '" + to_string(kind_) + "' inverted before fitting");
	}
	std::vector<UnivariateTimeSeries> out;
	for (std::size_t i = 0; i < ts.dim(); ++i) {
		const auto &u = ts.univariate(i);
		if (kind_ == TransformKind::Normalize) {
			std::vector<double> v(u.values().begin(), u.values().end());
			for (double &x : v) {
				x = sigma_.at(i) * x + mu_.at(i);
			}
			out.emplace_back(u.name(), std::vector<Timestamp>(u.stamps().begin(), u.stamps().end()), std::move(v));
		} else {
			const auto &head = heads_.at(i);
			auto x = integrate(head.values(), u.values(), order_);
			std::vector<Timestamp> t(head.stamps().begin(), head.stamps().end());
			std::vector<double> v(head.values().begin(), head.values().end());
			t.insert(t.end(), u.stamps().begin(), u.stamps().end());
			v.insert(v.end(), x.begin(), x.end());
			out.emplace_back(u.name(), std::move(t), std::move(v));
		}
	}
	return TimeSeries(std::move(out));
}

std::vector<double> Transform::invert_continuation(std::size_t var, std::span<const double> values,
                                                   std::span<const double> input_tail) const {
	switch (kind_) {
	case TransformKind::Normalize: {
		std::vector<double> out(values.begin(), values.end());
		for (double &x : out) {
			x = sigma_.at(var) * x + mu_.at(var);
		}
		return out;
	}
	case TransformKind::Difference:
		if (input_tail.size() < static_cast<std::size_t>(order_)) {
			throw HistoryError("differencing continuation needs at least " + std::to_string(order_) +
			                   " history values");
		}
		return integrate(input_tail, values, order_);
	case TransformKind::MovingAverage:
	case TransformKind::Resample:
		break;
	}
	return {values.begin(), values.end()};
}

std::vector<double> Transform::invert_continuation_se(std::size_t var, std::span<const double> se) const {
	std::vector<double> out(se.begin(), se.end());
	if (kind_ == TransformKind::Normalize) {
		for (double &s : out) {
			s *= sigma_.at(var);
		}
	} else if (kind_ == TransformKind::Difference) {
		// Errors of successive steps accumulate under integration; treated as independent.
		for (int k = 0; k < order_; ++k) {
			double acc = 0.0;
			for (double &s : out) {
				acc += s * s;
				s = std::sqrt(acc);
			}
		}
	}
	return out;
}

bool TransformChain::invertible() const {
	return std::all_of(transforms_.begin(), transforms_.end(), [](const Transform &t) { return t.invertible(); });
}

TimeSeries TransformChain::fit_apply(const TimeSeries &ts) {
	if (ts.dim() == 0 || ts.empty()) {
		throw InvalidArgument("cannot fit a transform chain on an empty time series");
	}
	TimeSeries cur = ts;
	for (auto &t : transforms_) {
		cur = t.fit_apply(cur);
	}
	return cur;
}

TimeSeries TransformChain::apply(const TimeSeries &ts) const {
	TimeSeries cur = ts;
	for (const auto &t : transforms_) {
		cur = t.apply(cur);
	}
	return cur;
}

TimeSeries TransformChain::invert(const TimeSeries &ts) const {
	for (const auto &t : transforms_) {
		if (!t.invertible()) {
			throw InvertibilityError("chain contains non-invertible transform '" + to_string(t.kind()) + "'");
		}
	}
	TimeSeries cur = ts;
	for (auto it = transforms_.rbegin(); it != transforms_.rend(); ++it) {
		cur = it->invert(cur);
	}
	return cur;
}

std::vector<double> TransformChain::invert_continuation(std::size_t var, std::span<const double> values,
                                                        const TimeSeries &history) const {
	std::vector<TimeSeries> stage_inputs;
	stage_inputs.reserve(transforms_.size());
	TimeSeries cur = history;
	for (const auto &t : transforms_) {
		stage_inputs.push_back(cur);
		cur = t.apply(cur);
	}
	std::vector<double> out(values.begin(), values.end());
	for (std::size_t i = transforms_.size(); i-- > 0;) {
		out = transforms_[i].invert_continuation(var, out, stage_inputs[i].univariate(var).values());
	}
	return out;
}

std::vector<double> TransformChain::invert_continuation_se(std::size_t var, std::span<const double> se) const {
	std::vector<double> out(se.begin(), se.end());
	for (std::size_t i = transforms_.size(); i-- > 0;) {
		out = transforms_[i].invert_continuation_se(var, out);
	}
	return out;
}

} // namespace tsi
