#include "tsintel/post_process.hpp"

#include <algorithm>
#include <cmath>

namespace tsi {

std::vector<double> Calibrator::anchor_levels() {
	std::vector<double> q;
	for (int i = 1; i <= 99; ++i) {
		q.push_back(i / 100.0);
	}
	q.push_back(0.995);
	q.push_back(0.999);
	return q;
}

Calibrator Calibrator::fit(const AnomalyScoreSeries &scores) {
	return fit(std::span<const double>(scores.scores));
}

Calibrator Calibrator::fit(std::span<const double> scores) {
	std::vector<double> a;
	a.reserve(scores.size());
	for (double s : scores) {
		if (std::isfinite(s)) {
			a.push_back(std::abs(s));
		}
	}
	if (a.size() < 20) {
		throw InvalidArgument("calibrator needs at least 20 finite scores, got " + std::to_string(a.size()));
	}
	std::sort(a.begin(), a.end());
	Calibrator c;
	c.fitted_ = true;
	if (a.front() == a.back()) {
		c.degenerate_ = true;
		return c;
	}

	const double n = static_cast<double>(a.size());
	std::vector<Anchor> raw{{a.front(), 0.0}};
	for (double q : anchor_levels()) {
		raw.push_back({numerics::quantile(a, q), numerics::normal_quantile((1.0 + q) / 2.0)});
	}
	raw.push_back({a.back(), numerics::normal_quantile((1.0 + n / (n + 1.0)) / 2.0)});

	// anchors sharing a score (ties in the data) collapse to their mean z
	for (std::size_t i = 0; i < raw.size();) {
		std::size_t j = i;
		double zsum = 0.0;
		while (j < raw.size() && raw[j].abs_score == raw[i].abs_score) {
			zsum += raw[j].z;
			++j;
		}
		c.anchors_.push_back({raw[i].abs_score, std::min(zsum / static_cast<double>(j - i), kMaxZ)});
		i = j;
	}
	std::vector<double> xs, zs;
	for (const auto &an : c.anchors_) {
		xs.push_back(an.abs_score);
		zs.push_back(an.z);
	}
	c.spline_ = numerics::Pchip(xs, zs);
	const std::size_t k = xs.size() - 1;
	c.tail_slope_ = (zs[k] - zs[k - 1]) / (xs[k] - xs[k - 1]);
	return c;
}

double Calibrator::map_abs(double a) const {
	if (degenerate_) {
		return 0.0;
	}
	if (a <= anchors_.front().abs_score) {
		return anchors_.front().z;
	}
	const auto &last = anchors_.back();
	if (a >= last.abs_score) {
		return std::min(kMaxZ, last.z + tail_slope_ * (a - last.abs_score));
	}
	return std::min(kMaxZ, spline_(a));
}

double Calibrator::operator()(double s) const {
	if (!fitted_) {
		throw InvalidArgument("calibrator used before fit");
	}
	if (std::isnan(s)) {
		return s;
	}
	const double z = map_abs(std::abs(s));
	return s < 0.0 ? -z : z;
}

AnomalyScoreSeries Calibrator::calibrate(const AnomalyScoreSeries &scores) const {
	AnomalyScoreSeries out{scores.stamps, {}, true};
	out.scores.reserve(scores.size());
	for (double s : scores.scores) {
		out.scores.push_back((*this)(s));
	}
	return out;
}

void ThresholdRule::validate() const {
	if (!(threshold >= 0.0)) {
		throw InvalidArgument("threshold must be non-negative");
	}
	if (alert_window <= 0 || suppress < 0 || min_alerts == 0) {
		throw InvalidArgument("alert window and min alerts must be positive, suppression non-negative");
	}
}

AnomalyLabelSeries apply_threshold(const ThresholdRule &rule, const AnomalyScoreSeries &scores) {
	rule.validate();
	const std::size_t n = scores.size();
	std::vector<bool> fired(n, false);
	std::vector<Timestamp> cands;
	bool any_fired = false;
	Timestamp last_fire = 0;
	std::size_t head = 0;
	for (std::size_t i = 0; i < n; ++i) {
		if (!(std::abs(scores.scores[i]) > rule.threshold)) {
			continue;
		}
		const Timestamp t = scores.stamps[i];
		cands.push_back(t);
		while (cands[head] <= t - rule.alert_window) {
			++head;
		}
		if (cands.size() - head < rule.min_alerts) {
			continue;
		}
		if (any_fired && t - last_fire < rule.suppress) {
			continue;
		}
		fired[i] = true;
		any_fired = true;
		last_fire = t;
	}
	return AnomalyLabelSeries(scores.stamps, std::move(fired));
}

CalibratedDetector::CalibratedDetector(std::unique_ptr<AnomalyDetector> detector) : detector_(std::move(detector)) {
	if (!detector_) {
		throw InvalidArgument("calibrated detector needs a detector");
	}
}

AnomalyScoreSeries CalibratedDetector::train(const TimeSeries &ts) {
	const auto raw = detector_->train(ts);
	calibrator_ = Calibrator::fit(raw);
	return calibrator_.calibrate(raw);
}

void CalibratedDetector::retrain(const TimeSeries &ts) {
	detector_->train(ts);
}

AnomalyScoreSeries CalibratedDetector::score(const TimeSeries &ts, const TimeSeries *prev) const {
	return calibrator_.calibrate(detector_->score(ts, prev));
}

std::unique_ptr<AnomalyModel> CalibratedDetector::clone_untrained() const {
	return std::make_unique<CalibratedDetector>(detector_->clone_untrained());
}

} // namespace tsi
