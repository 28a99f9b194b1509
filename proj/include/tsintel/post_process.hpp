#pragma once

#include "tsintel/anomaly/detector.hpp"
#include "tsintel/numerics.hpp"

#include <cstdint>
#include <memory>
#include <vector>

namespace tsi {

/**
 * Monotone map from raw scores to z-scores:
 *   C(s) = sign(s) Phi^{-1}((1 + F(|s|)) / 2)
 * with F the empirical CDF of the fitting |s|. F is discretized at a grid of
 * quantile anchors and interpolated with PCHIP; beyond the largest anchor the
 * last segment is extended linearly and the output is capped at kMaxZ.
 */
class Calibrator {
public:
	static constexpr double kMaxZ = 8.0;

	struct Anchor {
		double abs_score;
		double z;
	};

	Calibrator() = default;
	static Calibrator fit(const AnomalyScoreSeries &scores);
	static Calibrator fit(std::span<const double> scores);

	double operator()(double s) const;
	AnomalyScoreSeries calibrate(const AnomalyScoreSeries &scores) const;

	bool fitted() const { return fitted_; }
	/// All fitting scores had the same magnitude; every input maps to 0.
	bool degenerate() const { return degenerate_; }
	const std::vector<Anchor> &anchors() const { return anchors_; }

	/// CDF levels of the interior anchors.
	static std::vector<double> anchor_levels();

private:
	double map_abs(double a) const;

	bool fitted_ = false;
	bool degenerate_ = false;
	std::vector<Anchor> anchors_;
	numerics::Pchip spline_;
	double tail_slope_ = 0.0;
};

struct ThresholdRule {
	/// Threshold on |z| (calibrated units).
	double threshold = 3.0;
	/// Candidates needed inside the trailing alert window, including the current one.
	std::size_t min_alerts = 2;
	std::int64_t alert_window = 3600;
	/// Dead time after a fired alert.
	std::int64_t suppress = 7200;

	void validate() const;
};

/**
 * Alerts from calibrated scores. A candidate is a point with |z| > threshold.
 * A candidate at t fires when at least min_alerts candidates lie in
 * (t - alert_window, t] and no alert fired in (t - suppress, t). Suppressed
 * candidates do not extend the dead time.
 */
AnomalyLabelSeries apply_threshold(const ThresholdRule &rule, const AnomalyScoreSeries &scores);

/**
 * Anything that emits calibrated scores: a calibrated detector or an ensemble
 * of them. retrain() refits the underlying models but keeps the calibration
 * learned by the initial train().
 */
class AnomalyModel {
public:
	virtual ~AnomalyModel() = default;
	/// Train and fit calibration; returns calibrated training scores.
	virtual AnomalyScoreSeries train(const TimeSeries &ts) = 0;
	virtual void retrain(const TimeSeries &ts) = 0;
	virtual AnomalyScoreSeries score(const TimeSeries &ts, const TimeSeries *prev = nullptr) const = 0;
	virtual std::string name() const = 0;
	virtual std::unique_ptr<AnomalyModel> clone_untrained() const = 0;
};

/// A detector paired with the calibrator fitted on its training scores.
class CalibratedDetector : public AnomalyModel {
public:
	explicit CalibratedDetector(std::unique_ptr<AnomalyDetector> detector);

	AnomalyScoreSeries train(const TimeSeries &ts) override;
	void retrain(const TimeSeries &ts) override;
	AnomalyScoreSeries score(const TimeSeries &ts, const TimeSeries *prev = nullptr) const override;
	std::string name() const override { return detector_->name(); }
	std::unique_ptr<AnomalyModel> clone_untrained() const override;

	const AnomalyDetector &detector() const { return *detector_; }
	const Calibrator &calibrator() const { return calibrator_; }

private:
	std::unique_ptr<AnomalyDetector> detector_;
	Calibrator calibrator_;
};

} // namespace tsi
