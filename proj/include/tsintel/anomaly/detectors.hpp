#pragma once

#include "tsintel/anomaly/detector.hpp"
#include "tsintel/forecast/forecaster.hpp"

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace tsi {

inline constexpr std::int64_t kSecondsPerDay = 86400;
inline constexpr std::int64_t kSecondsPerWeek = 7 * kSecondsPerDay;

/// Weekly window index of `t`; weeks start Monday 00:00 UTC.
std::size_t week_bucket(Timestamp t, std::int64_t window_seconds);

struct WindStatsConfig {
	int window_minutes = 360;
	std::size_t target_index = 0;
};

/**
 * Scores s_t = (x_t - mu(t)) / sigma(t), with mu, sigma the training mean and
 * standard deviation of the weekly window containing t. Buckets with fewer than
 * two training points use global statistics, as does every bucket when training
 * covers less than two weeks.
 */
class WindStats : public AnomalyDetector {
public:
	explicit WindStats(WindStatsConfig cfg = {});
	std::string name() const override { return "windstats"; }
	std::unique_ptr<AnomalyDetector> clone_untrained() const override;

	bool global_fallback() const { return global_fallback_; }
	double bucket_mean(std::size_t b) const { return mu_.at(b); }
	double bucket_sd(std::size_t b) const { return sd_.at(b); }
	std::size_t bucket_count() const { return mu_.size(); }

protected:
	void train_impl(const TimeSeries &ts) override;
	AnomalyScoreSeries score_impl(const TimeSeries &full, Timestamp from) const override;

private:
	WindStatsConfig cfg_;
	std::vector<double> mu_;
	std::vector<double> sd_;
	bool global_fallback_ = false;
};

struct ZmsConfig {
	/// 0 selects powers of two up to n/8 of the training length.
	std::size_t max_lag = 0;
	std::size_t target_index = 0;
};

/// Lags 1, 2, 4, ... up to the largest power of two <= max(1, n / 8).
std::vector<std::size_t> zms_lags(std::size_t n);

/**
 * Multi-lag z-score: s_t = max_k (D_k(t) - mu_k) / sigma_k with
 * D_k(t) = x_t - x_{t-k} and (mu_k, sigma_k) from the training differences.
 * Lags whose training sigma is zero are excluded.
 */
class Zms : public AnomalyDetector {
public:
	explicit Zms(ZmsConfig cfg = {});
	std::string name() const override { return "zms"; }
	std::unique_ptr<AnomalyDetector> clone_untrained() const override;

	const std::vector<std::size_t> &lags() const { return lags_; }
	double lag_mean(std::size_t i) const { return mu_.at(i); }
	double lag_sd(std::size_t i) const { return sd_.at(i); }

protected:
	void train_impl(const TimeSeries &ts) override;
	AnomalyScoreSeries score_impl(const TimeSeries &full, Timestamp from) const override;

private:
	ZmsConfig cfg_;
	std::vector<std::size_t> lags_;
	std::vector<double> mu_;
	std::vector<double> sd_;
};

struct SpectralResidualConfig {
	/// Trailing window scored for each point (at least 8).
	std::size_t window = 64;
	/// Moving-average width applied to the log amplitude spectrum.
	std::size_t avg_window = 3;
	/// Points extrapolated past the window end before the transform.
	std::size_t extension = 5;
	std::size_t target_index = 0;
};

/// Saliency map of `values` extended by `extension` estimated points, truncated to values.size().
std::vector<double> spectral_residual_saliency(std::span<const double> values, std::size_t avg_window = 3,
                                               std::size_t extension = 5);

/// Spectral residual detector; each point is scored by the saliency at the end of its trailing window.
class SpectralResidual : public AnomalyDetector {
public:
	explicit SpectralResidual(SpectralResidualConfig cfg = {});
	std::string name() const override { return "sr"; }
	std::unique_ptr<AnomalyDetector> clone_untrained() const override;

protected:
	void train_impl(const TimeSeries &ts) override;
	AnomalyScoreSeries score_impl(const TimeSeries &full, Timestamp from) const override;

private:
	SpectralResidualConfig cfg_;
};

struct IsolationForestConfig {
	std::size_t n_trees = 100;
	std::size_t subsample = 256;
	std::size_t window = 10;
	std::uint64_t seed = 0;
};

/// Average unsuccessful-search path length in a binary search tree of n points.
double isolation_c(std::size_t n);

/// Rows of the trailing `window` aligned rows flattened (oldest first); early rows repeat the first row.
std::vector<std::vector<double>> window_features(const TimeSeries &aligned, std::size_t window);

/**
 * Isolation forest on trailing-window features. Trees are grown on subsamples
 * drawn without replacement up to height ceil(log2(subsample)); the score is
 * 2^(-E[h(x)] / c(subsample)).
 */
class IsolationForest : public AnomalyDetector {
public:
	struct Node {
		int feature = -1;
		double split = 0.0;
		int left = -1;
		int right = -1;
		std::size_t size = 0;
	};
	using Tree = std::vector<Node>;

	explicit IsolationForest(IsolationForestConfig cfg = {});
	std::string name() const override { return "iforest"; }
	std::unique_ptr<AnomalyDetector> clone_untrained() const override;

	/// Fit directly on feature rows.
	void fit_rows(const std::vector<std::vector<double>> &rows);
	double score_row(std::span<const double> row) const;
	double path_length(const Tree &tree, std::span<const double> row) const;
	const std::vector<Tree> &trees() const { return trees_; }
	std::size_t sample_size() const { return psi_; }

protected:
	void train_impl(const TimeSeries &ts) override;
	AnomalyScoreSeries score_impl(const TimeSeries &full, Timestamp from) const override;

private:
	IsolationForestConfig cfg_;
	std::vector<Tree> trees_;
	std::size_t psi_ = 0;
};

/**
 * Residual detector over a forecaster: s_t = (y_t - yhat_t) / se_t with
 * one-step-ahead predictions conditioned on the true history before t
 * (raw residual when the forecaster reports no standard error).
 */
class ForecastResidual : public AnomalyDetector {
public:
	explicit ForecastResidual(std::unique_ptr<Forecaster> forecaster);
	std::string name() const override;
	std::unique_ptr<AnomalyDetector> clone_untrained() const override;
	const Forecaster &forecaster() const { return *forecaster_; }

protected:
	void train_impl(const TimeSeries &ts) override;
	AnomalyScoreSeries score_impl(const TimeSeries &full, Timestamp from) const override;

private:
	std::unique_ptr<Forecaster> forecaster_;
};

} // namespace tsi
