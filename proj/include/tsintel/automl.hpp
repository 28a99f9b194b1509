#pragma once

#include "tsintel/forecast/ets.hpp"
#include "tsintel/forecast/sarima.hpp"

#include <optional>
#include <set>
#include <span>
#include <variant>
#include <vector>

namespace tsi {

/// A hyperparameter assignment and its AIC once evaluated.
struct ThetaCandidate {
	std::variant<SarimaOrders, EtsSpec> theta;
	double aic = 0.0;
	bool evaluated = false;
};

/**
 * Hyperparameter search layer: generate candidates for a series, evaluate them
 * (returning the chosen one), and install the choice on the model.
 */
class Layer {
public:
	virtual ~Layer() = default;
	virtual std::vector<ThetaCandidate> generate_theta(std::span<const double> y) const = 0;
	virtual ThetaCandidate evaluate_theta(std::span<const double> y, std::vector<ThetaCandidate> candidates) const = 0;
	virtual void set_theta(const ThetaCandidate &theta) = 0;
};

/// Default seasonal periods tried, plus periods implied by the sampling interval.
std::vector<int> default_candidate_periods(std::int64_t sampling_seconds);

struct SeasonalityTest {
	int m = 1;
	double a = 0.05;
	/// Autocorrelations r_1..r_L for the largest tested lag L (+1).
	std::vector<double> acf;
	std::vector<int> tested;
};

/**
 * Return the candidate period m with the largest positive r_m among those
 * where r_m is a local maximum of the autocorrelation function and
 *   r_m > Phi^{-1}(1 - a/2) sqrt((1 + 2 sum_{i<m} r_i^2) / n).
 * Candidates with 3m > n are skipped. Returns m = 1 when none pass.
 */
SeasonalityTest detect_seasonality(std::span<const double> y, double a = 0.05, std::vector<int> candidates = {});

struct Decomposition {
	std::vector<double> trend;
	std::vector<double> seasonal;
	std::vector<double> remainder;
	/// Indices [begin, end) where the centered moving average is defined.
	std::size_t begin = 0;
	std::size_t end = 0;
};

/// Classical additive decomposition with a centered (2 x m for even m) moving-average trend.
Decomposition classical_decompose(std::span<const double> y, int m);

/// F_S = max(0, 1 - Var(R) / Var(S + R)) over the indices where the trend is defined; 0 for m = 1.
double seasonal_strength(std::span<const double> y, int m);

/// Bartlett lag count floor(4 (n / 100)^{1/4}).
std::size_t kpss_lags(std::size_t n);
/// KPSS level-stationarity statistic with a Bartlett-window long-run variance.
double kpss_statistic(std::span<const double> y, std::optional<std::size_t> lags = std::nullopt);

inline constexpr double kKpssCritical5 = 0.463;
inline constexpr double kSeasonalStrengthLimit = 0.64;

struct OrderSelection {
	int m = 1;
	int D = 0;
	int d = 0;
	/// F_S before each seasonal differencing round (and after the last one when computable).
	std::vector<double> seasonal_strengths;
	std::vector<double> kpss;
	/// Set when differencing stopped because the series became too short.
	bool truncated = false;
};

/// Differencing orders (D, d) for a given period m.
OrderSelection select_orders_for_period(std::span<const double> y, int m);

/// Choose (m, D, d): seasonal differencing while F_S >= 0.64 (D <= 1), then KPSS-driven d <= 2.
OrderSelection select_orders(std::span<const double> y, std::int64_t sampling_seconds = 0, double a = 0.05);

struct StepwiseBounds {
	int max_p = 5;
	int max_q = 5;
	int max_P = 2;
	int max_Q = 2;
};

struct StepwiseOptions {
	int cheap_iterations = 50;
	std::size_t refine_top = 5;
	int full_iterations = 2000;
	double full_rel_tol = 1e-8;
};

struct StepwiseResult {
	SarimaParams best;
	/// Every order tuple fitted during the walk with its cheap-fit AIC (inf on failure).
	std::vector<std::pair<SarimaOrders, double>> evaluated;
	/// Cheap fits of the evaluated tuples (failed ones omitted).
	std::vector<SarimaParams> cheap_fits;
	bool fallback = false;
};

/// Hyndman-Khandakar starting models for the walk (seasonal parts only when m > 1).
std::vector<SarimaOrders> stepwise_starts(int m, int d, int D, const StepwiseBounds &bounds);

/// The walk itself from explicit starting models; no fallback when every fit fails.
StepwiseResult stepwise_walk(std::span<const double> y, const std::vector<SarimaOrders> &starts,
                             const StepwiseBounds &bounds, const StepwiseOptions &opts);

/**
 * Stepwise AIC walk at fixed (m, D, d). Starts from the standard four models,
 * then moves to the first neighbour (p, q, P or Q changed by one, or the mean
 * term toggled) that lowers the cheap-fit AIC, until none does. The best
 * candidates are then refit to convergence by approx_refine().
 */
StepwiseResult stepwise_aic_search(std::span<const double> y, int m, int D, int d, const StepwiseBounds &bounds = {},
                                   const StepwiseOptions &opts = {});

/// Refit the `k` lowest-AIC cheap fits to convergence (warm started) and return the lowest AIC.
SarimaParams approx_refine(std::span<const double> y, std::vector<SarimaParams> cheap, std::size_t k,
                           const StepwiseOptions &opts = {});

struct AutoEtsResult {
	EtsParams best;
	std::vector<EtsParams> candidates;
};

/// Lowest-AIC additive ETS among {trend none/additive} x {season none/additive(m)}; ties go to fewer parameters.
AutoEtsResult auto_ets(std::span<const double> y, int m);

struct AutoSarimaConfig {
	/// Fixed seasonal period; 0 detects it.
	int m = 0;
	StepwiseBounds bounds;
	StepwiseOptions options;
	double significance = 0.05;
};

/// SARIMA forecaster whose (m, D, d) and ARMA orders are chosen automatically.
class AutoSarima : public Forecaster, public Layer {
public:
	explicit AutoSarima(AutoSarimaConfig acfg = {}, ForecasterConfig cfg = {});

	std::string name() const override { return "auto-sarima"; }
	std::unique_ptr<Forecaster> clone_untrained() const override;
	std::size_t min_history() const override;

	std::vector<ThetaCandidate> generate_theta(std::span<const double> y) const override;
	ThetaCandidate evaluate_theta(std::span<const double> y, std::vector<ThetaCandidate> candidates) const override;
	void set_theta(const ThetaCandidate &theta) override;

	const SarimaParams &params() const { return params_; }
	const OrderSelection &selection() const { return selection_; }

protected:
	void train_impl(const TimeSeries &transformed) override;
	ForecastResult forecast_impl(std::size_t horizon, const TimeSeries &history) const override;
	ForecastResult one_step_impl(const TimeSeries &full, Timestamp from) const override;

private:
	AutoSarimaConfig acfg_;
	OrderSelection selection_;
	SarimaOrders orders_;
	SarimaParams params_;
	mutable std::optional<SarimaParams> last_fit_;
	std::unique_ptr<Sarima> inner_;
};

struct AutoEtsConfig {
	/// Fixed seasonal period; 0 detects it.
	int m = 0;
	double significance = 0.05;
};

/// ETS forecaster whose trend/season form is chosen by AIC with a detected period.
class AutoEts : public Forecaster, public Layer {
public:
	explicit AutoEts(AutoEtsConfig acfg = {}, ForecasterConfig cfg = {});

	std::string name() const override { return "auto-ets"; }
	std::unique_ptr<Forecaster> clone_untrained() const override;

	std::vector<ThetaCandidate> generate_theta(std::span<const double> y) const override;
	ThetaCandidate evaluate_theta(std::span<const double> y, std::vector<ThetaCandidate> candidates) const override;
	void set_theta(const ThetaCandidate &theta) override;

	const EtsParams &params() const { return params_; }
	int period() const { return m_; }

protected:
	void train_impl(const TimeSeries &transformed) override;
	ForecastResult forecast_impl(std::size_t horizon, const TimeSeries &history) const override;
	ForecastResult one_step_impl(const TimeSeries &full, Timestamp from) const override;

private:
	AutoEtsConfig acfg_;
	int m_ = 1;
	EtsSpec spec_;
	EtsParams params_;
	std::unique_ptr<Ets> inner_;
};

} // namespace tsi
