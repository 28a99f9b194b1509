#pragma once

#include "tsintel/forecast/forecaster.hpp"

#include <Eigen/Dense>

#include <vector>

namespace tsi {

/// Vector autoregression y_t = c + sum_{l=1..p} A_l y_{t-l} + e_t fit by per-equation OLS.
struct VarModel {
	std::size_t dim = 0;
	std::size_t order = 0;
	Eigen::VectorXd intercept;
	/// lag_coefs[l] is A_{l+1} (dim x dim); row i is the equation of variable i.
	std::vector<Eigen::MatrixXd> lag_coefs;
	Eigen::VectorXd residual_sd;
	double aic = 0.0;
	/// Set when the design matrix was rank deficient and a 1e-8 ridge was used.
	bool ridge_used = false;
};

/// Rows are time, columns are variables.
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

RowMatrix to_matrix(const TimeSeries &aligned);

/// Fit a VAR of exactly `order` lags.
VarModel var_fit_order(const RowMatrix &data, std::size_t order);
/// Choose the order in [0, max_order] by AIC = ln det(Sigma) + 2 (p d^2 + d) / T on a common sample.
VarModel var_fit(const RowMatrix &data, std::size_t max_order);
/// Iterate the fitted system `horizon` steps; returns horizon x dim predictions.
RowMatrix var_forecast(const VarModel &model, const RowMatrix &history, std::size_t horizon);

class VarForecaster : public Forecaster {
public:
	explicit VarForecaster(std::size_t max_order = 3, ForecasterConfig cfg = {});

	std::string name() const override { return "var"; }
	std::unique_ptr<Forecaster> clone_untrained() const override;
	std::size_t min_history() const override { return std::max<std::size_t>(1, model_.order); }

	const VarModel &model() const { return model_; }

protected:
	void train_impl(const TimeSeries &transformed) override;
	ForecastResult forecast_impl(std::size_t horizon, const TimeSeries &history) const override;
	ForecastResult one_step_impl(const TimeSeries &full, Timestamp from) const override;

private:
	std::size_t max_order_;
	VarModel model_;
};

} // namespace tsi
