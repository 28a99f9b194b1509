#include "tsintel/forecast/var.hpp"

#include <cmath>
#include <limits>

namespace tsi {

RowMatrix to_matrix(const TimeSeries &aligned) {
	const auto stamps = aligned.stamps();
	RowMatrix m(static_cast<Eigen::Index>(stamps.size()), static_cast<Eigen::Index>(aligned.dim()));
	for (std::size_t j = 0; j < aligned.dim(); ++j) {
		const auto v = aligned.univariate(j).values();
		for (std::size_t i = 0; i < v.size(); ++i) {
			m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v[i];
		}
	}
	return m;
}

namespace {

struct OlsFit {
	Eigen::MatrixXd coef; // (1 + p d) x d
	Eigen::MatrixXd resid;
	bool ridge = false;
};

Eigen::MatrixXd design(const RowMatrix &data, std::size_t order, std::size_t first_row) {
	const auto T = static_cast<Eigen::Index>(data.rows()) - static_cast<Eigen::Index>(first_row);
	const auto d = data.cols();
	Eigen::MatrixXd X(T, 1 + static_cast<Eigen::Index>(order) * d);
	for (Eigen::Index r = 0; r < T; ++r) {
		const Eigen::Index t = r + static_cast<Eigen::Index>(first_row);
		X(r, 0) = 1.0;
		for (std::size_t l = 1; l <= order; ++l) {
			X.block(r, 1 + static_cast<Eigen::Index>(l - 1) * d, 1, d) = data.row(t - static_cast<Eigen::Index>(l));
		}
	}
	return X;
}

OlsFit ols(const Eigen::MatrixXd &X, const Eigen::MatrixXd &Y) {
	OlsFit f;
	Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
	if (qr.rank() < X.cols()) {
		const Eigen::MatrixXd xtx = X.transpose() * X + 1e-8 * Eigen::MatrixXd::Identity(X.cols(), X.cols());
		f.coef = xtx.ldlt().solve(X.transpose() * Y);
		f.ridge = true;
	} else {
		f.coef = qr.solve(Y);
	}
	f.resid = Y - X * f.coef;
	return f;
}

double log_det_cov(const Eigen::MatrixXd &resid) {
	const double T = static_cast<double>(resid.rows());
	const Eigen::MatrixXd sigma = resid.transpose() * resid / T;
	const double det = sigma.determinant();
	return std::log(std::max(det, 1e-300));
}

} // namespace

VarModel var_fit_order(const RowMatrix &data, std::size_t order) {
	const auto d = static_cast<std::size_t>(data.cols());
	if (static_cast<std::size_t>(data.rows()) <= d * order + 1) {
		throw SpecError("VAR(" + std::to_string(order) + ") needs more than " + std::to_string(d * order + 1) + " rows");
	}
	const Eigen::MatrixXd X = design(data, order, order);
	const Eigen::MatrixXd Y = data.bottomRows(data.rows() - static_cast<Eigen::Index>(order));
	const auto f = ols(X, Y);

	VarModel m;
	m.dim = d;
	m.order = order;
	m.intercept = f.coef.row(0).transpose();
	const auto dd = static_cast<Eigen::Index>(d);
	for (std::size_t l = 0; l < order; ++l) {
		m.lag_coefs.push_back(f.coef.block(1 + static_cast<Eigen::Index>(l) * dd, 0, dd, dd).transpose());
	}
	m.residual_sd = (f.resid.colwise().squaredNorm() / static_cast<double>(f.resid.rows())).cwiseSqrt().transpose();
	m.ridge_used = f.ridge;
	const double T = static_cast<double>(f.resid.rows());
	m.aic = log_det_cov(f.resid) + 2.0 * static_cast<double>(order * d * d + d) / T;
	return m;
}

VarModel var_fit(const RowMatrix &data, std::size_t max_order) {
	const auto d = static_cast<std::size_t>(data.cols());
	if (static_cast<std::size_t>(data.rows()) <= d * max_order + 1) {
		throw SpecError("VAR needs more than d * max_order + 1 = " + std::to_string(d * max_order + 1) + " rows");
	}
	std::size_t best_order = 0;
	double best_aic = std::numeric_limits<double>::infinity();
	const Eigen::MatrixXd Y = data.bottomRows(data.rows() - static_cast<Eigen::Index>(max_order));
	const double T = static_cast<double>(Y.rows());
	for (std::size_t p = 0; p <= max_order; ++p) {
		const auto f = ols(design(data, p, max_order), Y);
		const double aic = log_det_cov(f.resid) + 2.0 * static_cast<double>(p * d * d + d) / T;
		if (aic < best_aic - 1e-12) {
			best_aic = aic;
			best_order = p;
		}
	}
	return var_fit_order(data, best_order);
}

RowMatrix var_forecast(const VarModel &model, const RowMatrix &history, std::size_t horizon) {
	const auto d = static_cast<Eigen::Index>(model.dim);
	if (history.cols() != d) {
		throw InvalidArgument("VAR history has the wrong number of variables");
	}
	if (static_cast<std::size_t>(history.rows()) < model.order) {
		throw HistoryError("VAR forecast needs " + std::to_string(model.order) + " history rows");
	}
	RowMatrix buf(history.rows() + static_cast<Eigen::Index>(horizon), d);
	buf.topRows(history.rows()) = history;
	for (std::size_t h = 0; h < horizon; ++h) {
		const Eigen::Index t = history.rows() + static_cast<Eigen::Index>(h);
		Eigen::VectorXd next = model.intercept;
		for (std::size_t l = 0; l < model.order; ++l) {
			next += model.lag_coefs[l] * buf.row(t - 1 - static_cast<Eigen::Index>(l)).transpose();
		}
		buf.row(t) = next.transpose();
	}
	return buf.bottomRows(static_cast<Eigen::Index>(horizon));
}

VarForecaster::VarForecaster(std::size_t max_order, ForecasterConfig cfg)
    : Forecaster(std::move(cfg)), max_order_(max_order) {}

std::unique_ptr<Forecaster> VarForecaster::clone_untrained() const {
	return std::make_unique<VarForecaster>(max_order_, cfg_);
}

void VarForecaster::train_impl(const TimeSeries &transformed) {
	if (!transformed.is_aligned()) {
		throw AlignmentError("VAR requires an aligned time series; call align() first");
	}
	model_ = var_fit(to_matrix(transformed), max_order_);
}

ForecastResult VarForecaster::forecast_impl(std::size_t horizon, const TimeSeries &history) const {
	if (!history.is_aligned()) {
		throw AlignmentError("VAR history must be aligned");
	}
	const RowMatrix pred = var_forecast(model_, to_matrix(history), horizon);
	ForecastResult out;
	const auto k = static_cast<Eigen::Index>(cfg_.target_index);
	const double se = std::max(model_.residual_sd(k), 1e-12);
	for (Eigen::Index h = 0; h < pred.rows(); ++h) {
		out.values.push_back(pred(h, k));
		out.stderrs.push_back(se);
	}
	return out;
}

ForecastResult VarForecaster::one_step_impl(const TimeSeries &full, Timestamp from) const {
	if (!full.is_aligned()) {
		throw AlignmentError("VAR history must be aligned");
	}
	const RowMatrix data = to_matrix(full);
	const auto stamps = full.stamps();
	const auto k = static_cast<Eigen::Index>(cfg_.target_index);
	const double se = std::max(model_.residual_sd(k), 1e-12);
	ForecastResult out;
	for (std::size_t i = std::max<std::size_t>(model_.order, 1); i < stamps.size(); ++i) {
		if (stamps[i] < from) {
			continue;
		}
		double v = model_.intercept(k);
		for (std::size_t l = 0; l < model_.order; ++l) {
			v += model_.lag_coefs[l].row(k).dot(data.row(static_cast<Eigen::Index>(i - 1 - l)));
		}
		out.stamps.push_back(stamps[i]);
		out.values.push_back(v);
		out.stderrs.push_back(se);
	}
	return out;
}

} // namespace tsi
