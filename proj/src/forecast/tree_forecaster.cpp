#include "tsintel/forecast/tree_forecaster.hpp"

#include <cmath>

namespace tsi {

namespace {

std::vector<std::vector<double>> rows_of(const TimeSeries &ts) {
	const std::size_t n = ts.rows();
	std::vector<std::vector<double>> rows(n, std::vector<double>(ts.dim()));
	for (std::size_t j = 0; j < ts.dim(); ++j) {
		const auto v = ts.univariate(j).values();
		for (std::size_t i = 0; i < n; ++i) {
			rows[i][j] = v[i];
		}
	}
	return rows;
}

} // namespace

TreeForecaster::TreeForecaster(TreeEnsembleParams params, ForecasterConfig cfg)
    : Forecaster(std::move(cfg)), params_(params) {
	if (cfg_.max_lags == 0) {
		throw InvalidArgument("tree forecaster needs max_lags >= 1");
	}
}

std::string TreeForecaster::name() const {
	return params_.kind == EnsembleKind::GradientBoosting ? "gb" : "rf";
}

std::unique_ptr<Forecaster> TreeForecaster::clone_untrained() const {
	return std::make_unique<TreeForecaster>(params_, cfg_);
}

std::vector<double> TreeForecaster::features(std::span<const std::vector<double>> window) const {
	// feature (l * d + j) is variable j at lag l + 1
	const std::size_t L = cfg_.max_lags;
	const std::size_t d = models_.size();
	std::vector<double> f(L * d);
	for (std::size_t l = 0; l < L; ++l) {
		const auto &row = window[window.size() - 1 - l];
		for (std::size_t j = 0; j < d; ++j) {
			f[l * d + j] = row[j];
		}
	}
	return f;
}

void TreeForecaster::train_impl(const TimeSeries &transformed) {
	if (!transformed.is_aligned()) {
		throw AlignmentError("tree forecaster requires an aligned time series; call align() first");
	}
	const auto rows = rows_of(transformed);
	const std::size_t n = rows.size();
	const std::size_t L = cfg_.max_lags;
	const std::size_t d = transformed.dim();
	if (n <= L + 1) {
		throw SpecError("tree forecaster needs more than max_lags + 1 = " + std::to_string(L + 1) + " rows");
	}
	models_.assign(d, TreeEnsemble{});
	FeatureMatrix X(n - L, L * d);
	for (std::size_t t = L; t < n; ++t) {
		const auto f = features(std::span<const std::vector<double>>(rows.data() + t - L, L));
		std::copy(f.begin(), f.end(), X.data.begin() + static_cast<std::ptrdiff_t>((t - L) * X.cols));
	}
	for (std::size_t j = 0; j < d; ++j) {
		std::vector<double> y(n - L);
		for (std::size_t t = L; t < n; ++t) {
			y[t - L] = rows[t][j];
		}
		auto p = params_;
		p.seed = params_.seed + j;
		models_[j].fit(X, y, p);
		if (j == cfg_.target_index) {
			double ss = 0.0;
			for (std::size_t i = 0; i < X.rows; ++i) {
				const double e = y[i] - models_[j].predict(X.row(i));
				ss += e * e;
			}
			residual_sd_ = std::sqrt(ss / static_cast<double>(X.rows));
		}
	}
}

std::vector<double> TreeForecaster::predict_next(std::span<const std::vector<double>> window) const {
	if (window.size() < cfg_.max_lags) {
		throw HistoryError("tree forecaster window shorter than max_lags");
	}
	const auto f = features(window);
	std::vector<double> out(models_.size());
	for (std::size_t j = 0; j < models_.size(); ++j) {
		out[j] = models_[j].predict(f);
	}
	return out;
}

ForecastResult TreeForecaster::forecast_impl(std::size_t horizon, const TimeSeries &history) const {
	if (!history.is_aligned()) {
		throw AlignmentError("tree forecaster history must be aligned");
	}
	if (history.dim() != models_.size()) {
		throw InvalidArgument("tree forecaster history has the wrong number of variables");
	}
	auto rows = rows_of(history);
	ForecastResult out;
	const double se = std::max(residual_sd_, 1e-12);
	for (std::size_t h = 0; h < horizon; ++h) {
		auto next = predict_next(rows);
		out.values.push_back(next[cfg_.target_index]);
		out.stderrs.push_back(se);
		rows.push_back(std::move(next));
	}
	return out;
}

ForecastResult TreeForecaster::one_step_impl(const TimeSeries &full, Timestamp from) const {
	if (!full.is_aligned()) {
		throw AlignmentError("tree forecaster history must be aligned");
	}
	const auto rows = rows_of(full);
	const auto stamps = full.stamps();
	const std::size_t L = cfg_.max_lags;
	const double se = std::max(residual_sd_, 1e-12);
	ForecastResult out;
	for (std::size_t i = L; i < rows.size(); ++i) {
		if (stamps[i] < from) {
			continue;
		}
		const auto f = features(std::span<const std::vector<double>>(rows.data() + i - L, L));
		out.stamps.push_back(stamps[i]);
		out.values.push_back(models_[cfg_.target_index].predict(f));
		out.stderrs.push_back(se);
	}
	return out;
}

} // namespace tsi
