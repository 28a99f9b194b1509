#include "tsintel/anomaly/detectors.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <mutex>

namespace tsi {

namespace {

constexpr double kEps = 1e-8;

// FFTW planning is not thread-safe; execution is.
std::mutex &plan_mutex() {
	static std::mutex m;
	return m;
}

void dft(std::vector<std::complex<double>> &data, int sign) {
	const int n = static_cast<int>(data.size());
	auto *p = reinterpret_cast<fftw_complex *>(data.data());
	fftw_plan plan;
	{
		std::lock_guard lock(plan_mutex());
		plan = fftw_plan_dft_1d(n, p, p, sign, FFTW_ESTIMATE);
	}
	fftw_execute(plan);
	{
		std::lock_guard lock(plan_mutex());
		fftw_destroy_plan(plan);
	}
}

// trailing mean; the first n-1 entries average what is available
std::vector<double> average_filter(const std::vector<double> &v, std::size_t n) {
	std::vector<double> out(v.size());
	double run = 0.0;
	for (std::size_t i = 0; i < v.size(); ++i) {
		run += v[i];
		if (i >= n) {
			run -= v[i - n];
		}
		out[i] = run / static_cast<double>(std::min(i + 1, n));
	}
	return out;
}

double predict_next(std::span<const double> v) {
	const std::size_t n = v.size();
	const double last = v[n - 1];
	double slopes = 0.0;
	for (std::size_t i = 0; i + 1 < n; ++i) {
		slopes += (last - v[i]) / static_cast<double>(n - 1 - i);
	}
	return v[1] + slopes;
}

} // namespace

std::vector<double> spectral_residual_saliency(std::span<const double> values, std::size_t avg_window,
                                               std::size_t extension) {
	const std::size_t n = values.size();
	if (n < 3) {
		throw InvalidArgument("spectral residual needs at least three points");
	}
	if (avg_window == 0) {
		throw InvalidArgument("spectral residual average window must be positive");
	}
	std::vector<std::complex<double>> buf(values.begin(), values.end());
	if (extension > 0) {
		// the estimate uses the (up to) six points preceding the last one
		const std::size_t lo = n >= 7 ? n - 7 : 0;
		const double next = predict_next(values.subspan(lo, n - 1 - lo));
		buf.insert(buf.end(), extension, std::complex<double>(next, 0.0));
	}
	const std::size_t N = buf.size();
	dft(buf, FFTW_FORWARD);

	std::vector<double> mag(N), log_mag(N);
	std::vector<bool> tiny(N);
	for (std::size_t k = 0; k < N; ++k) {
		mag[k] = std::abs(buf[k]);
		tiny[k] = mag[k] <= kEps;
		log_mag[k] = tiny[k] ? 0.0 : std::log(mag[k]);
	}
	const auto avg = average_filter(log_mag, avg_window);
	for (std::size_t k = 0; k < N; ++k) {
		buf[k] = tiny[k] ? std::complex<double>(0.0, 0.0) : buf[k] * (std::exp(log_mag[k] - avg[k]) / mag[k]);
	}
	dft(buf, FFTW_BACKWARD);

	std::vector<double> sal(n);
	for (std::size_t i = 0; i < n; ++i) {
		sal[i] = std::abs(buf[i]) / static_cast<double>(N);
	}
	return sal;
}

SpectralResidual::SpectralResidual(SpectralResidualConfig cfg) : cfg_(cfg) {
	if (cfg_.window < 8) {
		throw InvalidArgument("spectral residual window must be at least 8");
	}
}

std::unique_ptr<AnomalyDetector> SpectralResidual::clone_untrained() const {
	return std::make_unique<SpectralResidual>(cfg_);
}

void SpectralResidual::train_impl(const TimeSeries &ts) {
	(void)ts.univariate(cfg_.target_index);
}

AnomalyScoreSeries SpectralResidual::score_impl(const TimeSeries &full, Timestamp from) const {
	const auto &u = full.univariate(cfg_.target_index);
	const auto x = u.values();
	AnomalyScoreSeries out;
	for (std::size_t i = 0; i < x.size(); ++i) {
		if (u.stamp(i) < from) {
			continue;
		}
		const std::size_t lo = i + 1 >= cfg_.window ? i + 1 - cfg_.window : 0;
		double s = 0.0;
		if (i + 1 - lo >= 8) {
			s = spectral_residual_saliency(x.subspan(lo, i + 1 - lo), cfg_.avg_window, cfg_.extension).back();
		}
		out.stamps.push_back(u.stamp(i));
		out.scores.push_back(s);
	}
	return out;
}

} // namespace tsi
