#include "tsintel/automl.hpp"
#include "tsintel/numerics.hpp"

#include <algorithm>
#include <cmath>

namespace tsi {

std::vector<int> default_candidate_periods(std::int64_t sampling_seconds) {
	std::vector<int> out{4, 7, 12, 24, 52, 168};
	if (sampling_seconds > 0) {
		for (std::int64_t span : {std::int64_t{3600}, std::int64_t{86400}, std::int64_t{604800}, std::int64_t{31536000}}) {
			if (span % sampling_seconds == 0 && span / sampling_seconds > 1 && span / sampling_seconds <= 100000) {
				out.push_back(static_cast<int>(span / sampling_seconds));
			}
		}
	}
	std::sort(out.begin(), out.end());
	out.erase(std::unique(out.begin(), out.end()), out.end());
	return out;
}

SeasonalityTest detect_seasonality(std::span<const double> y, double a, std::vector<int> candidates) {
	if (!(a > 0.0 && a < 1.0)) {
		throw InvalidArgument("significance level must lie in (0, 1)");
	}
	if (candidates.empty()) {
		candidates = default_candidate_periods(0);
	}
	const std::size_t n = y.size();
	SeasonalityTest out;
	out.a = a;
	std::erase_if(candidates, [&](int m) { return m < 2 || 3 * static_cast<std::size_t>(m) > n; });
	if (candidates.empty()) {
		return out;
	}
	const auto max_m = static_cast<std::size_t>(*std::max_element(candidates.begin(), candidates.end()));
	out.acf = numerics::autocorrelation(y, std::min(max_m + 1, n - 1));
	const auto r = [&](std::size_t k) { return k == 0 ? 1.0 : out.acf[k - 1]; };
	const double zcrit = numerics::normal_quantile(1.0 - a / 2.0);

	double best = 0.0;
	for (int m : candidates) {
		const auto k = static_cast<std::size_t>(m);
		out.tested.push_back(m);
		const double rm = r(k);
		if (!(rm > 0.0) || rm < r(k - 1) || (k < out.acf.size() && rm < r(k + 1))) {
			continue;
		}
		double ss = 0.0;
		for (std::size_t i = 1; i < k; ++i) {
			ss += r(i) * r(i);
		}
		const double bound = zcrit * std::sqrt((1.0 + 2.0 * ss) / static_cast<double>(n));
		if (rm > bound && rm > best) {
			best = rm;
			out.m = m;
		}
	}
	return out;
}

Decomposition classical_decompose(std::span<const double> y, int m) {
	const std::size_t n = y.size();
	if (m < 2 || n < 2 * static_cast<std::size_t>(m)) {
		throw SpecError("classical decomposition needs m >= 2 and at least 2m points");
	}
	const auto M = static_cast<std::size_t>(m);
	const std::size_t h = M / 2;
	Decomposition d;
	d.trend.assign(n, 0.0);
	d.seasonal.assign(n, 0.0);
	d.remainder.assign(n, 0.0);
	d.begin = h;
	d.end = n - h;
	for (std::size_t t = h; t < n - h; ++t) {
		double s = 0.0;
		if (M % 2 == 1) {
			for (std::size_t j = t - h; j <= t + h; ++j) {
				s += y[j];
			}
			d.trend[t] = s / static_cast<double>(M);
		} else {
			for (std::size_t j = t - h + 1; j < t + h; ++j) {
				s += y[j];
			}
			s += 0.5 * (y[t - h] + y[t + h]);
			d.trend[t] = s / static_cast<double>(M);
		}
	}
	std::vector<double> sum(M, 0.0);
	std::vector<std::size_t> cnt(M, 0);
	for (std::size_t t = d.begin; t < d.end; ++t) {
		sum[t % M] += y[t] - d.trend[t];
		++cnt[t % M];
	}
	std::vector<double> idx(M);
	double centre = 0.0;
	for (std::size_t i = 0; i < M; ++i) {
		idx[i] = sum[i] / static_cast<double>(cnt[i]);
		centre += idx[i];
	}
	centre /= static_cast<double>(M);
	for (std::size_t t = 0; t < n; ++t) {
		d.seasonal[t] = idx[t % M] - centre;
	}
	for (std::size_t t = d.begin; t < d.end; ++t) {
		d.remainder[t] = y[t] - d.trend[t] - d.seasonal[t];
	}
	return d;
}

double seasonal_strength(std::span<const double> y, int m) {
	if (m <= 1) {
		return 0.0;
	}
	const auto d = classical_decompose(y, m);
	std::vector<double> r(d.remainder.begin() + static_cast<std::ptrdiff_t>(d.begin),
	                      d.remainder.begin() + static_cast<std::ptrdiff_t>(d.end));
	std::vector<double> sr(r.size());
	for (std::size_t i = 0; i < r.size(); ++i) {
		sr[i] = d.seasonal[d.begin + i] + r[i];
	}
	const double vsr = numerics::population_variance(sr);
	if (!(vsr > 0.0)) {
		return 0.0;
	}
	return std::clamp(1.0 - numerics::population_variance(r) / vsr, 0.0, 1.0);
}

std::size_t kpss_lags(std::size_t n) {
	return static_cast<std::size_t>(std::floor(4.0 * std::pow(static_cast<double>(n) / 100.0, 0.25)));
}

double kpss_statistic(std::span<const double> y, std::optional<std::size_t> lags) {
	const std::size_t n = y.size();
	if (n < 2) {
		throw InvalidArgument("KPSS needs at least two observations");
	}
	const std::size_t L = std::min(lags.value_or(kpss_lags(n)), n - 1);
	const double mu = numerics::mean(y);
	std::vector<double> e(n);
	for (std::size_t i = 0; i < n; ++i) {
		e[i] = y[i] - mu;
	}
	double s = 0.0, eta = 0.0;
	for (double v : e) {
		s += v;
		eta += s * s;
	}
	const double nn = static_cast<double>(n);
	eta /= nn * nn;
	double lrv = 0.0;
	for (double v : e) {
		lrv += v * v;
	}
	for (std::size_t l = 1; l <= L; ++l) {
		double g = 0.0;
		for (std::size_t t = l; t < n; ++t) {
			g += e[t] * e[t - l];
		}
		lrv += 2.0 * (1.0 - static_cast<double>(l) / static_cast<double>(L + 1)) * g;
	}
	lrv /= nn;
	if (!(lrv > 0.0)) {
		return 0.0;
	}
	return eta / lrv;
}

OrderSelection select_orders_for_period(std::span<const double> y0, int m) {
	OrderSelection out;
	out.m = std::max(1, m);
	std::vector<double> y(y0.begin(), y0.end());
	if (out.m > 1) {
		const auto M = static_cast<std::size_t>(out.m);
		while (true) {
			if (y.size() < 2 * M) {
				out.truncated = true;
				break;
			}
			const double fs = seasonal_strength(y, out.m);
			out.seasonal_strengths.push_back(fs);
			if (fs < kSeasonalStrengthLimit || out.D >= 1) {
				break;
			}
			if (y.size() < 3 * M) {
				out.truncated = true;
				break;
			}
			y = sarima_difference(y, 0, 1, out.m);
			++out.D;
		}
	}
	constexpr std::size_t kMinKpss = 8;
	while (true) {
		if (y.size() < kMinKpss) {
			out.truncated = true;
			break;
		}
		const double stat = kpss_statistic(y);
		out.kpss.push_back(stat);
		if (stat <= kKpssCritical5 || out.d >= 2) {
			break;
		}
		y = sarima_difference(y, 1, 0, 1);
		++out.d;
	}
	return out;
}

OrderSelection select_orders(std::span<const double> y, std::int64_t sampling_seconds, double a) {
	return select_orders_for_period(y, detect_seasonality(y, a, default_candidate_periods(sampling_seconds)).m);
}

} // namespace tsi
