#include "tsintel/automl.hpp"

#include <algorithm>
#include <cmath>
#include <array>
#include <limits>
#include <optional>

namespace tsi {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool feasible(const SarimaOrders &o, std::size_t n, const StepwiseBounds &b) {
	if (o.p < 0 || o.q < 0 || o.P < 0 || o.Q < 0 || o.p > b.max_p || o.q > b.max_q || o.P > b.max_P ||
	    o.Q > b.max_Q) {
		return false;
	}
	if (o.m == 1 && (o.P > 0 || o.Q > 0)) {
		return false;
	}
	if (o.intercept && o.d + o.D > 1) {
		return false;
	}
	return n >= o.min_length();
}

struct Walker {
	std::span<const double> y;
	const StepwiseBounds &bounds;
	const StepwiseOptions &opts;
	std::set<SarimaOrders> visited;
	StepwiseResult result;

	double evaluate(const SarimaOrders &o) {
		visited.insert(o);
		double aic = kInf;
		try {
			SarimaFitOptions fo;
			fo.max_iterations = opts.cheap_iterations;
			auto p = sarima_fit(y, o, fo);
			if (!sarima_near_unit_root(p)) {
				aic = p.aic;
				result.cheap_fits.push_back(std::move(p));
			}
		} catch (const Error &) {
		}
		result.evaluated.emplace_back(o, aic);
		return aic;
	}

	std::vector<SarimaOrders> neighbours(const SarimaOrders &c) const {
		std::vector<SarimaOrders> out;
		auto push = [&](SarimaOrders o) {
			if (feasible(o, y.size(), bounds) && !visited.contains(o)) {
				out.push_back(o);
			}
		};
		for (int delta : {-1, 1}) {
			SarimaOrders o = c;
			o.p += delta;
			push(o);
		}
		for (int delta : {-1, 1}) {
			SarimaOrders o = c;
			o.q += delta;
			push(o);
		}
		if (c.m > 1) {
			for (int delta : {-1, 1}) {
				SarimaOrders o = c;
				o.P += delta;
				push(o);
			}
			for (int delta : {-1, 1}) {
				SarimaOrders o = c;
				o.Q += delta;
				push(o);
			}
		}
		SarimaOrders t = c;
		t.intercept = !t.intercept;
		push(t);
		return out;
	}
};

} // namespace

std::vector<SarimaOrders> stepwise_starts(int m, int d, int D, const StepwiseBounds &bounds) {
	const bool seasonal = m > 1;
	const std::array<std::array<int, 4>, 4> starts{{{2, 2, 1, 1}, {0, 0, 0, 0}, {1, 0, 1, 0}, {0, 1, 0, 1}}};
	std::vector<SarimaOrders> out;
	for (const auto &s : starts) {
		SarimaOrders o;
		o.p = std::min(s[0], bounds.max_p);
		o.q = std::min(s[1], bounds.max_q);
		o.P = seasonal ? std::min(s[2], bounds.max_P) : 0;
		o.Q = seasonal ? std::min(s[3], bounds.max_Q) : 0;
		o.d = d;
		o.D = seasonal ? D : 0;
		o.m = seasonal ? m : 1;
		o.intercept = d + o.D <= 1;
		if (std::find(out.begin(), out.end(), o) == out.end()) {
			out.push_back(o);
		}
	}
	return out;
}

StepwiseResult stepwise_walk(std::span<const double> y, const std::vector<SarimaOrders> &starts,
                             const StepwiseBounds &bounds, const StepwiseOptions &opts) {
	Walker w{y, bounds, opts, {}, {}};
	SarimaOrders current{};
	double current_aic = kInf;
	bool have = false;
	for (const auto &s : starts) {
		if (!feasible(s, y.size(), bounds) || w.visited.contains(s)) {
			continue;
		}
		const double aic = w.evaluate(s);
		if (!have || aic < current_aic) {
			current = s;
			current_aic = aic;
			have = true;
		}
	}
	bool moved = have;
	while (moved) {
		moved = false;
		for (const auto &o : w.neighbours(current)) {
			const double aic = w.evaluate(o);
			if (aic < current_aic) {
				current = o;
				current_aic = aic;
				moved = true;
				break;
			}
		}
	}
	try {
		w.result.best = approx_refine(y, w.result.cheap_fits, opts.refine_top, opts);
	} catch (const Error &) {
		w.result.fallback = true;
	}
	return std::move(w.result);
}

namespace {

SarimaParams fallback_fit(std::span<const double> y, int m, int D, int d) {
	SarimaOrders o;
	o.d = d;
	o.D = m > 1 ? D : 0;
	o.m = m > 1 ? m : 1;
	o.intercept = d + o.D <= 1;
	return sarima_fit(y, o);
}

} // namespace

SarimaParams approx_refine(std::span<const double> y, std::vector<SarimaParams> cheap, std::size_t k,
                           const StepwiseOptions &opts) {
	if (k == 0) {
		throw InvalidArgument("approx_refine needs k >= 1");
	}
	std::erase_if(cheap, [](const SarimaParams &p) { return !std::isfinite(p.aic); });
	std::stable_sort(cheap.begin(), cheap.end(), [](const auto &a, const auto &b) { return a.aic < b.aic; });
	if (cheap.size() > k) {
		cheap.resize(k);
	}
	std::optional<SarimaParams> best;
	for (const auto &c : cheap) {
		try {
			SarimaFitOptions fo;
			fo.max_iterations = opts.full_iterations;
			fo.rel_tol = opts.full_rel_tol;
			fo.initial = sarima_pack(c);
			auto p = sarima_fit(y, c.orders, fo);
			if (sarima_near_unit_root(p)) {
				continue;
			}
			const bool better = !best || (p.converged && !best->converged) ||
			                    (p.converged == best->converged && p.aic < best->aic);
			if (better) {
				best = std::move(p);
			}
		} catch (const Error &) {
		}
	}
	if (!best) {
		throw FitError("no candidate survived refitting", SarimaParams{});
	}
	return *best;
}

StepwiseResult stepwise_aic_search(std::span<const double> y, int m, int D, int d, const StepwiseBounds &bounds,
                                   const StepwiseOptions &opts) {
	auto res = stepwise_walk(y, stepwise_starts(m, d, D, bounds), bounds, opts);
	if (res.fallback) {
		res.best = fallback_fit(y, m, D, d);
	}
	return res;
}

AutoEtsResult auto_ets(std::span<const double> y, int m) {
	std::vector<EtsSpec> specs{{false, false, 1}, {true, false, 1}};
	if (m > 1 && y.size() >= 2 * static_cast<std::size_t>(m)) {
		specs.push_back({false, true, m});
		specs.push_back({true, true, m});
	}
	AutoEtsResult out;
	bool have = false;
	for (const auto &s : specs) {
		EtsParams p;
		try {
			p = ets_fit(y, s);
		} catch (const Error &) {
			continue;
		}
		out.candidates.push_back(p);
		// specs are listed by parameter count, so strict < keeps the smaller model on ties
		if (!have || p.aic < out.best.aic) {
			out.best = p;
			have = true;
		}
	}
	if (!have) {
		throw SpecError("no ETS candidate could be fit");
	}
	return out;
}

} // namespace tsi
