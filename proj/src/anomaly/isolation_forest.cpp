#include "tsintel/anomaly/detectors.hpp"

#include <cmath>
#include <numeric>
#include <random>

namespace tsi {

double isolation_c(std::size_t n) {
	if (n <= 1) {
		return 0.0;
	}
	if (n == 2) {
		return 1.0;
	}
	const double m = static_cast<double>(n - 1);
	const double harmonic = std::log(m) + 0.5772156649015329;
	return 2.0 * harmonic - 2.0 * m / static_cast<double>(n);
}

std::vector<std::vector<double>> window_features(const TimeSeries &aligned, std::size_t window) {
	if (!aligned.is_aligned()) {
		throw AlignmentError("isolation forest requires an aligned time series; call align() first");
	}
	const std::size_t n = aligned.rows();
	const std::size_t d = aligned.dim();
	std::vector<std::vector<double>> rows(n, std::vector<double>(window * d));
	for (std::size_t i = 0; i < n; ++i) {
		for (std::size_t l = 0; l < window; ++l) {
			const std::size_t back = window - 1 - l;
			const std::size_t src = i >= back ? i - back : 0;
			for (std::size_t j = 0; j < d; ++j) {
				rows[i][l * d + j] = aligned.univariate(j).value(src);
			}
		}
	}
	return rows;
}

namespace {

struct Builder {
	const std::vector<std::vector<double>> &rows;
	std::mt19937_64 &rng;
	std::size_t height_limit;
	IsolationForest::Tree tree;

	int grow(std::vector<std::size_t> idx, std::size_t depth) {
		const int id = static_cast<int>(tree.size());
		tree.push_back({});
		tree.back().size = idx.size();
		if (depth >= height_limit || idx.size() <= 1) {
			return id;
		}
		const std::size_t F = rows[idx[0]].size();
		std::vector<std::size_t> usable;
		std::vector<double> lo(F), hi(F);
		for (std::size_t f = 0; f < F; ++f) {
			lo[f] = hi[f] = rows[idx[0]][f];
			for (auto r : idx) {
				lo[f] = std::min(lo[f], rows[r][f]);
				hi[f] = std::max(hi[f], rows[r][f]);
			}
			if (hi[f] > lo[f]) {
				usable.push_back(f);
			}
		}
		if (usable.empty()) {
			return id;
		}
		std::uniform_int_distribution<std::size_t> pick(0, usable.size() - 1);
		const std::size_t f = usable[pick(rng)];
		std::uniform_real_distribution<double> unit(0.0, 1.0);
		double split = lo[f] + unit(rng) * (hi[f] - lo[f]);
		if (!(split > lo[f])) {
			split = 0.5 * (lo[f] + hi[f]);
		}
		std::vector<std::size_t> left, right;
		for (auto r : idx) {
			(rows[r][f] < split ? left : right).push_back(r);
		}
		tree[static_cast<std::size_t>(id)].feature = static_cast<int>(f);
		tree[static_cast<std::size_t>(id)].split = split;
		const int l = grow(std::move(left), depth + 1);
		const int r = grow(std::move(right), depth + 1);
		tree[static_cast<std::size_t>(id)].left = l;
		tree[static_cast<std::size_t>(id)].right = r;
		return id;
	}
};

} // namespace

IsolationForest::IsolationForest(IsolationForestConfig cfg) : cfg_(cfg) {
	if (cfg_.n_trees == 0 || cfg_.subsample == 0 || cfg_.window == 0) {
		throw InvalidArgument("isolation forest: trees, subsample and window must be positive");
	}
}

std::unique_ptr<AnomalyDetector> IsolationForest::clone_untrained() const {
	return std::make_unique<IsolationForest>(cfg_);
}

void IsolationForest::fit_rows(const std::vector<std::vector<double>> &rows) {
	if (rows.empty()) {
		throw InvalidArgument("isolation forest: no training rows");
	}
	psi_ = std::min(cfg_.subsample, rows.size());
	const auto limit = static_cast<std::size_t>(std::ceil(std::log2(static_cast<double>(psi_))));
	std::mt19937_64 rng(cfg_.seed);
	trees_.clear();
	std::vector<std::size_t> all(rows.size());
	for (std::size_t t = 0; t < cfg_.n_trees; ++t) {
		std::iota(all.begin(), all.end(), 0U);
		for (std::size_t i = 0; i < psi_; ++i) {
			std::uniform_int_distribution<std::size_t> pick(i, all.size() - 1);
			std::swap(all[i], all[pick(rng)]);
		}
		Builder b{rows, rng, limit, {}};
		b.grow(std::vector<std::size_t>(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(psi_)), 0);
		trees_.push_back(std::move(b.tree));
	}
}

double IsolationForest::path_length(const Tree &tree, std::span<const double> row) const {
	std::size_t i = 0;
	double depth = 0.0;
	while (tree[i].feature >= 0) {
		const auto &n = tree[i];
		i = static_cast<std::size_t>(row[static_cast<std::size_t>(n.feature)] < n.split ? n.left : n.right);
		depth += 1.0;
	}
	return depth + isolation_c(tree[i].size);
}

double IsolationForest::score_row(std::span<const double> row) const {
	const double c = isolation_c(psi_);
	if (c <= 0.0) {
		return 0.5;
	}
	double total = 0.0;
	for (const auto &t : trees_) {
		total += path_length(t, row);
	}
	return std::exp2(-(total / static_cast<double>(trees_.size())) / c);
}

void IsolationForest::train_impl(const TimeSeries &ts) {
	fit_rows(window_features(ts, cfg_.window));
}

AnomalyScoreSeries IsolationForest::score_impl(const TimeSeries &full, Timestamp from) const {
	const auto rows = window_features(full, cfg_.window);
	const auto stamps = full.stamps();
	AnomalyScoreSeries out;
	for (std::size_t i = 0; i < rows.size(); ++i) {
		if (stamps[i] < from) {
			continue;
		}
		out.stamps.push_back(stamps[i]);
		out.scores.push_back(score_row(rows[i]));
	}
	return out;
}

} // namespace tsi
