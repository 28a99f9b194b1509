#include "tsintel/forecast/trees.hpp"
#include "tsintel/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace tsi {

std::string to_string(EnsembleKind kind) {
	return kind == EnsembleKind::GradientBoosting ? "gradient-boosting" : "random-forest";
}

Presorted presort(const FeatureMatrix &X) {
	Presorted out(X.cols);
	for (std::size_t f = 0; f < X.cols; ++f) {
		auto &idx = out[f];
		idx.resize(X.rows);
		std::iota(idx.begin(), idx.end(), 0U);
		std::stable_sort(idx.begin(), idx.end(), [&](std::uint32_t a, std::uint32_t b) { return X(a, f) < X(b, f); });
	}
	return out;
}

void RegressionTree::fit(const FeatureMatrix &X, std::span<const double> y, std::span<const double> weight,
                         const Presorted &sorted, const TreeParams &params, std::mt19937_64 *rng) {
	if (y.size() != X.rows || weight.size() != X.rows || sorted.size() != X.cols) {
		throw InvalidArgument("regression tree: inconsistent input sizes");
	}
	nodes_.clear();
	std::vector<std::vector<std::uint32_t>> lists(X.cols);
	for (std::size_t f = 0; f < X.cols; ++f) {
		lists[f].reserve(X.rows);
		for (auto r : sorted[f]) {
			if (weight[r] > 0.0) {
				lists[f].push_back(r);
			}
		}
	}
	if (X.cols == 0) {
		Node leaf;
		double sw = 0.0, sy = 0.0;
		for (std::size_t i = 0; i < y.size(); ++i) {
			sw += weight[i];
			sy += weight[i] * y[i];
		}
		leaf.value = sw > 0.0 ? sy / sw : 0.0;
		nodes_.push_back(leaf);
		return;
	}
	build(X, y, weight, std::move(lists), 0, params, rng);
}

int RegressionTree::build(const FeatureMatrix &X, std::span<const double> y, std::span<const double> w,
                          std::vector<std::vector<std::uint32_t>> lists, int depth, const TreeParams &params,
                          std::mt19937_64 *rng) {
	const int id = static_cast<int>(nodes_.size());
	nodes_.emplace_back();

	const auto &any = lists.front();
	double sw = 0.0, sy = 0.0, syy = 0.0;
	for (auto r : any) {
		sw += w[r];
		sy += w[r] * y[r];
		syy += w[r] * y[r] * y[r];
	}
	const double value = sw > 0.0 ? sy / sw : 0.0;
	nodes_[static_cast<std::size_t>(id)].value = value;

	const double min_leaf = static_cast<double>(std::max<std::size_t>(params.min_samples_leaf, 1));
	const bool depth_ok = params.max_depth < 0 || depth < params.max_depth;
	const double node_sse = syy - sy * sy / std::max(sw, 1e-300);
	if (!depth_ok || sw < 2.0 * min_leaf || any.size() < 2 || node_sse <= 1e-12 * std::max(1.0, syy)) {
		return id;
	}

	std::vector<std::size_t> features(X.cols);
	std::iota(features.begin(), features.end(), 0U);
	std::size_t n_try = X.cols;
	if (params.max_features > 0 && params.max_features < X.cols && rng != nullptr) {
		n_try = params.max_features;
		for (std::size_t i = 0; i < n_try; ++i) {
			std::uniform_int_distribution<std::size_t> pick(i, X.cols - 1);
			std::swap(features[i], features[pick(*rng)]);
		}
	}

	const double parent_score = sy * sy / sw;
	double best_gain = 1e-12 * std::max(1.0, std::abs(node_sse));
	int best_feature = -1;
	double best_threshold = 0.0;
	for (std::size_t fi = 0; fi < n_try; ++fi) {
		const std::size_t f = features[fi];
		const auto &lst = lists[f];
		double lw = 0.0, ly = 0.0;
		for (std::size_t i = 0; i + 1 < lst.size(); ++i) {
			const auto r = lst[i];
			lw += w[r];
			ly += w[r] * y[r];
			const double xv = X(r, f);
			const double xn = X(lst[i + 1], f);
			if (!(xn > xv)) {
				continue;
			}
			const double rw = sw - lw;
			if (lw < min_leaf || rw < min_leaf) {
				continue;
			}
			const double ry = sy - ly;
			const double gain = ly * ly / lw + ry * ry / rw - parent_score;
			if (gain > best_gain) {
				best_gain = gain;
				best_feature = static_cast<int>(f);
				best_threshold = 0.5 * (xv + xn);
				if (!(best_threshold > xv && best_threshold <= xn)) {
					best_threshold = xv;
				}
			}
		}
	}
	if (best_feature < 0) {
		return id;
	}

	const auto bf = static_cast<std::size_t>(best_feature);
	std::vector<std::vector<std::uint32_t>> left(lists.size()), right(lists.size());
	for (std::size_t f = 0; f < lists.size(); ++f) {
		left[f].reserve(lists[f].size());
		right[f].reserve(lists[f].size());
		for (auto r : lists[f]) {
			(X(r, bf) <= best_threshold ? left[f] : right[f]).push_back(r);
		}
	}
	lists.clear();
	lists.shrink_to_fit();

	nodes_[static_cast<std::size_t>(id)].feature = best_feature;
	nodes_[static_cast<std::size_t>(id)].threshold = best_threshold;
	const int l = build(X, y, w, std::move(left), depth + 1, params, rng);
	const int r = build(X, y, w, std::move(right), depth + 1, params, rng);
	nodes_[static_cast<std::size_t>(id)].left = l;
	nodes_[static_cast<std::size_t>(id)].right = r;
	return id;
}

double RegressionTree::predict(std::span<const double> row) const {
	if (nodes_.empty()) {
		return 0.0;
	}
	std::size_t i = 0;
	while (nodes_[i].feature >= 0) {
		const auto &n = nodes_[i];
		i = static_cast<std::size_t>(row[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right);
	}
	return nodes_[i].value;
}

std::size_t RegressionTree::depth() const {
	if (nodes_.empty()) {
		return 0;
	}
	std::vector<std::pair<std::size_t, std::size_t>> stack{{0, 0}};
	std::size_t best = 0;
	while (!stack.empty()) {
		auto [i, d] = stack.back();
		stack.pop_back();
		best = std::max(best, d);
		if (nodes_[i].feature >= 0) {
			stack.emplace_back(static_cast<std::size_t>(nodes_[i].left), d + 1);
			stack.emplace_back(static_cast<std::size_t>(nodes_[i].right), d + 1);
		}
	}
	return best;
}

void TreeEnsemble::fit(const FeatureMatrix &X, std::span<const double> y, const TreeEnsembleParams &params) {
	if (X.rows == 0 || y.size() != X.rows) {
		throw InvalidArgument("tree ensemble: empty or inconsistent training data");
	}
	params_ = params;
	trees_.clear();
	trees_.resize(params.n_trees);
	const auto sorted = presort(X);
	std::mt19937_64 rng(params.seed);
	TreeParams tp;
	tp.max_depth = params.max_depth;
	tp.min_samples_leaf = params.min_samples_leaf;

	if (params.kind == EnsembleKind::GradientBoosting) {
		base_ = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
		std::vector<double> pred(y.size(), base_), resid(y.size());
		const std::vector<double> ones(y.size(), 1.0);
		for (auto &tree : trees_) {
			for (std::size_t i = 0; i < y.size(); ++i) {
				resid[i] = y[i] - pred[i];
			}
			tree.fit(X, resid, ones, sorted, tp, nullptr);
			for (std::size_t i = 0; i < y.size(); ++i) {
				pred[i] += params.learning_rate * tree.predict(X.row(i));
			}
		}
		return;
	}

	base_ = 0.0;
	tp.max_features = std::max<std::size_t>(
	    1, static_cast<std::size_t>(std::floor(params.feature_fraction * static_cast<double>(X.cols))));
	std::vector<double> counts(y.size());
	std::uniform_int_distribution<std::size_t> pick(0, y.size() - 1);
	for (auto &tree : trees_) {
		std::fill(counts.begin(), counts.end(), 0.0);
		for (std::size_t i = 0; i < y.size(); ++i) {
			counts[pick(rng)] += 1.0;
		}
		tree.fit(X, y, counts, sorted, tp, &rng);
	}
}

double TreeEnsemble::predict(std::span<const double> row) const {
	if (trees_.empty()) {
		return base_;
	}
	if (params_.kind == EnsembleKind::GradientBoosting) {
		double v = base_;
		for (const auto &t : trees_) {
			v += params_.learning_rate * t.predict(row);
		}
		return v;
	}
	double s = 0.0;
	for (const auto &t : trees_) {
		s += t.predict(row);
	}
	return s / static_cast<double>(trees_.size());
}

} // namespace tsi
