#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace tsi {

/// Dense row-major feature matrix.
struct FeatureMatrix {
	std::size_t rows = 0;
	std::size_t cols = 0;
	std::vector<double> data;

	FeatureMatrix() = default;
	FeatureMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

	double &operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
	double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
	std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }
};

/// Row indices sorted by value, one list per feature.
using Presorted = std::vector<std::vector<std::uint32_t>>;
Presorted presort(const FeatureMatrix &X);

struct TreeParams {
	/// Negative means unlimited depth.
	int max_depth = 7;
	std::size_t min_samples_leaf = 1;
	/// Features considered per split; 0 means all.
	std::size_t max_features = 0;
};

/**
 * CART regression tree on squared error, grown depth-first to a bounded depth
 * (every node at depth < max_depth is split if a split reduces the error).
 * Sample weights act as replication counts; zero-weight rows are ignored.
 */
class RegressionTree {
public:
	struct Node {
		int feature = -1;
		double threshold = 0.0;
		int left = -1;
		int right = -1;
		double value = 0.0;
	};

	void fit(const FeatureMatrix &X, std::span<const double> y, std::span<const double> weight,
	         const Presorted &sorted, const TreeParams &params, std::mt19937_64 *rng = nullptr);
	double predict(std::span<const double> row) const;

	const std::vector<Node> &nodes() const { return nodes_; }
	std::size_t depth() const;

private:
	int build(const FeatureMatrix &X, std::span<const double> y, std::span<const double> w,
	          std::vector<std::vector<std::uint32_t>> lists, int depth, const TreeParams &params, std::mt19937_64 *rng);

	std::vector<Node> nodes_;
};

enum class EnsembleKind { GradientBoosting, RandomForest };

std::string to_string(EnsembleKind kind);

struct TreeEnsembleParams {
	EnsembleKind kind = EnsembleKind::GradientBoosting;
	std::size_t n_trees = 100;
	int max_depth = 7;
	double learning_rate = 0.1;
	std::size_t min_samples_leaf = 1;
	/// Random forest: fraction of features tried per split.
	double feature_fraction = 1.0 / 3.0;
	std::uint64_t seed = 0;
};

/**
 * Gradient boosting (squared-error gradients, shrinkage `learning_rate`, initial
 * prediction = mean) or random forest (bootstrap rows, random feature subsets per split).
 */
class TreeEnsemble {
public:
	void fit(const FeatureMatrix &X, std::span<const double> y, const TreeEnsembleParams &params);
	double predict(std::span<const double> row) const;
	std::size_t size() const { return trees_.size(); }

private:
	TreeEnsembleParams params_;
	double base_ = 0.0;
	std::vector<RegressionTree> trees_;
};

} // namespace tsi
