#pragma once

// Point-by-point recomputation of the detection metrics on plain 0/1 vectors.

#include <cstddef>
#include <utility>
#include <vector>

namespace tsi::testing {

struct OracleCounts {
	std::size_t tp = 0, fp = 0, fn = 0;
	double precision = 0, recall = 0, f1 = 0;
};

inline OracleCounts oracle_finish(std::size_t tp, std::size_t fp, std::size_t fn) {
	OracleCounts c{tp, fp, fn};
	if (tp + fp) {
		c.precision = double(tp) / double(tp + fp);
	}
	if (tp + fn) {
		c.recall = double(tp) / double(tp + fn);
	}
	if (c.precision + c.recall > 0) {
		c.f1 = 2 * c.precision * c.recall / (c.precision + c.recall);
	}
	return c;
}

inline std::vector<std::pair<std::size_t, std::size_t>> oracle_windows(const std::vector<int> &y) {
	std::vector<std::pair<std::size_t, std::size_t>> w;
	for (std::size_t i = 0; i < y.size(); ++i) {
		if (y[i] && (i == 0 || !y[i - 1])) {
			std::size_t j = i;
			while (j + 1 < y.size() && y[j + 1]) {
				++j;
			}
			w.emplace_back(i, j);
		}
	}
	return w;
}

inline OracleCounts oracle_pw(const std::vector<int> &y, const std::vector<int> &p) {
	std::size_t tp = 0, fp = 0, fn = 0;
	for (std::size_t i = 0; i < y.size(); ++i) {
		if (p[i] && y[i]) {
			++tp;
		} else if (p[i]) {
			++fp;
		} else if (y[i]) {
			++fn;
		}
	}
	return oracle_finish(tp, fp, fn);
}

// PA: a hit anywhere in a window relabels the whole window as detected, then count pointwise.
inline OracleCounts oracle_pa(const std::vector<int> &y, const std::vector<int> &p) {
	std::vector<int> adj = p;
	for (auto [a, b] : oracle_windows(y)) {
		bool hit = false;
		for (std::size_t i = a; i <= b; ++i) {
			hit = hit || p[i];
		}
		for (std::size_t i = a; i <= b; ++i) {
			adj[i] = hit ? 1 : 0;
		}
	}
	return oracle_pw(y, adj);
}

inline OracleCounts oracle_rpa(const std::vector<int> &y, const std::vector<int> &p) {
	std::size_t tp = 0, fp = 0, fn = 0;
	for (auto [a, b] : oracle_windows(y)) {
		bool hit = false;
		for (std::size_t i = a; i <= b; ++i) {
			hit = hit || p[i];
		}
		(hit ? tp : fn) += 1;
	}
	for (std::size_t i = 0; i < y.size(); ++i) {
		fp += p[i] && !y[i] ? 1 : 0;
	}
	return oracle_finish(tp, fp, fn);
}

} // namespace tsi::testing
