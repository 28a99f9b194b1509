// Writes a NAB-style labelled corpus: one CSV per series (timestamp,value,label)
// plus a manifest and an anomaly run configuration.
#include "tsintel/bench.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <random>

namespace fs = std::filesystem;

namespace {

struct Anomaly {
	std::size_t at;
	std::size_t len;
	int kind;
};

void write_series(const fs::path &path, std::uint64_t seed, std::size_t n, std::int64_t step) {
	std::mt19937_64 rng(seed);
	std::normal_distribution<double> noise(0.0, 1.0);
	std::uniform_real_distribution<double> unif(0.0, 1.0);
	const double level = 20.0 + 80.0 * unif(rng);
	const double daily = 5.0 + 10.0 * unif(rng);
	const double weekly = 3.0 * unif(rng);
	const double sd = 0.5 + unif(rng);
	const double per_day = 86400.0 / static_cast<double>(step);

	std::vector<double> y(n);
	for (std::size_t i = 0; i < n; ++i) {
		const double t = static_cast<double>(i);
		y[i] = level + daily * std::sin(2 * std::numbers::pi * t / per_day) +
		       weekly * std::sin(2 * std::numbers::pi * t / (7 * per_day)) + sd * noise(rng);
	}
	// two anomalies in each half so threshold tuning and evaluation both see some
	std::vector<Anomaly> anomalies;
	for (std::size_t half = 0; half < 2; ++half) {
		for (std::size_t k = 0; k < 2; ++k) {
			const std::size_t span = n / 4;
			const std::size_t at = half * n / 2 + k * span + span / 4 + static_cast<std::size_t>(unif(rng) * span / 2);
			const int kind = static_cast<int>(unif(rng) * 3);
			anomalies.push_back({at, kind == 0 ? std::size_t{1} : std::size_t{6 + static_cast<std::size_t>(unif(rng) * 6)},
			                     kind});
		}
	}
	std::vector<int> label(n, 0);
	for (const auto &a : anomalies) {
		const double mag = (6.0 + 4.0 * unif(rng)) * sd * (unif(rng) < 0.5 ? -1.0 : 1.0);
		for (std::size_t i = a.at; i < std::min(n, a.at + a.len); ++i) {
			switch (a.kind) {
			case 0: y[i] += 2.0 * mag; break;
			case 1: y[i] += mag; break;
			default: y[i] = level + sd * noise(rng); break;
			}
		}
		// labelled window starts at the anomaly and spans a few extra points
		for (std::size_t i = a.at; i < std::min(n, a.at + a.len + 2); ++i) {
			label[i] = 1;
		}
	}
	std::ofstream out(path);
	out << "timestamp,value,label\n";
	const std::int64_t t0 = 1704067200; // 2024-01-01T00:00:00Z
	char buf[64];
	for (std::size_t i = 0; i < n; ++i) {
		std::snprintf(buf, sizeof buf, "%.6f", y[i]);
		out << tsi::bench::format_iso8601(t0 + static_cast<std::int64_t>(i) * step) << ',' << buf << ',' << label[i]
		    << '\n';
	}
}

} // namespace

int main(int argc, char **argv) {
	CLI::App app{"Generate a labelled synthetic anomaly corpus"};
	std::string out = "data";
	std::size_t count = 10;
	std::size_t length = 1008;
	std::int64_t step = 3600;
	std::uint64_t seed = 7;
	app.add_option("--out", out, "output directory");
	app.add_option("--series", count, "number of series");
	app.add_option("--length", length, "points per series");
	app.add_option("--step", step, "sampling interval in seconds");
	app.add_option("--seed", seed, "random seed");
	CLI11_PARSE(app, argc, argv);

	const fs::path dir(out);
	fs::create_directories(dir / "series");
	std::vector<std::string> files;
	for (std::size_t s = 0; s < count; ++s) {
		char name[32];
		std::snprintf(name, sizeof name, "series/synthetic_%02zu.csv", s);
		write_series(dir / name, seed * 1000 + s, length, step);
		files.push_back(name);
	}
	{
		std::ofstream m(dir / "manifest.json");
		m << "{\n  \"root\": \".\",\n  \"timestamp_column\": \"timestamp\",\n  \"value_columns\": [\"value\"],\n"
		  << "  \"label_column\": \"label\",\n  \"train_fraction\": 0.5,\n  \"granularity\": " << step
		  << ",\n  \"files\": [";
		for (std::size_t i = 0; i < files.size(); ++i) {
			m << (i ? ", " : "") << '"' << files[i] << '"';
		}
		m << "]\n}\n";
	}
	{
		std::ofstream c(dir / "anomaly_config.json");
		c << R"({
  "task": "anomaly",
  "dataset": "manifest.json",
  "models": ["windstats", "zms", "sr", "iforest", "forecast-residual", "ensemble"],
  "schedule": {"cadence": "weekly", "window_seconds": 0},
  "inference": {"mode": "batch"},
  "metrics": ["pw", "pa", "rpa"],
  "threshold": {"threshold": 3.0, "min_alerts": 1, "alert_window": 3600, "suppress": 21600, "tune": true},
  "seed": 0,
  "out": "bench_out"
}
)";
	}
	std::cout << "wrote " << count << " series to " << dir.string() << '\n';
	return 0;
}
