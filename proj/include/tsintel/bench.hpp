#pragma once

#include "tsintel/evaluation/eval.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace tsi::bench {

/// Column layout shared by every file of a dataset.
struct CsvSchema {
	/// Empty when the files carry no timestamps; a grid is then synthesized.
	std::string timestamp_column = "timestamp";
	/// Empty selects every column other than the timestamp and label columns.
	std::vector<std::string> value_columns;
	std::string label_column;
	/// Step of the synthesized grid in seconds.
	std::int64_t granularity = 60;
};

struct LoadedSeries {
	std::string name;
	TimeSeries ts;
	std::optional<AnomalyLabelSeries> labels;
};

/// Parse ISO-8601 ("2024-01-02T03:04:05Z", space separator and date-only accepted) as UTC epoch seconds.
std::optional<Timestamp> parse_iso8601(const std::string &s);
std::string format_iso8601(Timestamp t);

/// Timestamps are integer epoch seconds or ISO-8601, detected per file.
LoadedSeries load_csv(const std::filesystem::path &path, const CsvSchema &schema);

struct DatasetManifest {
	std::filesystem::path root;
	std::vector<std::string> files;
	CsvSchema schema;
	double train_fraction = 0.5;

	/// Parse a manifest JSON file; a relative root is taken from the manifest's directory.
	static DatasetManifest from_file(const std::filesystem::path &path);
	static DatasetManifest from_json_text(const std::string &text, const std::filesystem::path &base_dir);
};

/// BENCH_DATA_ROOT, when set, replaces the manifest root.
std::vector<LoadedSeries> load_dataset(const DatasetManifest &manifest);

enum class Task { Forecast, Anomaly };

std::string to_string(Task t);

/// Registry name plus an opaque JSON parameter object (kept as text).
struct ModelSpec {
	std::string name;
	std::string label;
	std::string params_json = "{}";
};

struct TransformSpec {
	std::string kind;
	int order = 1;
	int window = 1;
	std::int64_t granularity = 0;
};

struct RunConfig {
	Task task = Task::Forecast;
	DatasetManifest dataset;
	std::vector<ModelSpec> models;
	std::vector<TransformSpec> transforms;
	RetrainSchedule schedule;
	Inference inference = Inference::batch();
	std::vector<std::string> metrics;
	ThresholdRule rule;
	bool tune_threshold = false;
	std::uint64_t seed = 0;
	std::size_t jobs = 1;
	std::filesystem::path out = "bench_out";
	bool plots = true;

	static RunConfig from_file(const std::filesystem::path &path);
	static RunConfig from_json_text(const std::string &text, const std::filesystem::path &base_dir);
	void validate() const;
};

std::vector<std::string> forecast_model_names();
std::vector<std::string> anomaly_model_names();

std::unique_ptr<Forecaster> make_forecaster(const ModelSpec &spec, const RunConfig &cfg);
std::unique_ptr<AnomalyModel> make_anomaly_model(const ModelSpec &spec, const RunConfig &cfg);

/// What the plots need from one (series, model) evaluation.
struct SeriesTrace {
	std::string series;
	std::string model;
	std::vector<Timestamp> stamps;
	std::vector<double> truth;
	std::vector<double> predicted;
	std::vector<Timestamp> alerts;
	std::vector<std::pair<Timestamp, Timestamp>> windows;
	double threshold = 0.0;
};

struct BenchResult {
	EvalReport report;
	std::vector<SeriesTrace> traces;
	/// Per row (same order as report.rows), the tuned or configured threshold.
	std::vector<double> thresholds;
};

/// Evaluate every model on every series; series run on `cfg.jobs` threads.
BenchResult run_bench(const RunConfig &cfg, const std::vector<LoadedSeries> &data);

void write_results_csv(const EvalReport &report, const std::filesystem::path &path);
void write_results_json(const BenchResult &result, const RunConfig &cfg, const std::filesystem::path &path);
/// Forecast: truth and prediction polylines. Anomaly: score polyline, alert markers, shaded truth windows.
std::string render_svg(const SeriesTrace &trace, Task task);

/// Run, then write results.json, results.csv and plots/ under cfg.out.
BenchResult run_and_write(const RunConfig &cfg);

} // namespace tsi::bench
