#include "tsintel/bench.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

namespace tsi::bench {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Cell {
	EvalReport::Row row;
	SeriesTrace trace;
	double threshold = 0.0;
};

Cell run_forecast_cell(const ModelSpec &spec, const RunConfig &cfg, const LoadedSeries &s) {
	Cell c;
	c.row.series = s.name;
	c.row.model = spec.label;
	c.trace.series = s.name;
	c.trace.model = spec.label;
	std::vector<ForecastMetric> metrics;
	for (const auto &m : cfg.metrics) {
		metrics.push_back(forecast_metric_from_string(m));
	}
	const auto ev = run_forecast_eval([&] { return make_forecaster(spec, cfg); }, s.ts, cfg.dataset.train_fraction,
	                                  cfg.schedule, cfg.inference, metrics);
	c.row.metrics = ev.metrics;
	c.row.retrains = ev.retrains;
	c.row.retrain_failures = ev.retrain_failures;
	c.row.train_seconds = ev.train_seconds;
	c.row.predict_seconds = ev.predict_seconds;
	c.trace.stamps = ev.stamps;
	c.trace.truth = ev.truth;
	c.trace.predicted = ev.predicted;
	return c;
}

Cell run_anomaly_cell(const ModelSpec &spec, const RunConfig &cfg, const LoadedSeries &s) {
	Cell c;
	c.row.series = s.name;
	c.row.model = spec.label;
	c.trace.series = s.name;
	c.trace.model = spec.label;
	if (!s.labels) {
		throw LoadError("series '" + s.name + "' has no label column");
	}
	AnomalyEvalOptions opts;
	opts.train_fraction = cfg.dataset.train_fraction;
	opts.schedule = cfg.schedule;
	opts.inference = cfg.inference;
	opts.rule = cfg.rule;
	opts.tune_threshold = cfg.tune_threshold;
	const auto ev = run_anomaly_eval([&] { return make_anomaly_model(spec, cfg); }, s.ts, *s.labels, opts);
	for (const auto &[k, v] : ev.metrics) {
		const auto family = k.substr(0, k.find('_'));
		if (k == "mttd" || std::find(cfg.metrics.begin(), cfg.metrics.end(), family) != cfg.metrics.end()) {
			c.row.metrics[k] = v;
		}
	}
	c.row.retrains = ev.retrains;
	c.row.retrain_failures = ev.retrain_failures;
	c.row.train_seconds = ev.train_seconds;
	c.row.predict_seconds = ev.predict_seconds;
	c.threshold = ev.threshold;
	c.trace.threshold = ev.threshold;
	c.trace.stamps = ev.test_scores.stamps;
	c.trace.predicted = ev.test_scores.scores;
	const auto &al = ev.alerts;
	for (std::size_t i = 0; i < al.size(); ++i) {
		if (al.labels()[i]) {
			c.trace.alerts.push_back(al.stamps()[i]);
		}
	}
	for (const auto &w : ev.truth.windows()) {
		c.trace.windows.emplace_back(w.start, w.end);
	}
	return c;
}

std::string fmt(double v) {
	if (std::isnan(v)) {
		return "nan";
	}
	char buf[40];
	std::snprintf(buf, sizeof buf, "%.17g", v);
	return buf;
}

std::string csv_escape(const std::string &s) {
	if (s.find_first_of(",\"\n") == std::string::npos) {
		return s;
	}
	std::string out = "\"";
	for (char c : s) {
		out += c == '"' ? std::string("\"\"") : std::string(1, c == '\n' ? ' ' : c);
	}
	return out + "\"";
}

std::string xml_escape(const std::string &s) {
	std::string out;
	for (char c : s) {
		switch (c) {
		case '&': out += "&amp;"; break;
		case '<': out += "&lt;"; break;
		case '>': out += "&gt;"; break;
		case '"': out += "&quot;"; break;
		default: out += c;
		}
	}
	return out;
}

std::string safe_file_name(std::string s) {
	for (char &c : s) {
		if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_' && c != '.') {
			c = '_';
		}
	}
	return s;
}

} // namespace

BenchResult run_bench(const RunConfig &cfg, const std::vector<LoadedSeries> &data) {
	const std::size_t S = data.size();
	const std::size_t M = cfg.models.size();
	std::vector<Cell> cells(S * M);
	std::atomic<std::size_t> next{0};
	auto worker = [&] {
		for (std::size_t i = next++; i < S; i = next++) {
			for (std::size_t m = 0; m < M; ++m) {
				auto &cell = cells[i * M + m];
				try {
					cell = cfg.task == Task::Forecast ? run_forecast_cell(cfg.models[m], cfg, data[i])
					                                  : run_anomaly_cell(cfg.models[m], cfg, data[i]);
				} catch (const std::exception &e) {
					cell = Cell{};
					cell.row.series = data[i].name;
					cell.row.model = cfg.models[m].label;
					cell.row.error = e.what();
					cell.trace.series = data[i].name;
					cell.trace.model = cfg.models[m].label;
				}
			}
		}
	};
	const std::size_t jobs = std::max<std::size_t>(1, std::min(cfg.jobs, S));
	if (jobs == 1) {
		worker();
	} else {
		std::vector<std::thread> pool;
		for (std::size_t j = 0; j < jobs; ++j) {
			pool.emplace_back(worker);
		}
		for (auto &t : pool) {
			t.join();
		}
	}
	BenchResult out;
	out.report.task = to_string(cfg.task);
	out.report.schedule = cfg.schedule;
	for (auto &c : cells) {
		out.report.rows.push_back(std::move(c.row));
		out.traces.push_back(std::move(c.trace));
		out.thresholds.push_back(c.threshold);
	}
	return out;
}

void write_results_csv(const EvalReport &report, const fs::path &path) {
	std::set<std::string> keys;
	for (const auto &r : report.rows) {
		for (const auto &[k, v] : r.metrics) {
			keys.insert(k);
		}
	}
	std::ofstream out(path);
	if (!out) {
		throw Error("cannot write " + path.string());
	}
	out << "series,model,retrains,retrain_failures,error";
	for (const auto &k : keys) {
		out << ',' << k;
	}
	out << '\n';
	auto metric_cells = [&](const std::map<std::string, double> &m) {
		for (const auto &k : keys) {
			out << ',';
			if (const auto it = m.find(k); it != m.end()) {
				out << fmt(it->second);
			}
		}
		out << '\n';
	};
	for (const auto &r : report.rows) {
		out << csv_escape(r.series) << ',' << csv_escape(r.model) << ',' << r.retrains << ',' << r.retrain_failures
		    << ',' << csv_escape(r.error);
		metric_cells(r.metrics);
	}
	for (const auto &m : report.models()) {
		out << "__mean__," << csv_escape(m) << ",,,";
		metric_cells(report.aggregate_mean(m));
		out << "__median__," << csv_escape(m) << ",,,";
		metric_cells(report.aggregate_median(m));
	}
}

void write_results_json(const BenchResult &result, const RunConfig &cfg, const fs::path &path) {
	const auto &report = result.report;
	json j;
	j["task"] = report.task;
	j["seed"] = cfg.seed;
	j["schedule"] = {{"cadence", to_string(report.schedule.cadence)},
	                 {"window_seconds", report.schedule.window_seconds}};
	j["inference"] = {{"mode", to_string(cfg.inference.mode)}, {"horizon", cfg.inference.horizon}};
	j["metrics"] = cfg.metrics;
	if (cfg.task == Task::Anomaly) {
		j["threshold_rule"] = {{"threshold", cfg.rule.threshold},
		                       {"min_alerts", cfg.rule.min_alerts},
		                       {"alert_window", cfg.rule.alert_window},
		                       {"suppress", cfg.rule.suppress},
		                       {"tune", cfg.tune_threshold}};
	}
	json models = json::array();
	for (const auto &m : cfg.models) {
		models.push_back({{"label", m.label}, {"name", m.name}, {"params", json::parse(m.params_json)}});
	}
	j["models"] = models;
	json rows = json::array();
	for (std::size_t i = 0; i < report.rows.size(); ++i) {
		const auto &r = report.rows[i];
		json row{{"series", r.series},
		         {"model", r.model},
		         {"metrics", r.metrics},
		         {"retrains", r.retrains},
		         {"retrain_failures", r.retrain_failures},
		         {"timings", {{"train_seconds", r.train_seconds}, {"predict_seconds", r.predict_seconds}}}};
		if (!r.error.empty()) {
			row["error"] = r.error;
		}
		if (cfg.task == Task::Anomaly && r.error.empty()) {
			row["threshold"] = result.thresholds[i];
		}
		rows.push_back(row);
	}
	j["series"] = rows;
	json agg = json::object();
	for (const auto &m : report.models()) {
		agg[m] = {{"mean", report.aggregate_mean(m)}, {"median", report.aggregate_median(m)}};
	}
	j["aggregates"] = agg;
	std::ofstream out(path);
	if (!out) {
		throw Error("cannot write " + path.string());
	}
	out << j.dump(2) << '\n';
}

std::string render_svg(const SeriesTrace &trace, Task task) {
	constexpr double W = 900.0, H = 320.0, pad = 30.0;
	std::ostringstream os;
	os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
	   << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
	   << ' ' << H << "\">\n"
	   << "<title>" << xml_escape(trace.series + " / " + trace.model) << "</title>\n"
	   << "<rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
	if (trace.stamps.empty()) {
		os << "<text x=\"" << pad << "\" y=\"" << H / 2 << "\">no data</text>\n</svg>\n";
		return os.str();
	}
	const double t0 = static_cast<double>(trace.stamps.front());
	const double t1 = std::max(t0 + 1.0, static_cast<double>(trace.stamps.back()));
	double lo = std::numeric_limits<double>::infinity(), hi = -lo;
	auto widen = [&](const std::vector<double> &v) {
		for (double x : v) {
			if (std::isfinite(x)) {
				lo = std::min(lo, x);
				hi = std::max(hi, x);
			}
		}
	};
	widen(trace.truth);
	widen(trace.predicted);
	if (task == Task::Anomaly) {
		lo = std::min(lo, -trace.threshold);
		hi = std::max(hi, trace.threshold);
	}
	if (!(hi > lo)) {
		hi = lo + 1.0;
	}
	const auto X = [&](double t) { return pad + (t - t0) / (t1 - t0) * (W - 2 * pad); };
	const auto Y = [&](double v) { return H - pad - (v - lo) / (hi - lo) * (H - 2 * pad); };
	char buf[64];
	auto polyline = [&](const std::vector<double> &v, const char *colour) {
		os << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1\" points=\"";
		for (std::size_t i = 0; i < v.size() && i < trace.stamps.size(); ++i) {
			if (std::isfinite(v[i])) {
				std::snprintf(buf, sizeof buf, "%.2f,%.2f ", X(static_cast<double>(trace.stamps[i])), Y(v[i]));
				os << buf;
			}
		}
		os << "\"/>\n";
	};
	if (task == Task::Forecast) {
		polyline(trace.truth, "black");
		polyline(trace.predicted, "steelblue");
	} else {
		for (const auto &[a, b] : trace.windows) {
			const double xa = X(static_cast<double>(a)), xb = X(static_cast<double>(b));
			os << "<rect x=\"" << xa << "\" y=\"" << pad << "\" width=\"" << std::max(1.0, xb - xa) << "\" height=\""
			   << H - 2 * pad << "\" fill=\"orange\" fill-opacity=\"0.3\"/>\n";
		}
		for (double s : {trace.threshold, -trace.threshold}) {
			os << "<line x1=\"" << pad << "\" x2=\"" << W - pad << "\" y1=\"" << Y(s) << "\" y2=\"" << Y(s)
			   << "\" stroke=\"grey\" stroke-dasharray=\"4 4\"/>\n";
		}
		polyline(trace.predicted, "steelblue");
		for (auto t : trace.alerts) {
			os << "<circle cx=\"" << X(static_cast<double>(t)) << "\" cy=\"" << pad / 2 << "\" r=\"3\" fill=\"red\"/>\n";
		}
	}
	os << "</svg>\n";
	return os.str();
}

BenchResult run_and_write(const RunConfig &cfg) {
	const auto data = load_dataset(cfg.dataset);
	auto result = run_bench(cfg, data);
	fs::create_directories(cfg.out);
	write_results_json(result, cfg, cfg.out / "results.json");
	write_results_csv(result.report, cfg.out / "results.csv");
	if (cfg.plots) {
		fs::create_directories(cfg.out / "plots");
		for (const auto &t : result.traces) {
			std::ofstream svg(cfg.out / "plots" / (safe_file_name(t.series + "__" + t.model) + ".svg"));
			svg << render_svg(t, cfg.task);
		}
	}
	return result;
}

} // namespace tsi::bench
