#include "tsintel/bench.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace tsi::bench {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::vector<std::string> split_csv_line(const std::string &line) {
	std::vector<std::string> out;
	std::string cur;
	bool quoted = false;
	for (std::size_t i = 0; i < line.size(); ++i) {
		const char c = line[i];
		if (quoted) {
			if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
				cur += '"';
				++i;
			} else if (c == '"') {
				quoted = false;
			} else {
				cur += c;
			}
		} else if (c == '"') {
			quoted = true;
		} else if (c == ',') {
			out.push_back(cur);
			cur.clear();
		} else if (c != '\r') {
			cur += c;
		}
	}
	out.push_back(cur);
	for (auto &f : out) {
		const auto b = f.find_first_not_of(" \t");
		const auto e = f.find_last_not_of(" \t");
		f = b == std::string::npos ? std::string{} : f.substr(b, e - b + 1);
	}
	return out;
}

std::optional<std::int64_t> parse_int(const std::string &s) {
	std::int64_t v = 0;
	const auto *end = s.data() + s.size();
	const auto [p, ec] = std::from_chars(s.data(), end, v);
	if (ec != std::errc{} || p != end || s.empty()) {
		return std::nullopt;
	}
	return v;
}

std::optional<double> parse_double(const std::string &s) {
	if (s.empty()) {
		return std::nullopt;
	}
	char *end = nullptr;
	const double v = std::strtod(s.c_str(), &end);
	if (end != s.c_str() + s.size()) {
		return std::nullopt;
	}
	return v;
}

std::string where(const fs::path &path, std::size_t line) {
	return path.string() + ":" + std::to_string(line) + ": ";
}

} // namespace

std::optional<Timestamp> parse_iso8601(const std::string &s) {
	int y = 0, mo = 0, d = 0, h = 0, mi = 0;
	double sec = 0.0;
	char sep = 0;
	int consumed = 0;
	if (std::sscanf(s.c_str(), "%4d-%2d-%2d%n", &y, &mo, &d, &consumed) != 3 || consumed != 10) {
		return std::nullopt;
	}
	std::size_t pos = 10;
	if (pos < s.size()) {
		sep = s[pos];
		if (sep != 'T' && sep != ' ') {
			return std::nullopt;
		}
		int c2 = 0;
		if (std::sscanf(s.c_str() + pos + 1, "%2d:%2d%n", &h, &mi, &c2) != 2 || c2 != 5) {
			return std::nullopt;
		}
		pos += 1 + 5;
		if (pos < s.size() && s[pos] == ':') {
			int c3 = 0;
			if (std::sscanf(s.c_str() + pos + 1, "%lf%n", &sec, &c3) != 1) {
				return std::nullopt;
			}
			pos += 1 + static_cast<std::size_t>(c3);
		}
		if (pos < s.size() && s[pos] == 'Z') {
			++pos;
		}
		if (pos != s.size()) {
			return std::nullopt;
		}
	}
	using namespace std::chrono;
	const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
	if (!ymd.ok() || h > 23 || mi > 59 || sec < 0.0 || sec >= 61.0) {
		return std::nullopt;
	}
	const auto days = sys_days{ymd}.time_since_epoch().count();
	return static_cast<Timestamp>(days) * 86400 + h * 3600 + mi * 60 + static_cast<Timestamp>(sec);
}

std::string format_iso8601(Timestamp t) {
	using namespace std::chrono;
	const auto days = static_cast<long>(t >= 0 ? t / 86400 : (t - 86399) / 86400);
	const auto rem = t - static_cast<Timestamp>(days) * 86400;
	const year_month_day ymd{sys_days{std::chrono::days{days}}};
	char buf[32];
	std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
	              static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()), static_cast<int>(rem / 3600),
	              static_cast<int>(rem % 3600 / 60), static_cast<int>(rem % 60));
	return buf;
}

LoadedSeries load_csv(const fs::path &path, const CsvSchema &schema) {
	std::ifstream in(path);
	if (!in) {
		throw LoadError("cannot open " + path.string());
	}
	std::string line;
	if (!std::getline(in, line)) {
		throw LoadError(where(path, 1) + "missing header row");
	}
	const auto header = split_csv_line(line);
	auto column = [&](const std::string &name) -> std::size_t {
		const auto it = std::find(header.begin(), header.end(), name);
		if (it == header.end()) {
			throw LoadError(where(path, 1) + "column '" + name + "' not found in header");
		}
		return static_cast<std::size_t>(it - header.begin());
	};
	std::optional<std::size_t> ts_col;
	if (!schema.timestamp_column.empty()) {
		ts_col = column(schema.timestamp_column);
	}
	std::optional<std::size_t> label_col;
	if (!schema.label_column.empty()) {
		label_col = column(schema.label_column);
	}
	std::vector<std::size_t> value_cols;
	std::vector<std::string> names;
	if (schema.value_columns.empty()) {
		for (std::size_t i = 0; i < header.size(); ++i) {
			if (i != ts_col && i != label_col) {
				value_cols.push_back(i);
				names.push_back(header[i]);
			}
		}
		if (value_cols.empty()) {
			throw LoadError(where(path, 1) + "no value columns");
		}
	} else {
		for (const auto &c : schema.value_columns) {
			value_cols.push_back(column(c));
			names.push_back(c);
		}
	}

	std::vector<std::string> raw_stamps;
	std::vector<std::vector<double>> values(value_cols.size());
	std::vector<bool> labels;
	std::size_t lineno = 1;
	while (std::getline(in, line)) {
		++lineno;
		if (line.find_first_not_of(" \t\r") == std::string::npos) {
			continue;
		}
		const auto fields = split_csv_line(line);
		if (fields.size() != header.size()) {
			throw LoadError(where(path, lineno) + "expected " + std::to_string(header.size()) + " fields, got " +
			                std::to_string(fields.size()));
		}
		if (ts_col) {
			raw_stamps.push_back(fields[*ts_col]);
		}
		for (std::size_t j = 0; j < value_cols.size(); ++j) {
			const auto v = parse_double(fields[value_cols[j]]);
			if (!v) {
				throw LoadError(where(path, lineno) + "column '" + header[value_cols[j]] + "': unparseable value '" +
				                fields[value_cols[j]] + "'");
			}
			values[j].push_back(*v);
		}
		if (label_col) {
			const auto &f = fields[*label_col];
			if (f != "0" && f != "1") {
				throw LoadError(where(path, lineno) + "column '" + header[*label_col] + "': label must be 0 or 1, got '" +
				                f + "'");
			}
			labels.push_back(f == "1");
		}
	}
	const std::size_t n = values.front().size();
	if (n == 0) {
		throw LoadError(path.string() + ": no data rows");
	}

	std::vector<Timestamp> stamps(n);
	if (ts_col) {
		const bool epoch = std::all_of(raw_stamps.begin(), raw_stamps.end(), [](const auto &s) { return parse_int(s); });
		for (std::size_t i = 0; i < n; ++i) {
			const auto t = epoch ? parse_int(raw_stamps[i]) : parse_iso8601(raw_stamps[i]);
			if (!t) {
				throw LoadError(where(path, i + 2) + "column '" + schema.timestamp_column + "': unparseable timestamp '" +
				                raw_stamps[i] + "'");
			}
			stamps[i] = *t;
			if (i > 0 && stamps[i] <= stamps[i - 1]) {
				throw LoadError(where(path, i + 2) + "timestamps must be strictly increasing");
			}
		}
	} else {
		if (schema.granularity <= 0) {
			throw LoadError(path.string() + ": granularity must be positive to synthesize timestamps");
		}
		for (std::size_t i = 0; i < n; ++i) {
			stamps[i] = static_cast<Timestamp>(i) * schema.granularity;
		}
	}

	LoadedSeries out;
	out.name = path.stem().string();
	out.ts = TimeSeries(names, stamps, values);
	if (label_col) {
		out.labels = AnomalyLabelSeries(stamps, labels);
	}
	return out;
}

namespace {

DatasetManifest manifest_from_json(const json &j, const fs::path &base_dir) {
	DatasetManifest m;
	m.root = j.value("root", std::string{"."});
	if (m.root.is_relative()) {
		m.root = base_dir / m.root;
	}
	if (!j.contains("files") || !j["files"].is_array()) {
		throw ConfigError("dataset manifest needs a 'files' array");
	}
	m.files = j["files"].get<std::vector<std::string>>();
	if (j.contains("timestamp_column")) {
		m.schema.timestamp_column = j["timestamp_column"].is_null() ? "" : j["timestamp_column"].get<std::string>();
	}
	m.schema.value_columns = j.value("value_columns", std::vector<std::string>{});
	m.schema.label_column = j.value("label_column", std::string{});
	m.schema.granularity = j.value("granularity", std::int64_t{60});
	m.train_fraction = j.value("train_fraction", 0.5);
	if (!(m.train_fraction > 0.0 && m.train_fraction < 1.0)) {
		throw ConfigError("train_fraction must lie in (0, 1)");
	}
	return m;
}

json parse_json(const std::string &text, const std::string &what) {
	try {
		return json::parse(text);
	} catch (const json::exception &e) {
		throw ConfigError(what + ": " + e.what());
	}
}

std::string read_file(const fs::path &path) {
	std::ifstream in(path);
	if (!in) {
		throw ConfigError("cannot open " + path.string());
	}
	std::stringstream ss;
	ss << in.rdbuf();
	return ss.str();
}

} // namespace

DatasetManifest DatasetManifest::from_json_text(const std::string &text, const fs::path &base_dir) {
	try {
		return manifest_from_json(parse_json(text, "manifest"), base_dir);
	} catch (const json::exception &e) {
		throw ConfigError(std::string("manifest: ") + e.what());
	}
}

DatasetManifest DatasetManifest::from_file(const fs::path &path) {
	return from_json_text(read_file(path), path.parent_path());
}

std::vector<LoadedSeries> load_dataset(const DatasetManifest &manifest) {
	fs::path root = manifest.root;
	if (const char *env = std::getenv("BENCH_DATA_ROOT"); env && *env) {
		root = env;
	}
	std::vector<LoadedSeries> out;
	for (const auto &f : manifest.files) {
		out.push_back(load_csv(root / f, manifest.schema));
	}
	return out;
}

std::string to_string(Task t) {
	return t == Task::Forecast ? "forecast" : "anomaly";
}

namespace {

ModelSpec model_from_json(const json &j) {
	ModelSpec s;
	if (j.is_string()) {
		s.name = j.get<std::string>();
	} else if (j.is_object()) {
		s.name = j.at("name").get<std::string>();
		s.label = j.value("label", std::string{});
		if (j.contains("params")) {
			s.params_json = j["params"].dump();
		}
	} else {
		throw ConfigError("model entries must be a name or an object with 'name'");
	}
	if (s.label.empty()) {
		s.label = s.name;
	}
	return s;
}

} // namespace

RunConfig RunConfig::from_json_text(const std::string &text, const fs::path &base_dir) {
	const json j = parse_json(text, "config");
	RunConfig c;
	try {
		const auto task = j.at("task").get<std::string>();
		if (task == "forecast") {
			c.task = Task::Forecast;
		} else if (task == "anomaly") {
			c.task = Task::Anomaly;
		} else {
			throw ConfigError("task must be 'forecast' or 'anomaly', got '" + task + "'");
		}
		const auto &ds = j.at("dataset");
		c.dataset = ds.is_string() ? DatasetManifest::from_file(base_dir / ds.get<std::string>())
		                           : manifest_from_json(ds, base_dir);
		if (j.contains("train_fraction")) {
			c.dataset.train_fraction = j["train_fraction"].get<double>();
		}
		for (const auto &m : j.at("models")) {
			c.models.push_back(model_from_json(m));
		}
		for (const auto &t : j.value("transforms", json::array())) {
			TransformSpec ts;
			ts.kind = t.at("kind").get<std::string>();
			ts.order = t.value("order", 1);
			ts.window = t.value("window", 1);
			ts.granularity = t.value("granularity", std::int64_t{0});
			c.transforms.push_back(ts);
		}
		if (j.contains("schedule")) {
			const auto &s = j["schedule"];
			c.schedule.cadence = cadence_from_string(s.value("cadence", std::string{"none"}));
			c.schedule.window_seconds = s.value("window_seconds", std::int64_t{0});
		}
		if (j.contains("inference")) {
			const auto &s = j["inference"];
			const auto mode = s.value("mode", std::string{"batch"});
			if (mode == "batch") {
				c.inference = Inference::batch();
			} else if (mode == "streaming") {
				c.inference = Inference::streaming();
			} else if (mode == "window") {
				c.inference = Inference::window(s.value("horizon", std::size_t{1}));
			} else {
				throw ConfigError("inference mode must be batch, streaming or window, got '" + mode + "'");
			}
		}
		c.metrics = j.value("metrics", std::vector<std::string>{});
		if (c.metrics.empty()) {
			c.metrics = {c.task == Task::Forecast ? "smape" : "rpa"};
		}
		if (j.contains("threshold")) {
			const auto &r = j["threshold"];
			c.rule.threshold = r.value("threshold", c.rule.threshold);
			c.rule.min_alerts = r.value("min_alerts", c.rule.min_alerts);
			c.rule.alert_window = r.value("alert_window", c.rule.alert_window);
			c.rule.suppress = r.value("suppress", c.rule.suppress);
			c.tune_threshold = r.value("tune", false);
		}
		c.seed = j.value("seed", std::uint64_t{0});
		c.jobs = j.value("jobs", std::size_t{1});
		c.plots = j.value("plots", true);
		if (j.contains("out")) {
			c.out = j["out"].get<std::string>();
		}
	} catch (const json::exception &e) {
		throw ConfigError(std::string("config: ") + e.what());
	}
	c.validate();
	return c;
}

RunConfig RunConfig::from_file(const fs::path &path) {
	return from_json_text(read_file(path), path.parent_path());
}

void RunConfig::validate() const {
	if (models.empty()) {
		throw ConfigError("config lists no models");
	}
	const auto allowed = task == Task::Forecast ? forecast_model_names() : anomaly_model_names();
	for (const auto &m : models) {
		if (std::find(allowed.begin(), allowed.end(), m.name) == allowed.end()) {
			throw ConfigError("model '" + m.name + "' is not a " + to_string(task) + " model");
		}
	}
	for (const auto &m : metrics) {
		if (task == Task::Forecast) {
			forecast_metric_from_string(m);
		} else if (m != "pw" && m != "pa" && m != "rpa") {
			throw ConfigError("anomaly metric must be pw, pa or rpa, got '" + m + "'");
		}
	}
	for (const auto &t : transforms) {
		transform_kind_from_string(t.kind);
	}
	if (jobs == 0) {
		throw ConfigError("jobs must be at least 1");
	}
	if (!(dataset.train_fraction > 0.0 && dataset.train_fraction < 1.0)) {
		throw ConfigError("train_fraction must lie in (0, 1)");
	}
	try {
		schedule.validate();
		rule.validate();
	} catch (const InvalidArgument &e) {
		throw ConfigError(std::string("config: ") + e.what());
	}
}

} // namespace tsi::bench
