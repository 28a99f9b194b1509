#include "tsintel/bench.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

struct Overrides {
	std::string config;
	std::optional<std::size_t> jobs;
	std::optional<std::uint64_t> seed;
	std::optional<std::string> out;
	std::optional<double> threshold;
	std::optional<std::size_t> min_alerts;
	std::optional<std::int64_t> alert_window;
	std::optional<std::int64_t> suppress;
	bool tune = false;
};

void add_common(CLI::App *cmd, Overrides &o) {
	cmd->add_option("--config", o.config, "run configuration JSON")->required()->check(CLI::ExistingFile);
	cmd->add_option("--jobs", o.jobs, "series evaluated in parallel");
	cmd->add_option("--seed", o.seed, "random seed for stochastic models");
	cmd->add_option("--out", o.out, "output directory");
}

int run(tsi::bench::Task task, const Overrides &o) {
	auto cfg = tsi::bench::RunConfig::from_file(o.config);
	if (cfg.task != task) {
		throw tsi::ConfigError("config task is '" + tsi::bench::to_string(cfg.task) + "' but the command is '" +
		                       tsi::bench::to_string(task) + "'");
	}
	if (o.jobs) {
		cfg.jobs = *o.jobs;
	}
	if (o.seed) {
		cfg.seed = *o.seed;
	}
	if (o.out) {
		cfg.out = *o.out;
	}
	if (o.threshold) {
		cfg.rule.threshold = *o.threshold;
	}
	if (o.min_alerts) {
		cfg.rule.min_alerts = *o.min_alerts;
	}
	if (o.alert_window) {
		cfg.rule.alert_window = *o.alert_window;
	}
	if (o.suppress) {
		cfg.rule.suppress = *o.suppress;
	}
	if (o.tune) {
		cfg.tune_threshold = true;
	}
	cfg.validate();
	const auto result = tsi::bench::run_and_write(cfg);
	std::size_t failed = 0;
	for (const auto &r : result.report.rows) {
		if (!r.error.empty()) {
			++failed;
			std::cerr << "warning: " << r.series << " / " << r.model << ": " << r.error << '\n';
		}
	}
	std::cout << result.report.rows.size() << " evaluations (" << failed << " failed), results in "
	          << cfg.out.string() << '\n';
	return 0;
}

} // namespace

int main(int argc, char **argv) {
	CLI::App app{"Benchmark forecasters and anomaly detectors on a dataset manifest"};
	app.require_subcommand(1);
	Overrides fo, ao;
	auto *forecast = app.add_subcommand("forecast", "evaluate forecasters");
	add_common(forecast, fo);
	auto *anomaly = app.add_subcommand("anomaly", "evaluate anomaly detectors");
	add_common(anomaly, ao);
	anomaly->add_option("--threshold", ao.threshold, "alert threshold on |z|");
	anomaly->add_option("--min-alerts", ao.min_alerts, "candidates needed in the alert window");
	anomaly->add_option("--alert-window", ao.alert_window, "alert window in seconds");
	anomaly->add_option("--suppress", ao.suppress, "dead time after an alert in seconds");
	anomaly->add_flag("--tune-threshold", ao.tune, "pick the threshold maximizing RPA F1 on the training split");
	CLI11_PARSE(app, argc, argv);
	try {
		return forecast->parsed() ? run(tsi::bench::Task::Forecast, fo) : run(tsi::bench::Task::Anomaly, ao);
	} catch (const tsi::Error &e) {
		std::cerr << "error: " << e.what() << '\n';
		return 2;
	}
}
