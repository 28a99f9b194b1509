#include "tsintel/anomaly/detectors.hpp"
#include "tsintel/automl.hpp"
#include "tsintel/bench.hpp"
#include "tsintel/ensembles.hpp"
#include "tsintel/forecast/ets.hpp"
#include "tsintel/forecast/sarima.hpp"
#include "tsintel/forecast/tree_forecaster.hpp"
#include "tsintel/forecast/var.hpp"

#include <json.hpp>

namespace tsi::bench {

namespace {

using nlohmann::json;

json params_of(const ModelSpec &spec) {
	try {
		auto j = json::parse(spec.params_json);
		if (!j.is_object()) {
			throw ConfigError("params of model '" + spec.label + "' must be an object");
		}
		return j;
	} catch (const json::exception &e) {
		throw ConfigError("params of model '" + spec.label + "': " + e.what());
	}
}

ModelSpec member_spec(const json &j) {
	ModelSpec s;
	if (j.is_string()) {
		s.name = j.get<std::string>();
	} else {
		s.name = j.at("name").get<std::string>();
		if (j.contains("params")) {
			s.params_json = j["params"].dump();
		}
	}
	s.label = s.name;
	return s;
}

TransformChain chain_of(const RunConfig &cfg) {
	TransformChain chain;
	for (const auto &t : cfg.transforms) {
		switch (transform_kind_from_string(t.kind)) {
		case TransformKind::Normalize: chain.push_back(Transform::normalize()); break;
		case TransformKind::Difference: chain.push_back(Transform::difference(t.order)); break;
		case TransformKind::MovingAverage: chain.push_back(Transform::moving_average(t.window)); break;
		case TransformKind::Resample: chain.push_back(Transform::resample(t.granularity)); break;
		}
	}
	return chain;
}

TreeEnsembleParams tree_params(const json &p, EnsembleKind kind, std::uint64_t seed) {
	TreeEnsembleParams t;
	t.kind = kind;
	t.n_trees = p.value("n_trees", t.n_trees);
	t.max_depth = p.value("max_depth", kind == EnsembleKind::GradientBoosting ? 3 : t.max_depth);
	t.learning_rate = p.value("learning_rate", t.learning_rate);
	t.min_samples_leaf = p.value("min_samples_leaf", t.min_samples_leaf);
	t.feature_fraction = p.value("feature_fraction", t.feature_fraction);
	t.seed = p.value("seed", seed);
	return t;
}

} // namespace

std::vector<std::string> forecast_model_names() {
	return {"arima", "auto-sarima", "ets", "auto-ets", "var", "gb", "rf", "ensemble"};
}

std::vector<std::string> anomaly_model_names() {
	return {"windstats", "zms", "sr", "iforest", "forecast-residual", "ensemble"};
}

std::unique_ptr<Forecaster> make_forecaster(const ModelSpec &spec, const RunConfig &cfg) {
	const json p = params_of(spec);
	try {
		ForecasterConfig fc;
		fc.target_index = p.value("target", std::size_t{0});
		fc.max_lags = p.value("max_lags", fc.max_lags);
		fc.transform = chain_of(cfg);
		if (spec.name == "arima") {
			SarimaOrders o;
			o.p = p.value("p", 1);
			o.d = p.value("d", 1);
			o.q = p.value("q", 1);
			o.intercept = p.value("intercept", o.d <= 1);
			return std::make_unique<Sarima>(o, fc);
		}
		if (spec.name == "auto-sarima") {
			AutoSarimaConfig a;
			a.m = p.value("m", 0);
			a.bounds.max_p = p.value("max_p", a.bounds.max_p);
			a.bounds.max_q = p.value("max_q", a.bounds.max_q);
			a.bounds.max_P = p.value("max_P", a.bounds.max_P);
			a.bounds.max_Q = p.value("max_Q", a.bounds.max_Q);
			return std::make_unique<AutoSarima>(a, fc);
		}
		if (spec.name == "ets") {
			EtsSpec e;
			e.trend = p.value("trend", false);
			e.m = p.value("m", 1);
			e.season = e.m > 1;
			return std::make_unique<Ets>(e, fc);
		}
		if (spec.name == "auto-ets") {
			AutoEtsConfig a;
			a.m = p.value("m", 0);
			return std::make_unique<AutoEts>(a, fc);
		}
		if (spec.name == "var") {
			return std::make_unique<VarForecaster>(p.value("max_order", std::size_t{3}), fc);
		}
		if (spec.name == "gb") {
			return std::make_unique<TreeForecaster>(tree_params(p, EnsembleKind::GradientBoosting, cfg.seed), fc);
		}
		if (spec.name == "rf") {
			return std::make_unique<TreeForecaster>(tree_params(p, EnsembleKind::RandomForest, cfg.seed), fc);
		}
		if (spec.name == "ensemble") {
			std::vector<std::unique_ptr<Forecaster>> members;
			for (const auto &m : p.value("members", json::array({"auto-ets", "auto-sarima"}))) {
				const auto ms = member_spec(m);
				if (ms.name == "ensemble") {
					throw ConfigError("ensembles cannot be nested");
				}
				members.push_back(make_forecaster(ms, cfg));
			}
			Combiner c;
			c.mode = combine_mode_from_string(p.value("combiner", std::string{"mean"}));
			return std::make_unique<ForecasterEnsemble>(std::move(members), c, fc);
		}
	} catch (const json::exception &e) {
		throw ConfigError("params of model '" + spec.label + "': " + e.what());
	}
	throw ConfigError("unknown forecast model '" + spec.name + "'");
}

std::unique_ptr<AnomalyModel> make_anomaly_model(const ModelSpec &spec, const RunConfig &cfg) {
	const json p = params_of(spec);
	try {
		const auto target = p.value("target", std::size_t{0});
		std::unique_ptr<AnomalyDetector> d;
		if (spec.name == "windstats") {
			WindStatsConfig c;
			c.window_minutes = p.value("window_minutes", c.window_minutes);
			c.target_index = target;
			d = std::make_unique<WindStats>(c);
		} else if (spec.name == "zms") {
			ZmsConfig c;
			c.max_lag = p.value("max_lag", c.max_lag);
			c.target_index = target;
			d = std::make_unique<Zms>(c);
		} else if (spec.name == "sr") {
			SpectralResidualConfig c;
			c.window = p.value("window", c.window);
			c.target_index = target;
			d = std::make_unique<SpectralResidual>(c);
		} else if (spec.name == "iforest") {
			IsolationForestConfig c;
			c.n_trees = p.value("n_trees", c.n_trees);
			c.subsample = p.value("subsample", c.subsample);
			c.window = p.value("window", c.window);
			c.seed = p.value("seed", cfg.seed);
			d = std::make_unique<IsolationForest>(c);
		} else if (spec.name == "forecast-residual") {
			auto fs = member_spec(p.value("forecaster", json("auto-ets")));
			if (fs.params_json == "{}" && target != 0) {
				fs.params_json = json{{"target", target}}.dump();
			}
			d = std::make_unique<ForecastResidual>(make_forecaster(fs, cfg));
		} else if (spec.name == "ensemble") {
			std::vector<std::unique_ptr<AnomalyModel>> members;
			for (const auto &m : p.value("members", json::array({"forecast-residual", "iforest", "zms"}))) {
				const auto ms = member_spec(m);
				if (ms.name == "ensemble") {
					throw ConfigError("ensembles cannot be nested");
				}
				members.push_back(make_anomaly_model(ms, cfg));
			}
			return std::make_unique<AnomalyEnsemble>(std::move(members));
		} else {
			throw ConfigError("unknown anomaly model '" + spec.name + "'");
		}
		return std::make_unique<CalibratedDetector>(std::move(d));
	} catch (const json::exception &e) {
		throw ConfigError("params of model '" + spec.label + "': " + e.what());
	}
}

} // namespace tsi::bench
