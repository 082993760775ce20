#include "nws/config.hpp"

#include <stdexcept>
#include <string>

namespace nws {

using nlohmann::json;

namespace {

std::string data_kind_name(DataSpec::Kind k) {
  return k == DataSpec::kSynthClassification ? "synth-classification" : "csv";
}

std::string model_kind_name(ModelConfig::Kind k) {
  return k == ModelConfig::kLogistic ? "logistic" : "mlp";
}

std::string optimizer_name(ModelConfig::Optimizer o) {
  return o == ModelConfig::kSgd ? "sgd" : "adam";
}

std::string representation_name(TrainConfig::Representation r) {
  return r == TrainConfig::kRawFeatures ? "raw" : "penultimate";
}

template <typename T>
T get(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  return j.at(key).get<T>();
}

void require_keys(const json& j, const char* where,
                  std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const char* k : allowed) {
      if (key == k) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw std::invalid_argument("config: unknown key \"" + key + "\" in " +
                                  where);
    }
  }
}

}  // namespace

json to_json(const TrainConfig& cfg) {
  json j;
  j["data"] = {
      {"kind", data_kind_name(cfg.data.kind)},
      {"n", cfg.data.n},
      {"dim", cfg.data.dim},
      {"separation", cfg.data.separation},
      {"label_noise", cfg.data.label_noise},
      {"csv_path", cfg.data.csv_path},
      {"target_column", cfg.data.target_column},
      {"has_header", cfg.data.has_header},
      {"test_fraction", cfg.data.test_fraction},
  };
  j["model"] = {
      {"kind", model_kind_name(cfg.model.kind)},
      {"classes", cfg.model.classes},
      {"hidden", cfg.model.hidden},
      {"optimizer", optimizer_name(cfg.model.optimizer)},
      {"learning_rate", cfg.model.learning_rate},
      {"adam_beta1", cfg.model.adam_beta1},
      {"adam_beta2", cfg.model.adam_beta2},
      {"adam_eps", cfg.model.adam_eps},
  };
  j["sampler"] = {
      {"target_ratio", cfg.sampler.target_ratio},
      {"warmup_iters", cfg.sampler.warmup_iters},
      {"p_min", cfg.sampler.p_min},
      {"update_period_0", cfg.sampler.update_period_0},
      {"update_decay", cfg.sampler.update_decay},
      {"seed", cfg.sampler.seed},
  };
  j["sketch"] = {
      {"rows", cfg.sketch.rows},
      {"bits", cfg.sketch.bits},
      {"y_bound", cfg.sketch.y_bound},
      {"decay_gamma", cfg.sketch.decay_gamma},
  };
  j["representation"] = representation_name(cfg.representation);
  j["iterations"] = cfg.iterations;
  j["batch_size"] = cfg.batch_size;
  j["seed"] = cfg.seed;
  return j;
}

TrainConfig train_config_from_json(const json& j) {
  TrainConfig cfg;
  require_keys(j, "root",
               {"data", "model", "sampler", "sketch", "representation",
                "iterations", "batch_size", "seed"});
  if (j.contains("data")) {
    const json& d = j.at("data");
    require_keys(d, "data",
                 {"kind", "n", "dim", "separation", "label_noise", "csv_path",
                  "target_column", "has_header", "test_fraction"});
    const auto kind = get<std::string>(d, "kind", "synth-classification");
    if (kind == "synth-classification") {
      cfg.data.kind = DataSpec::kSynthClassification;
    } else if (kind == "csv") {
      cfg.data.kind = DataSpec::kCsv;
    } else {
      throw std::invalid_argument("config: unknown data kind " + kind);
    }
    cfg.data.n = get<std::size_t>(d, "n", cfg.data.n);
    cfg.data.dim = get<std::size_t>(d, "dim", cfg.data.dim);
    cfg.data.separation = get<double>(d, "separation", cfg.data.separation);
    cfg.data.label_noise = get<double>(d, "label_noise", cfg.data.label_noise);
    cfg.data.csv_path = get<std::string>(d, "csv_path", cfg.data.csv_path);
    cfg.data.target_column =
        get<std::size_t>(d, "target_column", cfg.data.target_column);
    cfg.data.has_header = get<bool>(d, "has_header", cfg.data.has_header);
    cfg.data.test_fraction =
        get<double>(d, "test_fraction", cfg.data.test_fraction);
  }
  if (j.contains("model")) {
    const json& m = j.at("model");
    require_keys(m, "model",
                 {"kind", "classes", "hidden", "optimizer", "learning_rate",
                  "adam_beta1", "adam_beta2", "adam_eps"});
    const auto kind = get<std::string>(m, "kind", "logistic");
    if (kind == "logistic") {
      cfg.model.kind = ModelConfig::kLogistic;
    } else if (kind == "mlp") {
      cfg.model.kind = ModelConfig::kMlp;
    } else {
      throw std::invalid_argument("config: unknown model kind " + kind);
    }
    cfg.model.classes = get<unsigned>(m, "classes", cfg.model.classes);
    cfg.model.hidden = get<unsigned>(m, "hidden", cfg.model.hidden);
    const auto opt = get<std::string>(m, "optimizer", "sgd");
    if (opt == "sgd") {
      cfg.model.optimizer = ModelConfig::kSgd;
    } else if (opt == "adam") {
      cfg.model.optimizer = ModelConfig::kAdam;
    } else {
      throw std::invalid_argument("config: unknown optimizer " + opt);
    }
    cfg.model.learning_rate =
        get<double>(m, "learning_rate", cfg.model.learning_rate);
    cfg.model.adam_beta1 = get<double>(m, "adam_beta1", cfg.model.adam_beta1);
    cfg.model.adam_beta2 = get<double>(m, "adam_beta2", cfg.model.adam_beta2);
    cfg.model.adam_eps = get<double>(m, "adam_eps", cfg.model.adam_eps);
  }
  if (j.contains("sampler")) {
    const json& s = j.at("sampler");
    require_keys(s, "sampler",
                 {"target_ratio", "warmup_iters", "p_min", "update_period_0",
                  "update_decay", "seed"});
    cfg.sampler.target_ratio =
        get<double>(s, "target_ratio", cfg.sampler.target_ratio);
    cfg.sampler.warmup_iters =
        get<unsigned>(s, "warmup_iters", cfg.sampler.warmup_iters);
    cfg.sampler.p_min = get<double>(s, "p_min", cfg.sampler.p_min);
    cfg.sampler.update_period_0 =
        get<unsigned>(s, "update_period_0", cfg.sampler.update_period_0);
    cfg.sampler.update_decay =
        get<double>(s, "update_decay", cfg.sampler.update_decay);
    cfg.sampler.seed = get<std::uint64_t>(s, "seed", cfg.sampler.seed);
  }
  if (j.contains("sketch")) {
    const json& s = j.at("sketch");
    require_keys(s, "sketch", {"rows", "bits", "y_bound", "decay_gamma"});
    cfg.sketch.rows = get<unsigned>(s, "rows", cfg.sketch.rows);
    cfg.sketch.bits = get<unsigned>(s, "bits", cfg.sketch.bits);
    cfg.sketch.y_bound = get<double>(s, "y_bound", cfg.sketch.y_bound);
    cfg.sketch.decay_gamma =
        get<double>(s, "decay_gamma", cfg.sketch.decay_gamma);
  }
  const auto repr = get<std::string>(j, "representation", "raw");
  if (repr == "raw") {
    cfg.representation = TrainConfig::kRawFeatures;
  } else if (repr == "penultimate") {
    cfg.representation = TrainConfig::kPenultimate;
  } else {
    throw std::invalid_argument("config: unknown representation " + repr);
  }
  cfg.iterations = get<std::uint64_t>(j, "iterations", cfg.iterations);
  cfg.batch_size = get<std::size_t>(j, "batch_size", cfg.batch_size);
  cfg.seed = get<std::uint64_t>(j, "seed", cfg.seed);
  cfg.sampler.validate();
  return cfg;
}

json to_json(const CompareReport& report) {
  json j;
  j["baseline_final_accuracy"] = report.baseline_final_accuracy;
  j["adaptive_final_accuracy"] = report.adaptive_final_accuracy;
  if (report.reached) {
    j["reached_baseline_accuracy"] = true;
    j["reach_iter"] = report.reach_iter;
    j["reach_wallclock_ns"] = report.reach_wallclock_ns;
    j["speedup_examples"] = report.speedup_examples;
    j["speedup_wallclock"] = report.speedup_wallclock;
  } else {
    j["reached_baseline_accuracy"] = false;
    j["reach_iter"] = "not reached";
  }
  return j;
}

}  // namespace nws
