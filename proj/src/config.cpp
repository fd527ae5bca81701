#include "placebocil/config.hpp"

#include <fstream>

#include "placebocil/errors.hpp"

namespace placebocil {

using nlohmann::json;

std::string to_string(KdMode mode) {
  switch (mode) {
    case KdMode::kPlacebo: return "placebo";
    case KdMode::kNewData: return "new_data";
    case KdMode::kOldDataOracle: return "old_data_oracle";
    case KdMode::kNone: return "none";
  }
  return "placebo";
}

KdMode kd_mode_from_string(const std::string& s) {
  if (s == "placebo") return KdMode::kPlacebo;
  if (s == "new_data") return KdMode::kNewData;
  if (s == "old_data_oracle") return KdMode::kOldDataOracle;
  if (s == "none") return KdMode::kNone;
  throw ConfigError("kd.mode: unknown value '" + s + "'");
}

std::string to_string(SelectionStrategy strategy) {
  switch (strategy) {
    case SelectionStrategy::kScored: return "scored";
    case SelectionStrategy::kRandom: return "random";
    case SelectionStrategy::kConfidence: return "confidence";
  }
  return "scored";
}

SelectionStrategy selection_from_string(const std::string& s) {
  if (s == "scored") return SelectionStrategy::kScored;
  if (s == "random") return SelectionStrategy::kRandom;
  if (s == "confidence") return SelectionStrategy::kConfidence;
  throw ConfigError("placebo.selection: unknown value '" + s + "'");
}

namespace {

std::string to_string(ExemplarStrategy s) {
  return s == ExemplarStrategy::kHerding ? "herding" : "random";
}

ExemplarStrategy exemplar_strategy_from_string(const std::string& s) {
  if (s == "herding") return ExemplarStrategy::kHerding;
  if (s == "random") return ExemplarStrategy::kRandom;
  throw ConfigError("exemplars.strategy: unknown value '" + s + "'");
}

std::string to_string(KdKind k) {
  return k == KdKind::kLogitKl ? "logit_kl" : "cosine_embedding";
}

KdKind kd_kind_from_string(const std::string& s) {
  if (s == "logit_kl") return KdKind::kLogitKl;
  if (s == "cosine_embedding") return KdKind::kCosineEmbedding;
  throw ConfigError("kd.kind: unknown value '" + s + "'");
}

}  // namespace

ExperimentConfig ExperimentConfig::defaults() {
  ExperimentConfig cfg;
  cfg.optimizer.learning_rate = 0.05;
  cfg.optimizer.momentum = 0.9;
  cfg.optimizer.schedule = {{12, 10.0}, {16, 10.0}};
  cfg.optimizer.epochs = cfg.training.epochs_main;
  return cfg;
}

json ExperimentConfig::to_json() const {
  json j;
  j["seed"] = seed;
  json& t = j["task"];
  if (task.kind == TaskConfig::Kind::kSynthetic) {
    t["kind"] = "synthetic";
    t["classes"] = task.synthetic.classes;
    t["feature_dim"] = task.synthetic.feature_dim;
    t["train_per_class"] = task.synthetic.train_per_class;
    t["test_per_class"] = task.synthetic.test_per_class;
    t["mean_radius"] = task.synthetic.mean_radius;
    t["noise_sigma"] = task.synthetic.noise_sigma;
    t["stream_classes"] = task.synthetic.stream_classes;
    t["stream_pool_size"] = task.synthetic.stream_pool_size;
    t["stream_min_dist"] = task.synthetic.stream_min_dist;
    t["overlap_fraction"] = task.synthetic.overlap_fraction;
  } else {
    t["kind"] = "files";
    t["train"] = task.train_path;
    t["test"] = task.test_path;
    t["stream"] = task.stream_path;
  }
  j["schedule"]["class_counts"] = class_counts;
  j["model"]["hidden"] = hidden;
  json& o = j["optimizer"];
  o["learning_rate"] = optimizer.learning_rate;
  o["momentum"] = optimizer.momentum;
  o["schedule"] = json::array();
  for (const LrMilestone& m : optimizer.schedule) {
    o["schedule"].push_back({m.epoch, m.divide_by});
  }
  j["exemplars"]["per_class"] = exemplar_cap;
  j["exemplars"]["strategy"] = to_string(exemplar_strategy);
  json& kd = j["kd"];
  kd["mode"] = to_string(kd_mode);
  kd["kind"] = to_string(loss.kd_kind);
  kd["lambda"] = loss.lambda;
  kd["temperature"] = loss.temperature;
  json& p = j["placebo"];
  p["u_cap"] = placebo.u_cap;
  p["p_cap"] = placebo.p_cap;
  p["per_class_k"] = placebo.per_class_k;
  p["selection"] = to_string(placebo.selection);
  p["objective"] = placebo.objective == ScoreObjective::kLowestScore
                       ? "lowest_score"
                       : "highest_score";
  p["live_rescore"] = placebo.live_rescore;
  p["log_selection"] = placebo.log_selection;
  json& pol = j["policy"];
  pol["beta_grid"] = policy.beta_grid;
  pol["gamma_grid"] = policy.gamma_grid;
  pol["xi"] = policy.xi;
  pol["exploration_floor"] = policy.exploration_floor;
  pol["online"] = policy.online;
  pol["fixed_action"] = {policy.fixed_action.beta, policy.fixed_action.gamma};
  json& tr = j["training"];
  tr["epochs_policy"] = training.epochs_policy;
  tr["epochs_main"] = training.epochs_main;
  tr["policy_iters"] = training.policy_iters;
  tr["lookahead"] = training.lookahead;
  tr["batch_new"] = training.batch_new;
  tr["batch_exemplar"] = training.batch_exemplar;
  tr["batch_placebo"] = training.batch_placebo;
  tr["local_subset"] = training.local_subset;
  tr["audit_every_iteration"] = training.audit_every_iteration;
  tr["normalize_reward"] = training.normalize_reward;
  return j;
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  ExperimentConfig cfg = defaults();
  try {
    cfg.seed = j.value("seed", cfg.seed);
    if (j.contains("task")) {
      const json& t = j.at("task");
      const std::string kind = t.value("kind", "synthetic");
      if (kind == "synthetic") {
        cfg.task.kind = TaskConfig::Kind::kSynthetic;
        SyntheticTaskSpec& s = cfg.task.synthetic;
        s.classes = t.value("classes", s.classes);
        s.feature_dim = t.value("feature_dim", s.feature_dim);
        s.train_per_class = t.value("train_per_class", s.train_per_class);
        s.test_per_class = t.value("test_per_class", s.test_per_class);
        s.mean_radius = t.value("mean_radius", s.mean_radius);
        s.noise_sigma = t.value("noise_sigma", s.noise_sigma);
        s.stream_classes = t.value("stream_classes", s.stream_classes);
        s.stream_pool_size = t.value("stream_pool_size", s.stream_pool_size);
        s.stream_min_dist = t.value("stream_min_dist", s.stream_min_dist);
        s.overlap_fraction = t.value("overlap_fraction", s.overlap_fraction);
      } else if (kind == "files") {
        cfg.task.kind = TaskConfig::Kind::kFiles;
        cfg.task.train_path = t.value("train", "");
        cfg.task.test_path = t.value("test", "");
        cfg.task.stream_path = t.value("stream", "");
      } else {
        throw ConfigError("task.kind: unknown value '" + kind + "'");
      }
    }
    if (j.contains("schedule")) {
      cfg.class_counts =
          j.at("schedule").value("class_counts", cfg.class_counts);
    }
    if (j.contains("model")) {
      cfg.hidden = j.at("model").value("hidden", cfg.hidden);
    }
    if (j.contains("optimizer")) {
      const json& o = j.at("optimizer");
      cfg.optimizer.learning_rate =
          o.value("learning_rate", cfg.optimizer.learning_rate);
      cfg.optimizer.momentum = o.value("momentum", cfg.optimizer.momentum);
      if (o.contains("schedule")) {
        cfg.optimizer.schedule.clear();
        for (const json& m : o.at("schedule")) {
          cfg.optimizer.schedule.push_back(
              {m.at(0).get<int>(), m.at(1).get<double>()});
        }
      }
    }
    if (j.contains("exemplars")) {
      const json& e = j.at("exemplars");
      cfg.exemplar_cap = e.value("per_class", cfg.exemplar_cap);
      if (e.contains("strategy")) {
        cfg.exemplar_strategy =
            exemplar_strategy_from_string(e.at("strategy").get<std::string>());
      }
    }
    if (j.contains("kd")) {
      const json& kd = j.at("kd");
      if (kd.contains("mode")) {
        cfg.kd_mode = kd_mode_from_string(kd.at("mode").get<std::string>());
      }
      if (kd.contains("kind")) {
        cfg.loss.kd_kind = kd_kind_from_string(kd.at("kind").get<std::string>());
      }
      cfg.loss.lambda = kd.value("lambda", cfg.loss.lambda);
      cfg.loss.temperature = kd.value("temperature", cfg.loss.temperature);
    }
    if (j.contains("placebo")) {
      const json& p = j.at("placebo");
      cfg.placebo.u_cap = p.value("u_cap", cfg.placebo.u_cap);
      cfg.placebo.p_cap = p.value("p_cap", cfg.placebo.p_cap);
      cfg.placebo.per_class_k = p.value("per_class_k", cfg.placebo.per_class_k);
      if (p.contains("selection")) {
        cfg.placebo.selection =
            selection_from_string(p.at("selection").get<std::string>());
      }
      if (p.contains("objective")) {
        const std::string obj = p.at("objective").get<std::string>();
        if (obj == "lowest_score") {
          cfg.placebo.objective = ScoreObjective::kLowestScore;
        } else if (obj == "highest_score") {
          cfg.placebo.objective = ScoreObjective::kHighestScore;
        } else {
          throw ConfigError("placebo.objective: unknown value '" + obj + "'");
        }
      }
      cfg.placebo.live_rescore =
          p.value("live_rescore", cfg.placebo.live_rescore);
      cfg.placebo.log_selection =
          p.value("log_selection", cfg.placebo.log_selection);
    }
    if (j.contains("policy")) {
      const json& p = j.at("policy");
      cfg.policy.beta_grid = p.value("beta_grid", cfg.policy.beta_grid);
      cfg.policy.gamma_grid = p.value("gamma_grid", cfg.policy.gamma_grid);
      cfg.policy.xi = p.value("xi", cfg.policy.xi);
      cfg.policy.exploration_floor =
          p.value("exploration_floor", cfg.policy.exploration_floor);
      cfg.policy.online = p.value("online", cfg.policy.online);
      if (p.contains("fixed_action")) {
        const json& a = p.at("fixed_action");
        cfg.policy.fixed_action = {a.at(0).get<double>(),
                                   a.at(1).get<double>()};
      }
    }
    if (j.contains("training")) {
      const json& t = j.at("training");
      TrainingConfig& tr = cfg.training;
      tr.epochs_policy = t.value("epochs_policy", tr.epochs_policy);
      tr.epochs_main = t.value("epochs_main", tr.epochs_main);
      tr.policy_iters = t.value("policy_iters", tr.policy_iters);
      tr.lookahead = t.value("lookahead", tr.lookahead);
      tr.batch_new = t.value("batch_new", tr.batch_new);
      tr.batch_exemplar = t.value("batch_exemplar", tr.batch_exemplar);
      tr.batch_placebo = t.value("batch_placebo", tr.batch_placebo);
      tr.local_subset = t.value("local_subset", tr.local_subset);
      tr.audit_every_iteration =
          t.value("audit_every_iteration", tr.audit_every_iteration);
      tr.normalize_reward = t.value("normalize_reward", tr.normalize_reward);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  cfg.optimizer.epochs = cfg.training.epochs_main;
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file: " + path);
  }
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config " + path + ": " + e.what());
  }
  return from_json(j);
}

std::vector<std::string> ExperimentConfig::diagnostics() const {
  std::vector<std::string> out;
  auto check = [&out](bool ok, const std::string& message) {
    if (!ok) {
      out.push_back(message);
    }
  };

  try {
    schedule().validate();
  } catch (const Error& e) {
    out.push_back(std::string("schedule.class_counts: ") + e.what());
  }
  if (task.kind == TaskConfig::Kind::kSynthetic) {
    try {
      task.synthetic.validate();
    } catch (const Error& e) {
      out.push_back(e.what());
    }
    if (!class_counts.empty() &&
        task.synthetic.classes != class_counts.back()) {
      out.push_back("task.classes: must equal the last schedule count (" +
                    std::to_string(class_counts.back()) + ")");
    }
  } else {
    check(!task.train_path.empty(), "task.train: path required");
    check(!task.test_path.empty(), "task.test: path required");
  }
  check(!hidden.empty(), "model.hidden: at least one hidden layer required");
  for (int h : hidden) {
    check(h >= 1, "model.hidden: dims must be >= 1");
  }
  try {
    OptimizerConfig opt = optimizer;
    opt.epochs = training.epochs_main;
    opt.validate();
  } catch (const Error& e) {
    out.push_back(e.what());
  }
  check(exemplar_cap >= 1, "exemplars.per_class: must be >= 1");
  check(loss.lambda >= 0.0, "kd.lambda: must be non-negative");
  check(loss.temperature > 0.0, "kd.temperature: must be positive");
  check(placebo.u_cap >= 0, "placebo.u_cap: must be >= 0");
  check(placebo.p_cap >= 0, "placebo.p_cap: must be >= 0");
  check(placebo.per_class_k >= 0, "placebo.per_class_k: must be >= 0");
  check(training.epochs_policy >= 1, "training.epochs_policy: must be >= 1");
  check(training.epochs_main >= 1, "training.epochs_main: must be >= 1");
  check(training.epochs_policy <= training.epochs_main,
        "training.epochs_policy: policy probes must not exceed epochs_main");
  check(training.policy_iters >= 0, "training.policy_iters: must be >= 0");
  check(training.lookahead >= 0, "training.lookahead: must be >= 0");
  check(training.batch_new >= 1 && training.batch_exemplar >= 1 &&
            training.batch_placebo >= 1,
        "training.batch_*: batch sizes must be >= 1");
  check(training.local_subset >= 0, "training.local_subset: must be >= 0");
  check(policy.xi > 0.0, "policy.xi: must be positive");
  check(policy.exploration_floor >= 0.0 && policy.exploration_floor < 1.0,
        "policy.exploration_floor: must lie in [0, 1)");
  check(policy.fixed_action.beta >= 0.0 && policy.fixed_action.gamma >= 0.0,
        "policy.fixed_action: beta and gamma must be non-negative");
  try {
    action_space();
  } catch (const Error& e) {
    out.push_back(std::string("policy grids: ") + e.what());
  }

  if (kd_mode == KdMode::kPlacebo && class_counts.size() > 1) {
    const int max_old = class_counts[class_counts.size() - 2];
    check(placebo.u_cap >= 1, "placebo.u_cap: placebo mode needs candidates");
    check(placebo.p_cap >= 1, "placebo.p_cap: placebo mode needs a buffer");
    const int k = placebo.per_class_k > 0
                      ? placebo.per_class_k
                      : std::max(1, placebo.p_cap / std::max(1, max_old));
    check(static_cast<long long>(max_old) * k <= placebo.p_cap,
          "placebo.p_cap: too small for " + std::to_string(max_old) +
              " old classes (K=" + std::to_string(k) + ")");
    check(static_cast<long long>(max_old) * k <= placebo.u_cap,
          "placebo.u_cap: too small for " + std::to_string(max_old) +
              " old classes (K=" + std::to_string(k) + ")");
  }
  if (task.kind == TaskConfig::Kind::kSynthetic && class_counts.size() > 1 &&
      placebo.u_cap + placebo.p_cap > 0) {
    // smallest phase must survive the strict-budget removal
    int min_phase_classes = class_counts[0];
    for (std::size_t i = 1; i < class_counts.size(); ++i) {
      min_phase_classes = std::min(min_phase_classes,
                                   class_counts[i] - class_counts[i - 1]);
    }
    const long long phase_samples =
        static_cast<long long>(min_phase_classes) *
        task.synthetic.train_per_class;
    check(phase_samples > placebo.u_cap + placebo.p_cap,
          "placebo.u_cap/p_cap: removal of " +
              std::to_string(placebo.u_cap + placebo.p_cap) +
              " samples would exhaust a phase of " +
              std::to_string(phase_samples) + " new samples");
  }
  return out;
}

void ExperimentConfig::validate_or_throw() const {
  const std::vector<std::string> problems = diagnostics();
  if (!problems.empty()) {
    std::string joined;
    for (const std::string& p : problems) {
      joined += (joined.empty() ? "" : "\n") + p;
    }
    throw ConfigError(joined);
  }
}

}  // namespace placebocil
