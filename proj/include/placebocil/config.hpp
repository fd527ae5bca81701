#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "placebocil/data.hpp"
#include "placebocil/exemplars.hpp"
#include "placebocil/losses.hpp"
#include "placebocil/optimizer.hpp"
#include "placebocil/placebo.hpp"
#include "placebocil/policy.hpp"

namespace placebocil {

// What the KD term is computed on: selected placebos, the new-class batch
// (the conventional substitute), held-out true old data (upper bound), or
// nothing.
enum class KdMode { kPlacebo, kNewData, kOldDataOracle, kNone };

// How placebos are picked from the candidate batch.
enum class SelectionStrategy { kScored, kRandom, kConfidence };

struct TaskConfig {
  enum class Kind { kSynthetic, kFiles };
  Kind kind = Kind::kSynthetic;
  SyntheticTaskSpec synthetic;
  std::string train_path;
  std::string test_path;
  std::string stream_path;
};

struct PolicyConfig {
  std::vector<double> beta_grid = {0.0, 0.5, 1.0, 1.5, 2.0};
  std::vector<double> gamma_grid = {0.0, 0.5, 1.0, 1.5, 2.0};
  double xi = 0.3;
  double exploration_floor = 0.05;
  bool online = true;
  Action fixed_action = {1.0, 1.0};
};

struct PlaceboConfig {
  int u_cap = 1000;
  int p_cap = 200;
  int per_class_k = 0;  // 0: max(1, p_cap / old-class count)
  SelectionStrategy selection = SelectionStrategy::kScored;
  ScoreObjective objective = ScoreObjective::kLowestScore;
  bool live_rescore = false;   // rescore with the training model per refill
  bool log_selection = false;  // emit placebo_log.csv rows
};

struct TrainingConfig {
  int epochs_policy = 5;   // M1, virtual-phase probes
  int epochs_main = 20;    // M2, the real phase
  int policy_iters = 8;    // T
  int lookahead = 1;       // n future virtual phases
  int batch_new = 16;
  int batch_exemplar = 8;
  int batch_placebo = 8;
  int local_subset = 0;  // holdout per class for h_i; 0: min(5, min count - 1)
  bool audit_every_iteration = true;
  bool normalize_reward = true;  // divide R by n+1 before the Exp3 update
};

struct ExperimentConfig {
  std::uint64_t seed = 1;
  TaskConfig task;
  std::vector<int> class_counts = {2, 4, 6, 8, 10};
  std::vector<int> hidden = {32, 16};
  OptimizerConfig optimizer;
  int exemplar_cap = 5;
  ExemplarStrategy exemplar_strategy = ExemplarStrategy::kHerding;
  KdMode kd_mode = KdMode::kPlacebo;
  LossConfig loss;
  PlaceboConfig placebo;
  PolicyConfig policy;
  TrainingConfig training;

  PhaseSchedule schedule() const { return PhaseSchedule{class_counts}; }
  ActionSpace action_space() const {
    return ActionSpace::grid(policy.beta_grid, policy.gamma_grid);
  }

  static ExperimentConfig defaults();

  nlohmann::json to_json() const;
  static ExperimentConfig from_json(const nlohmann::json& j);
  static ExperimentConfig load(const std::string& path);

  // One "field: message" line per problem; empty means valid.
  std::vector<std::string> diagnostics() const;
  void validate_or_throw() const;
};

std::string to_string(KdMode mode);
std::string to_string(SelectionStrategy strategy);
KdMode kd_mode_from_string(const std::string& s);
SelectionStrategy selection_from_string(const std::string& s);

}  // namespace placebocil
