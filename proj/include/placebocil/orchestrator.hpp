#pragma once

#include <functional>
#include <random>

#include "placebocil/config.hpp"
#include "placebocil/report.hpp"

namespace placebocil {

// Everything carried across phases.
struct EngineState {
  Model model;
  ExemplarStore store;
  PolicyState policy;
};

struct TrainStats {
  long long refilled = 0;
  long long consumed = 0;
  int refills = 0;
};

struct TrainResult {
  Model model;
  double reward = 0.0;  // accuracy on the environment's test set
  TrainStats stats;
};

// Per-phase mutable counters shared by the real training run and the policy
// probes inside one phase.
struct PhaseRuntime {
  long long step = 0;
  long long audit_checks = 0;
  long long audit_failures = 0;
};

struct TrainOptions {
  int epochs = 1;
  int phase = 0;
  int call_id = 0;         // 0: real phase training; >0: policy probes
  bool base_phase = false; // phase 0: no teacher, no KD, no old classes
  const Dataset* oracle_old = nullptr;      // old_data_oracle KD batches
  const BudgetLedger* ledger = nullptr;     // enables budget audits
  PhaseRuntime* runtime = nullptr;
  RunTraces* traces = nullptr;
};

// One execution of the training loop for a fixed action: initialise the
// student from old_model (head expanded to the environment's classes), build
// the evaluation functions from the action, keep the placebo buffer filled
// from the stream, and optimise CE(d+e) + lambda * KD(p+e) minibatch-wise.
// The reward is the trained model's accuracy on env.test.
TrainResult train_with_action(const Model& old_model, const Action& action,
                              const Environment& env,
                              const ExperimentConfig& cfg, KdMode kd_mode,
                              FreeStream* stream, const TrainOptions& options);

// Test-only seam: replaces the virtual-phase training with a synthetic
// reward for (action, virtual phase index).
using RewardOverride = std::function<double(const Action&, int)>;

// T iterations of: resample the class-balanced holdout, rebuild the local
// environment, sample an action, roll it forward n+1 chained virtual phases,
// and apply the Exp3 update. The real model is never touched.
void learn_policy_for_phase(PolicyState& policy, const Dataset& train_data,
                            const Model& teacher, const ActionSpace& space,
                            const ExperimentConfig& cfg, FreeStream* stream,
                            int phase, std::mt19937_64& policy_eng,
                            const BudgetLedger* ledger, PhaseRuntime* runtime,
                            RunTraces* traces,
                            const RewardOverride& override = {});

struct PhaseInputs {
  int phase = 0;
  const Dataset* new_data = nullptr;    // this phase's new-class samples
  const Dataset* test_pool = nullptr;   // full test set; filtered per phase
  const Dataset* oracle_old = nullptr;  // original data of earlier phases
  FreeStream* stream = nullptr;
};

PhaseReport run_phase(EngineState& state, const PhaseInputs& in,
                      const ExperimentConfig& cfg, std::mt19937_64& policy_eng,
                      RunTraces* traces);

RunReport run_experiment(const ExperimentConfig& cfg);

struct EvalSplit {
  double overall = 0.0;
  double old_acc = 0.0;
  double new_acc = 0.0;
  int n_old = 0;
  int n_new = 0;
};

// Accuracy decomposed at old_class_count; overall is the class-count-weighted
// mean of the two parts.
EvalSplit evaluate_split(const Model& model, const Dataset& test,
                         int old_class_count);

}  // namespace placebocil
