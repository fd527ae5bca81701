#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "placebocil/exemplars.hpp"
#include "placebocil/placebo.hpp"

namespace placebocil {

struct PhaseReport {
  int phase = 0;
  int classes = 0;
  int n_old = 0;
  int n_new = 0;
  double acc_overall = 0.0;
  double acc_old = 0.0;
  double acc_new = 0.0;
  bool has_action = false;
  Action action;
  long long audit_checks = 0;
  long long audit_failures = 0;
  double wall_clock_sec = 0.0;  // excluded from phases.csv and comparisons
};

struct PolicyTraceRow {
  int phase = 0;
  int iter = 0;
  double beta = 0.0;
  double gamma = 0.0;
  double p_action = 0.0;
  double reward = 0.0;
  double reward_norm = 0.0;
};

struct PolicyWeightRow {
  int phase = 0;
  double beta = 0.0;
  double gamma = 0.0;
  double weight = 0.0;
};

struct PlaceboLogRow {
  int phase = 0;
  int refill_index = 0;
  int class_id = 0;
  long long candidate_id = 0;
  double score = 0.0;
};

struct RunTraces {
  std::vector<AuditRow> audit;
  std::vector<PolicyTraceRow> policy;
  std::vector<PolicyWeightRow> weights;
  std::vector<PlaceboLogRow> placebo;
  long long placebos_refilled = 0;
  long long placebos_consumed = 0;
  long long placebos_leftover = 0;
};

struct RunReport {
  std::vector<PhaseReport> phases;
  double average = 0.0;  // mean of per-phase overall accuracies
  double last = 0.0;     // final-phase overall accuracy
  bool complete = false;
  std::string error;
  std::uint64_t seed = 0;
  nlohmann::json config_echo;
  RunTraces traces;
  double wall_clock_sec = 0.0;
};

// CSV payloads (header + rows); deterministic for a fixed report.
std::string phases_csv(const RunReport& report);
std::string policy_trace_csv(const RunTraces& traces);
std::string policy_weights_csv(const RunTraces& traces);
std::string budget_audit_csv(const RunTraces& traces);
std::string placebo_log_csv(const RunTraces& traces);

// Full report; timing fields included only when include_timing.
nlohmann::json report_json(const RunReport& report, bool include_timing = true);

// Writes via a temp file and rename so interrupted runs never leave
// truncated reports behind.
void write_file_atomic(const std::string& path, const std::string& content);

// Writes run_report.json, phases.csv and the trace CSVs into out_dir.
void write_report_files(const RunReport& report, const std::string& out_dir,
                        bool placebo_log);

}  // namespace placebocil
