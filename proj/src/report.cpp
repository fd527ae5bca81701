#include "placebocil/report.hpp"

#include <cstdio>
#include <filesystem>

#include "placebocil/errors.hpp"

namespace placebocil {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

}  // namespace

std::string phases_csv(const RunReport& report) {
  std::string out =
      "phase,classes,n_old,n_new,acc_overall,acc_old,acc_new,beta,gamma,"
      "audit_checks,audit_failures\n";
  for (const PhaseReport& p : report.phases) {
    out += std::to_string(p.phase) + "," + std::to_string(p.classes) + "," +
           std::to_string(p.n_old) + "," + std::to_string(p.n_new) + "," +
           fmt(p.acc_overall) + "," + fmt(p.acc_old) + "," + fmt(p.acc_new) +
           ",";
    if (p.has_action) {
      out += fmt(p.action.beta) + "," + fmt(p.action.gamma);
    } else {
      out += ",";
    }
    out += "," + std::to_string(p.audit_checks) + "," +
           std::to_string(p.audit_failures) + "\n";
  }
  return out;
}

std::string policy_trace_csv(const RunTraces& traces) {
  std::string out = "phase,iter,beta,gamma,p_action,R,R_norm\n";
  for (const PolicyTraceRow& r : traces.policy) {
    out += std::to_string(r.phase) + "," + std::to_string(r.iter) + "," +
           fmt(r.beta) + "," + fmt(r.gamma) + "," + fmt(r.p_action) + "," +
           fmt(r.reward) + "," + fmt(r.reward_norm) + "\n";
  }
  return out;
}

std::string policy_weights_csv(const RunTraces& traces) {
  std::string out = "phase,beta,gamma,weight\n";
  for (const PolicyWeightRow& r : traces.weights) {
    out += std::to_string(r.phase) + "," + fmt(r.beta) + "," + fmt(r.gamma) +
           "," + fmt(r.weight) + "\n";
  }
  return out;
}

std::string budget_audit_csv(const RunTraces& traces) {
  std::string out =
      "phase,iteration,new_data,exemplars,candidates,placebos,budget,ok\n";
  for (const AuditRow& r : traces.audit) {
    out += std::to_string(r.phase) + "," + std::to_string(r.iteration) + "," +
           std::to_string(r.counts.new_data) + "," +
           std::to_string(r.counts.exemplars) + "," +
           std::to_string(r.counts.candidates) + "," +
           std::to_string(r.counts.placebos) + "," +
           std::to_string(r.budget) + "," + (r.ok ? "1" : "0") + "\n";
  }
  return out;
}

std::string placebo_log_csv(const RunTraces& traces) {
  std::string out = "phase,refill_index,class,candidate_id,score\n";
  for (const PlaceboLogRow& r : traces.placebo) {
    out += std::to_string(r.phase) + "," + std::to_string(r.refill_index) +
           "," + std::to_string(r.class_id) + "," +
           std::to_string(r.candidate_id) + "," + fmt(r.score) + "\n";
  }
  return out;
}

nlohmann::json report_json(const RunReport& report, bool include_timing) {
  nlohmann::json j;
  j["seed"] = report.seed;
  j["complete"] = report.complete;
  if (!report.error.empty()) {
    j["error"] = report.error;
  }
  j["average"] = report.average;
  j["last"] = report.last;
  if (include_timing) {
    j["wall_clock_sec"] = report.wall_clock_sec;
  }
  j["phases"] = nlohmann::json::array();
  for (const PhaseReport& p : report.phases) {
    nlohmann::json jp;
    jp["phase"] = p.phase;
    jp["classes"] = p.classes;
    jp["n_old"] = p.n_old;
    jp["n_new"] = p.n_new;
    jp["acc_overall"] = p.acc_overall;
    jp["acc_old"] = p.acc_old;
    jp["acc_new"] = p.acc_new;
    if (p.has_action) {
      jp["action"] = {p.action.beta, p.action.gamma};
    }
    jp["audit_checks"] = p.audit_checks;
    jp["audit_failures"] = p.audit_failures;
    if (include_timing) {
      jp["wall_clock_sec"] = p.wall_clock_sec;
    }
    j["phases"].push_back(std::move(jp));
  }
  j["placebos"] = {{"refilled", report.traces.placebos_refilled},
                   {"consumed", report.traces.placebos_consumed},
                   {"leftover", report.traces.placebos_leftover}};
  j["config"] = report.config_echo;
  return j;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  std::FILE* f = std::fopen(tmp.c_str(), "wb");
  if (!f) {
    throw Error("cannot open for writing: " + tmp);
  }
  if (!content.empty() &&
      std::fwrite(content.data(), 1, content.size(), f) != content.size()) {
    std::fclose(f);
    throw Error("short write: " + tmp);
  }
  std::fclose(f);
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    throw Error("cannot rename " + tmp + " to " + path + ": " + ec.message());
  }
}

void write_report_files(const RunReport& report, const std::string& out_dir,
                        bool placebo_log) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const fs::path dir(out_dir);
  write_file_atomic((dir / "run_report.json").string(),
                    report_json(report).dump(2) + "\n");
  write_file_atomic((dir / "phases.csv").string(), phases_csv(report));
  write_file_atomic((dir / "policy_trace.csv").string(),
                    policy_trace_csv(report.traces));
  write_file_atomic((dir / "policy_weights.csv").string(),
                    policy_weights_csv(report.traces));
  write_file_atomic((dir / "budget_audit.csv").string(),
                    budget_audit_csv(report.traces));
  if (placebo_log) {
    write_file_atomic((dir / "placebo_log.csv").string(),
                      placebo_log_csv(report.traces));
  }
}

}  // namespace placebocil
