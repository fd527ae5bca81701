#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "placebocil/data.hpp"
#include "placebocil/model.hpp"

namespace placebocil {

enum class ExemplarStrategy { kHerding, kRandom };

// Per-class replay exemplars; at most per_class_cap entries per class.
struct ExemplarStore {
  std::map<int, std::vector<Sample>> per_class;
  int per_class_cap = 20;

  long long total() const;
  bool empty() const { return per_class.empty(); }
  Dataset as_dataset() const;  // classes in ascending id order
  void set_class(int class_id, std::vector<Sample> exemplars);
};

// Herding greedily keeps the running feature mean of the selection as close
// as possible to the class mean under the given model's extractor; random
// draws uniformly without replacement. Returns min(cap, |class_data|) items.
std::vector<Sample> select_exemplars(const Model& model,
                                     const Dataset& class_data, int cap,
                                     ExemplarStrategy strategy,
                                     std::uint64_t seed);

struct BudgetCounts {
  long long new_data = 0;
  long long exemplars = 0;
  long long candidates = 0;
  long long placebos = 0;

  long long total() const {
    return new_data + exemplars + candidates + placebos;
  }
};

struct AuditResult {
  bool ok = true;
  std::string category;  // violated category when !ok
};

// Strict-budget ledger: everything held at once must fit in what the
// no-placebo baseline would hold this phase. apply_strict_budget seeds
// base_budget with the pre-removal new-data size; the orchestrator adds the
// exemplar count it carries into the phase.
struct BudgetLedger {
  long long base_budget = 0;
  long long u_cap = 0;
  long long p_cap = 0;
  std::vector<long long> removed_ids;
};

struct AuditRow {
  int phase = 0;
  long long iteration = 0;
  BudgetCounts counts;
  long long budget = 0;
  bool ok = true;
};

// Removes exactly u_cap + p_cap samples uniformly at random, once per phase.
std::pair<Dataset, BudgetLedger> apply_strict_budget(const Dataset& new_data,
                                                     int u_cap, int p_cap,
                                                     std::uint64_t seed);

// Fails iff a category cap or the total budget is exceeded.
AuditResult audit(const BudgetLedger& ledger, const BudgetCounts& counts);

}  // namespace placebocil
