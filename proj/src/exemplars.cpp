#include "placebocil/exemplars.hpp"

#include <algorithm>
#include <numeric>

#include "placebocil/errors.hpp"
#include "placebocil/rng.hpp"

namespace placebocil {

long long ExemplarStore::total() const {
  long long n = 0;
  for (const auto& [class_id, exemplars] : per_class) {
    n += static_cast<long long>(exemplars.size());
  }
  return n;
}

Dataset ExemplarStore::as_dataset() const {
  Dataset out;
  for (const auto& [class_id, exemplars] : per_class) {
    out.samples.insert(out.samples.end(), exemplars.begin(), exemplars.end());
  }
  return out;
}

void ExemplarStore::set_class(int class_id, std::vector<Sample> exemplars) {
  if (static_cast<int>(exemplars.size()) > per_class_cap) {
    throw BudgetError("exemplar store: class " + std::to_string(class_id) +
                      " exceeds per-class cap " +
                      std::to_string(per_class_cap));
  }
  per_class[class_id] = std::move(exemplars);
}

std::vector<Sample> select_exemplars(const Model& model,
                                     const Dataset& class_data, int cap,
                                     ExemplarStrategy strategy,
                                     std::uint64_t seed) {
  if (class_data.empty()) {
    throw ConfigError("select_exemplars: class data is empty");
  }
  for (const Sample& s : class_data.samples) {
    if (s.label != class_data.samples.front().label) {
      throw ConfigError("select_exemplars: class data mixes labels");
    }
  }
  const std::size_t n = class_data.size();
  const std::size_t keep = std::min<std::size_t>(cap, n);

  // Candidates in ascending id order so ties resolve deterministically.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return class_data.samples[a].id < class_data.samples[b].id;
  });

  if (strategy == ExemplarStrategy::kRandom) {
    std::mt19937_64 eng(seed);
    std::shuffle(order.begin(), order.end(), eng);
    std::vector<Sample> out;
    for (std::size_t i = 0; i < keep; ++i) {
      out.push_back(class_data.samples[order[i]]);
    }
    return out;
  }

  Eigen::MatrixXd features = extract_features(model, class_data.feature_matrix());
  Eigen::VectorXd class_mean = features.colwise().mean().transpose();

  std::vector<char> taken(n, 0);
  Eigen::VectorXd running_sum = Eigen::VectorXd::Zero(features.cols());
  std::vector<Sample> out;
  out.reserve(keep);
  for (std::size_t step = 0; step < keep; ++step) {
    double best_dist = std::numeric_limits<double>::infinity();
    std::size_t best = n;
    for (std::size_t idx : order) {
      if (taken[idx]) {
        continue;
      }
      Eigen::VectorXd mean_if =
          (running_sum + features.row(idx).transpose()) /
          static_cast<double>(step + 1);
      const double dist = (mean_if - class_mean).norm();
      if (dist < best_dist) {
        best_dist = dist;
        best = idx;
      }
    }
    taken[best] = 1;
    running_sum += features.row(best).transpose();
    out.push_back(class_data.samples[best]);
  }
  return out;
}

std::pair<Dataset, BudgetLedger> apply_strict_budget(const Dataset& new_data,
                                                     int u_cap, int p_cap,
                                                     std::uint64_t seed) {
  if (u_cap < 0 || p_cap < 0) {
    throw ConfigError("apply_strict_budget: caps must be non-negative");
  }
  const long long remove = static_cast<long long>(u_cap) + p_cap;
  BudgetLedger ledger;
  ledger.base_budget = static_cast<long long>(new_data.size());
  ledger.u_cap = u_cap;
  ledger.p_cap = p_cap;
  if (remove == 0) {
    return {new_data, ledger};
  }
  if (static_cast<long long>(new_data.size()) <= remove) {
    throw BudgetError("apply_strict_budget: cannot remove " +
                      std::to_string(remove) + " samples from " +
                      std::to_string(new_data.size()) +
                      " new-class samples; scale |U| and |P| down");
  }
  std::vector<std::size_t> order(new_data.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 eng(seed);
  std::shuffle(order.begin(), order.end(), eng);

  std::vector<char> removed(new_data.size(), 0);
  for (long long i = 0; i < remove; ++i) {
    removed[order[i]] = 1;
    ledger.removed_ids.push_back(new_data.samples[order[i]].id);
  }
  std::sort(ledger.removed_ids.begin(), ledger.removed_ids.end());

  Dataset reduced;
  reduced.samples.reserve(new_data.size() - remove);
  for (std::size_t i = 0; i < new_data.size(); ++i) {
    if (!removed[i]) {
      reduced.samples.push_back(new_data.samples[i]);
    }
  }
  return {std::move(reduced), ledger};
}

AuditResult audit(const BudgetLedger& ledger, const BudgetCounts& counts) {
  if (counts.candidates > ledger.u_cap) {
    return {false, "candidates"};
  }
  if (counts.placebos > ledger.p_cap) {
    return {false, "placebos"};
  }
  if (counts.total() > ledger.base_budget) {
    return {false, "total"};
  }
  return {true, ""};
}

}  // namespace placebocil
