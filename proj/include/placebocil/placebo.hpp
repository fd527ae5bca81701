#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <vector>

#include "placebocil/data.hpp"
#include "placebocil/exemplars.hpp"
#include "placebocil/model.hpp"

namespace placebocil {

// The (beta, gamma) hyperparameter pair the policy picks each phase.
struct Action {
  double beta = 1.0;
  double gamma = 1.0;

  bool operator==(const Action& other) const {
    return beta == other.beta && gamma == other.gamma;
  }
};

// Mean extractor features per class under one frozen model snapshot. Old
// prototypes come from exemplars, new prototypes from new-class data.
struct PrototypeSet {
  std::map<int, Eigen::VectorXd> old_prototypes;
  std::map<int, Eigen::VectorXd> new_prototypes;
  std::uint64_t snapshot_tag = 0;

  int old_class_count() const {
    return static_cast<int>(old_prototypes.size());
  }
};

PrototypeSet compute_prototypes(
    const Model& snapshot,
    const std::map<int, std::vector<Sample>>& old_per_class,
    const std::map<int, std::vector<Sample>>& new_per_class);

// Cosine similarity; 0 when either vector has (near-)zero norm.
double cosine_sim(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

// Placebo-quality score for old class m:
//   S_m(x) = -Sim(F(x), Pro(E_m))
//            + beta  * mean_{n != m} Sim(F(x), Pro(E_n))
//            + gamma * mean_l        Sim(F(x), Pro(D_l))
// Either mean over an empty set is 0. Low scores mark good placebos.
double evaluate(const Sample& sample, int m, const PrototypeSet& prototypes,
                const Action& action, const Model& snapshot);

struct PlaceboEntry {
  Sample sample;
  int source_class = 0;  // old class the entry was selected for (0: baseline)
};

struct PlaceboBuffer {
  std::deque<PlaceboEntry> entries;
  int capacity = 0;

  bool empty() const { return entries.empty(); }
  int size() const { return static_cast<int>(entries.size()); }
};

// Whether selection favours the lowest or the highest S_m. The evaluation
// function is built so good placebos score low; the flipped direction is
// kept for ablation.
enum class ScoreObjective { kLowestScore, kHighestScore };

// For each old class in ascending id, picks the k best-scoring candidates
// without replacement across classes; ties break on ascending candidate id.
// Requires |candidates| >= old_class_count * k.
PlaceboBuffer refill_placebos(const std::vector<Sample>& candidates,
                              const PrototypeSet& prototypes,
                              const Action& action, int k,
                              const Model& snapshot,
                              ScoreObjective objective = ScoreObjective::kLowestScore);

// Returns up to batch_size entries in stored order and removes them.
std::vector<PlaceboEntry> consume(PlaceboBuffer& buffer, int batch_size);

enum class BaselineMode { kRandom, kConfidence };

// Comparator selectors: uniform without replacement, or top-count by the
// snapshot's max softmax probability.
PlaceboBuffer baseline_select(const std::vector<Sample>& candidates,
                              BaselineMode mode, const Model& snapshot,
                              int count, std::uint64_t seed);

}  // namespace placebocil
