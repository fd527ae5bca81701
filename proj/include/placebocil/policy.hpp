#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "placebocil/placebo.hpp"

namespace placebocil {

// Discretised (beta, gamma) grid the policy chooses from.
struct ActionSpace {
  std::vector<Action> actions;

  static ActionSpace grid(const std::vector<double>& betas,
                          const std::vector<double>& gammas);

  int size() const { return static_cast<int>(actions.size()); }
  void validate() const;  // nonempty, no duplicates
};

// Exp3 weights plus the sampling parameters. With exploration_floor 0 the
// induced distribution is the plain weight normalisation w / ||w||_1.
struct PolicyState {
  std::vector<double> weights;
  double xi = 0.3;
  double exploration_floor = 0.05;

  static PolicyState uniform(int actions, double xi, double floor);
  void validate() const;
};

// p(a) = (1 - floor) * w(a) / sum(w) + floor / |A|
std::vector<double> policy_distribution(const PolicyState& state);

// Draws an action index and returns the probability it was drawn with.
std::pair<int, double> sample_action(const PolicyState& state,
                                     std::mt19937_64& eng);

// Sum of the per-virtual-phase accuracies; each entry must lie in [0, 1].
double decoupled_reward(const std::vector<double>& rollout);

// w(a) <- w(a) * exp(xi * (reward / horizon) / probability); weights are
// divided by their maximum whenever one would exceed ~1e100, which leaves
// the induced distribution unchanged.
void exp3_update(PolicyState& state, int action_index, double reward,
                 double probability, int horizon = 1);

struct BanditSpec {
  std::vector<double> arm_means;
  int rounds = 500;
  double xi = 0.2;
  double exploration_floor = 0.05;
  bool bernoulli = false;  // false: deterministic mean reward
};

struct BanditRound {
  int round = 0;
  int arm = 0;
  double reward = 0.0;
  double best_arm_prob = 0.0;  // mass on the best arm after the update
};

struct BanditResult {
  std::vector<BanditRound> rounds;
  PolicyState final_state;
};

// Sample -> reward -> update loop over a stationary bandit; validates the
// Exp3 core in isolation.
BanditResult regret_harness(const BanditSpec& spec, std::uint64_t seed);

}  // namespace placebocil
