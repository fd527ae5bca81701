#include "placebocil/policy.hpp"

#include <algorithm>
#include <cmath>

#include "placebocil/errors.hpp"
#include "placebocil/rng.hpp"

namespace placebocil {

ActionSpace ActionSpace::grid(const std::vector<double>& betas,
                              const std::vector<double>& gammas) {
  ActionSpace space;
  for (double beta : betas) {
    for (double gamma : gammas) {
      space.actions.push_back({beta, gamma});
    }
  }
  space.validate();
  return space;
}

void ActionSpace::validate() const {
  if (actions.empty()) {
    throw ConfigError("action space must not be empty");
  }
  for (std::size_t i = 0; i < actions.size(); ++i) {
    if (actions[i].beta < 0.0 || actions[i].gamma < 0.0) {
      throw ConfigError("actions must have non-negative beta and gamma");
    }
    for (std::size_t j = i + 1; j < actions.size(); ++j) {
      if (actions[i] == actions[j]) {
        throw ConfigError("action space contains duplicate actions");
      }
    }
  }
}

PolicyState PolicyState::uniform(int actions, double xi, double floor) {
  PolicyState state;
  state.weights.assign(actions, 1.0);
  state.xi = xi;
  state.exploration_floor = floor;
  state.validate();
  return state;
}

void PolicyState::validate() const {
  if (weights.empty()) {
    throw ConfigError("policy weights must not be empty");
  }
  for (double w : weights) {
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw ConfigError("policy weights must be positive and finite");
    }
  }
  if (exploration_floor < 0.0 || exploration_floor >= 1.0) {
    throw ConfigError("exploration_floor must lie in [0, 1)");
  }
  if (xi <= 0.0) {
    throw ConfigError("xi must be positive");
  }
}

std::vector<double> policy_distribution(const PolicyState& state) {
  const std::size_t n = state.weights.size();
  double sum = 0.0;
  for (double w : state.weights) {
    sum += w;
  }
  std::vector<double> probs(n);
  const double floor = state.exploration_floor;
  for (std::size_t i = 0; i < n; ++i) {
    probs[i] = (1.0 - floor) * state.weights[i] / sum +
               floor / static_cast<double>(n);
  }
  return probs;
}

std::pair<int, double> sample_action(const PolicyState& state,
                                     std::mt19937_64& eng) {
  const std::vector<double> probs = policy_distribution(state);
  const double u = rng::uniform01(eng);
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    if (u < acc || i + 1 == probs.size()) {
      return {static_cast<int>(i), probs[i]};
    }
  }
  return {static_cast<int>(probs.size()) - 1, probs.back()};
}

double decoupled_reward(const std::vector<double>& rollout) {
  double total = 0.0;
  for (double r : rollout) {
    if (r < 0.0 || r > 1.0 || !std::isfinite(r)) {
      throw DomainError("decoupled_reward: accuracy " + std::to_string(r) +
                        " outside [0, 1]");
    }
    total += r;
  }
  return total;
}

void exp3_update(PolicyState& state, int action_index, double reward,
                 double probability, int horizon) {
  if (action_index < 0 ||
      action_index >= static_cast<int>(state.weights.size())) {
    throw DomainError("exp3_update: action index out of range");
  }
  if (!(probability > 0.0)) {
    throw DomainError("exp3_update: probability must be positive");
  }
  if (horizon < 1) {
    throw DomainError("exp3_update: horizon must be >= 1");
  }
  const double normalized = reward / static_cast<double>(horizon);
  const double exponent = state.xi * normalized / probability;
  if (exponent == 0.0) {
    return;  // exp(0) = 1: nothing changes
  }
  const double current = state.weights[action_index];
  const double log_new = std::log(current) + exponent;
  if (log_new <= 230.0) {
    state.weights[action_index] = current * std::exp(exponent);
    return;
  }
  // The updated weight would pass ~1e100: divide every weight by the new
  // maximum (a log shift), which leaves the induced distribution unchanged.
  // An underflow clamp keeps the smallest weights strictly positive.
  const std::size_t n = state.weights.size();
  std::vector<double> logw(n);
  for (std::size_t i = 0; i < n; ++i) {
    logw[i] = std::log(state.weights[i]);
  }
  logw[action_index] = log_new;
  const double max_log = *std::max_element(logw.begin(), logw.end());
  for (std::size_t i = 0; i < n; ++i) {
    state.weights[i] = std::exp(std::max(logw[i] - max_log, -700.0));
  }
}

BanditResult regret_harness(const BanditSpec& spec, std::uint64_t seed) {
  if (spec.arm_means.empty()) {
    throw ConfigError("regret_harness: need at least one arm");
  }
  for (double mean : spec.arm_means) {
    if (mean < 0.0 || mean > 1.0) {
      throw ConfigError("regret_harness: arm rewards must lie in [0, 1]");
    }
  }
  if (spec.rounds < 0) {
    throw ConfigError("regret_harness: rounds must be >= 0");
  }
  const int best_arm = static_cast<int>(
      std::max_element(spec.arm_means.begin(), spec.arm_means.end()) -
      spec.arm_means.begin());

  BanditResult result;
  result.final_state = PolicyState::uniform(
      static_cast<int>(spec.arm_means.size()), spec.xi, spec.exploration_floor);
  std::mt19937_64 eng(seed);
  for (int t = 0; t < spec.rounds; ++t) {
    auto [arm, prob] = sample_action(result.final_state, eng);
    double reward = spec.arm_means[arm];
    if (spec.bernoulli) {
      reward = rng::uniform01(eng) < reward ? 1.0 : 0.0;
    }
    exp3_update(result.final_state, arm, reward, prob, 1);
    const std::vector<double> probs = policy_distribution(result.final_state);
    result.rounds.push_back({t, arm, reward, probs[best_arm]});
  }
  return result;
}

}  // namespace placebocil
