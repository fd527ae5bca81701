#pragma once

#include <Eigen/Dense>
#include <vector>

#include "placebocil/losses.hpp"
#include "placebocil/model.hpp"

namespace placebocil {

struct LrMilestone {
  int epoch = 0;          // first epoch the division applies to
  double divide_by = 10;  // factor the base rate is divided by
};

struct OptimizerConfig {
  double learning_rate = 0.05;
  double momentum = 0.9;                 // in [0, 1)
  std::vector<LrMilestone> schedule;     // strictly increasing epochs < epochs
  int epochs = 20;

  void validate() const;
};

// Base rate divided by every milestone factor whose epoch is <= epoch.
double effective_lr(const OptimizerConfig& cfg, int epoch);

// Momentum buffers, shaped like the model being trained.
struct SgdState {
  std::vector<Eigen::MatrixXd> vel_weight;
  std::vector<Eigen::VectorXd> vel_bias;

  static SgdState zeros_like(const Model& model);
};

// v <- momentum * v + g;  p <- p - lr(epoch) * v
void sgd_step(Model& model, const Gradients& grads, SgdState& state,
              const OptimizerConfig& cfg, int epoch);

}  // namespace placebocil
