#include "placebocil/optimizer.hpp"

#include "placebocil/errors.hpp"

namespace placebocil {

void OptimizerConfig::validate() const {
  if (learning_rate <= 0.0) {
    throw ConfigError("optimizer.learning_rate must be positive");
  }
  if (momentum < 0.0 || momentum >= 1.0) {
    throw ConfigError("optimizer.momentum must lie in [0, 1)");
  }
  if (epochs < 1) {
    throw ConfigError("optimizer.epochs must be >= 1");
  }
  int prev = -1;
  for (const LrMilestone& m : schedule) {
    if (m.epoch <= prev) {
      throw ConfigError("optimizer.schedule epochs must be strictly increasing");
    }
    if (m.epoch >= epochs) {
      throw ConfigError("optimizer.schedule epoch " + std::to_string(m.epoch) +
                        " not below epochs " + std::to_string(epochs));
    }
    if (m.divide_by <= 0.0) {
      throw ConfigError("optimizer.schedule divide_by must be positive");
    }
    prev = m.epoch;
  }
}

double effective_lr(const OptimizerConfig& cfg, int epoch) {
  double lr = cfg.learning_rate;
  for (const LrMilestone& m : cfg.schedule) {
    if (m.epoch <= epoch) {
      lr /= m.divide_by;
    }
  }
  return lr;
}

SgdState SgdState::zeros_like(const Model& model) {
  SgdState state;
  state.vel_weight.reserve(model.layers.size());
  state.vel_bias.reserve(model.layers.size());
  for (const Layer& layer : model.layers) {
    state.vel_weight.push_back(
        Eigen::MatrixXd::Zero(layer.weight.rows(), layer.weight.cols()));
    state.vel_bias.push_back(Eigen::VectorXd::Zero(layer.bias.size()));
  }
  return state;
}

void sgd_step(Model& model, const Gradients& grads, SgdState& state,
              const OptimizerConfig& cfg, int epoch) {
  if (grads.dweight.size() != model.layers.size() ||
      state.vel_weight.size() != model.layers.size()) {
    throw ShapeError("sgd_step: gradient/state layer count mismatch");
  }
  const double lr = effective_lr(cfg, epoch);
  for (std::size_t k = 0; k < model.layers.size(); ++k) {
    state.vel_weight[k] = cfg.momentum * state.vel_weight[k] + grads.dweight[k];
    state.vel_bias[k] = cfg.momentum * state.vel_bias[k] + grads.dbias[k];
    model.layers[k].weight -= lr * state.vel_weight[k];
    model.layers[k].bias -= lr * state.vel_bias[k];
  }
}

}  // namespace placebocil
