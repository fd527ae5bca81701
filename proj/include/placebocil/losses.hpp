#pragma once

#include <Eigen/Dense>
#include <vector>

#include "placebocil/model.hpp"

namespace placebocil {

enum class KdKind { kLogitKl, kCosineEmbedding };

struct LossConfig {
  double lambda = 1.0;               // KD weight in the overall loss
  KdKind kd_kind = KdKind::kLogitKl;
  double temperature = 2.0;          // logit-KL only
};

// Per-parameter gradients, shaped like the model they were computed for.
struct Gradients {
  std::vector<Eigen::MatrixXd> dweight;
  std::vector<Eigen::VectorXd> dbias;

  static Gradients zeros_like(const Model& model);
  void add_scaled(const Gradients& other, double factor);
  bool all_zero() const;
};

struct LossResult {
  double loss = 0.0;
  Gradients grads;
};

// Row-wise stabilised softmax; every row sums to 1.
Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& logits);

// Mean softmax cross-entropy with exact analytic gradients. Labels are
// 1-based class ids; an id outside [1, class_count] raises DomainError.
LossResult ce_loss_grad(const Model& model, const Eigen::MatrixXd& batch,
                        const std::vector<int>& labels);

// Distillation loss between a frozen teacher and the student; gradients
// flow to the student only. logit-KL compares softened teacher logits with
// the first teacher-class-count student logits; cosine-embedding compares
// extractor features. An empty batch yields loss 0 with zero gradients.
LossResult kd_loss_grad(const Model& teacher, const Model& student,
                        const Eigen::MatrixXd& batch, const LossConfig& cfg);

// Backprop a logit-space gradient (n x class_count) through every layer.
Gradients backprop_from_logits(const Model& model, const ForwardTrace& trace,
                               const Eigen::MatrixXd& dlogits);

// Backprop a feature-space gradient through the extractor only.
Gradients backprop_from_features(const Model& model, const ForwardTrace& trace,
                                 const Eigen::MatrixXd& dfeatures);

// Predicted 1-based class ids (argmax logits, lowest index on ties).
std::vector<int> predict(const Model& model, const Eigen::MatrixXd& batch);

}  // namespace placebocil
