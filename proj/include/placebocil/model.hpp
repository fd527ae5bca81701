#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace placebocil {

enum class Activation { kIdentity, kRelu };

struct Layer {
  Eigen::MatrixXd weight;  // out x in
  Eigen::VectorXd bias;    // out
  Activation activation = Activation::kIdentity;

  int in_dim() const { return static_cast<int>(weight.cols()); }
  int out_dim() const { return static_cast<int>(weight.rows()); }
};

// Dense network. The last layer is the classifier head (identity activation,
// one output row per class, 1-based class id c maps to logit row c-1). All
// layers before it form the feature extractor; its output dimension is fixed
// for the lifetime of the model, only the head grows.
struct Model {
  std::vector<Layer> layers;

  int input_dim() const;
  int feature_dim() const;   // extractor output dimension
  int class_count() const;   // head output dimension
  std::size_t parameter_count() const;

  const Layer& head() const { return layers.back(); }

  // Adds zero-initialised head rows so logits for existing classes are
  // bit-identical before any training step.
  void expand_head(int new_class_count);

  // Throws ShapeError naming the first incompatible layer.
  void validate() const;

  bool same_parameters(const Model& other) const;

  // Random extractor (scaled normal init), zero head.
  static Model make(int input_dim, const std::vector<int>& hidden_dims,
                    int class_count, std::uint64_t seed);
};

struct ForwardResult {
  Eigen::MatrixXd features;  // n x feature_dim
  Eigen::MatrixXd logits;    // n x class_count
};

// Per-layer values cached for backpropagation: inputs[k] feeds layer k,
// pre[k] is its pre-activation output.
struct ForwardTrace {
  std::vector<Eigen::MatrixXd> inputs;
  std::vector<Eigen::MatrixXd> pre;
};

// batch is n x input_dim, one sample per row.
ForwardResult forward(const Model& model, const Eigen::MatrixXd& batch);
ForwardResult forward(const Model& model, const Eigen::MatrixXd& batch,
                      ForwardTrace& trace);

// Extractor output only (head not applied).
Eigen::MatrixXd extract_features(const Model& model,
                                 const Eigen::MatrixXd& batch);

// Versioned binary checkpoint; round-trips bit-exactly.
void save_model(const Model& model, const std::string& path);
Model load_model(const std::string& path);

// FNV-1a over the raw parameter bytes; used as prototype snapshot tag.
std::uint64_t parameter_hash(const Model& model);

}  // namespace placebocil
