#include "placebocil/model.hpp"

#include <cstdio>
#include <cstring>
#include <random>

#include "placebocil/errors.hpp"
#include "placebocil/rng.hpp"

namespace placebocil {

namespace {

Eigen::MatrixXd apply_activation(Activation act, const Eigen::MatrixXd& pre) {
  if (act == Activation::kRelu) {
    return pre.cwiseMax(0.0);
  }
  return pre;
}

}  // namespace

int Model::input_dim() const {
  return layers.empty() ? 0 : layers.front().in_dim();
}

int Model::feature_dim() const {
  if (layers.size() < 2) {
    return input_dim();  // headless or head-only: features are the raw input
  }
  return layers[layers.size() - 2].out_dim();
}

int Model::class_count() const {
  return layers.empty() ? 0 : layers.back().out_dim();
}

std::size_t Model::parameter_count() const {
  std::size_t n = 0;
  for (const auto& layer : layers) {
    n += static_cast<std::size_t>(layer.weight.size() + layer.bias.size());
  }
  return n;
}

void Model::expand_head(int new_class_count) {
  if (layers.empty()) {
    throw ShapeError("expand_head: model has no layers");
  }
  Layer& head = layers.back();
  const int old_count = head.out_dim();
  if (new_class_count < old_count) {
    throw ShapeError("expand_head: head can only grow (" +
                     std::to_string(old_count) + " -> " +
                     std::to_string(new_class_count) + ")");
  }
  if (new_class_count == old_count) {
    return;
  }
  Eigen::MatrixXd weight = Eigen::MatrixXd::Zero(new_class_count, head.in_dim());
  Eigen::VectorXd bias = Eigen::VectorXd::Zero(new_class_count);
  weight.topRows(old_count) = head.weight;
  bias.head(old_count) = head.bias;
  head.weight = std::move(weight);
  head.bias = std::move(bias);
}

void Model::validate() const {
  if (layers.empty()) {
    throw ShapeError("model has no layers");
  }
  for (std::size_t k = 0; k < layers.size(); ++k) {
    const Layer& layer = layers[k];
    if (layer.weight.rows() != layer.bias.size()) {
      throw ShapeError("layer " + std::to_string(k) + ": weight rows " +
                       std::to_string(layer.weight.rows()) +
                       " != bias size " + std::to_string(layer.bias.size()));
    }
    if (k + 1 < layers.size() &&
        layers[k].out_dim() != layers[k + 1].in_dim()) {
      throw ShapeError("layer " + std::to_string(k) + " output dim " +
                       std::to_string(layers[k].out_dim()) +
                       " does not match layer " + std::to_string(k + 1) +
                       " input dim " + std::to_string(layers[k + 1].in_dim()));
    }
  }
  if (layers.back().activation != Activation::kIdentity) {
    throw ShapeError("head layer must use the identity activation");
  }
}

bool Model::same_parameters(const Model& other) const {
  if (layers.size() != other.layers.size()) {
    return false;
  }
  for (std::size_t k = 0; k < layers.size(); ++k) {
    const Layer& a = layers[k];
    const Layer& b = other.layers[k];
    if (a.activation != b.activation || a.weight.rows() != b.weight.rows() ||
        a.weight.cols() != b.weight.cols()) {
      return false;
    }
    if (std::memcmp(a.weight.data(), b.weight.data(),
                    sizeof(double) * a.weight.size()) != 0 ||
        std::memcmp(a.bias.data(), b.bias.data(),
                    sizeof(double) * a.bias.size()) != 0) {
      return false;
    }
  }
  return true;
}

Model Model::make(int input_dim, const std::vector<int>& hidden_dims,
                  int class_count, std::uint64_t seed) {
  if (input_dim < 1 || class_count < 1) {
    throw ShapeError("Model::make: input_dim and class_count must be >= 1");
  }
  std::mt19937_64 eng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Model model;
  int in = input_dim;
  for (int out : hidden_dims) {
    if (out < 1) {
      throw ShapeError("Model::make: hidden dim must be >= 1");
    }
    Layer layer;
    layer.weight = Eigen::MatrixXd::NullaryExpr(
        out, in, [&]() { return normal(eng) * std::sqrt(2.0 / in); });
    layer.bias = Eigen::VectorXd::Zero(out);
    layer.activation = Activation::kRelu;
    model.layers.push_back(std::move(layer));
    in = out;
  }
  // Final hidden layer switches to identity so features are signed; the
  // zero-initialised head starts every class at logit 0.
  if (!model.layers.empty()) {
    model.layers.back().activation = Activation::kIdentity;
  }
  Layer head;
  head.weight = Eigen::MatrixXd::Zero(class_count, in);
  head.bias = Eigen::VectorXd::Zero(class_count);
  head.activation = Activation::kIdentity;
  model.layers.push_back(std::move(head));
  model.validate();
  return model;
}

ForwardResult forward(const Model& model, const Eigen::MatrixXd& batch,
                      ForwardTrace& trace) {
  if (model.layers.empty()) {
    throw ShapeError("forward: model has no layers");
  }
  if (batch.cols() != model.input_dim()) {
    throw ShapeError("forward: batch has " + std::to_string(batch.cols()) +
                     " columns but layer 0 expects " +
                     std::to_string(model.input_dim()));
  }
  trace.inputs.clear();
  trace.pre.clear();
  trace.inputs.reserve(model.layers.size());
  trace.pre.reserve(model.layers.size());

  Eigen::MatrixXd x = batch;
  ForwardResult result;
  for (std::size_t k = 0; k < model.layers.size(); ++k) {
    const Layer& layer = model.layers[k];
    if (x.cols() != layer.in_dim()) {
      throw ShapeError("forward: layer " + std::to_string(k) + " expects " +
                       std::to_string(layer.in_dim()) + " inputs, got " +
                       std::to_string(x.cols()));
    }
    trace.inputs.push_back(x);
    Eigen::MatrixXd pre =
        (x * layer.weight.transpose()).rowwise() + layer.bias.transpose();
    trace.pre.push_back(pre);
    x = apply_activation(layer.activation, pre);
    if (k + 2 == model.layers.size()) {
      result.features = x;
    }
  }
  if (model.layers.size() == 1) {
    result.features = batch;  // head-only model: raw inputs are the features
  }
  result.logits = std::move(x);
  return result;
}

ForwardResult forward(const Model& model, const Eigen::MatrixXd& batch) {
  ForwardTrace trace;
  return forward(model, batch, trace);
}

Eigen::MatrixXd extract_features(const Model& model,
                                 const Eigen::MatrixXd& batch) {
  return forward(model, batch).features;
}

namespace {

void write_bytes(std::FILE* f, const void* data, std::size_t n) {
  if (std::fwrite(data, 1, n, f) != n) {
    throw Error("checkpoint write failed");
  }
}

void read_bytes(std::FILE* f, void* data, std::size_t n) {
  if (std::fread(data, 1, n, f) != n) {
    throw Error("checkpoint truncated");
  }
}

constexpr char kMagic[8] = {'P', 'C', 'I', 'L', 'M', 'D', 'L', '1'};

}  // namespace

void save_model(const Model& model, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) {
    throw Error("cannot open checkpoint for writing: " + path);
  }
  write_bytes(f, kMagic, sizeof(kMagic));
  const std::uint32_t count = static_cast<std::uint32_t>(model.layers.size());
  write_bytes(f, &count, sizeof(count));
  for (const Layer& layer : model.layers) {
    const std::uint8_t act = layer.activation == Activation::kRelu ? 1 : 0;
    const std::uint32_t rows = static_cast<std::uint32_t>(layer.weight.rows());
    const std::uint32_t cols = static_cast<std::uint32_t>(layer.weight.cols());
    write_bytes(f, &act, sizeof(act));
    write_bytes(f, &rows, sizeof(rows));
    write_bytes(f, &cols, sizeof(cols));
    // row-major parameter dump
    for (std::uint32_t r = 0; r < rows; ++r) {
      for (std::uint32_t c = 0; c < cols; ++c) {
        const double v = layer.weight(r, c);
        write_bytes(f, &v, sizeof(v));
      }
    }
    write_bytes(f, layer.bias.data(), sizeof(double) * rows);
  }
  std::fclose(f);
}

Model load_model(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) {
    throw Error("cannot open checkpoint: " + path);
  }
  char magic[8];
  read_bytes(f, magic, sizeof(magic));
  if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    std::fclose(f);
    throw Error("not a placebocil checkpoint: " + path);
  }
  std::uint32_t count = 0;
  read_bytes(f, &count, sizeof(count));
  Model model;
  model.layers.resize(count);
  for (Layer& layer : model.layers) {
    std::uint8_t act = 0;
    std::uint32_t rows = 0;
    std::uint32_t cols = 0;
    read_bytes(f, &act, sizeof(act));
    read_bytes(f, &rows, sizeof(rows));
    read_bytes(f, &cols, sizeof(cols));
    layer.activation = act == 1 ? Activation::kRelu : Activation::kIdentity;
    layer.weight.resize(rows, cols);
    for (std::uint32_t r = 0; r < rows; ++r) {
      for (std::uint32_t c = 0; c < cols; ++c) {
        double v = 0;
        read_bytes(f, &v, sizeof(v));
        layer.weight(r, c) = v;
      }
    }
    layer.bias.resize(rows);
    read_bytes(f, layer.bias.data(), sizeof(double) * rows);
  }
  std::fclose(f);
  model.validate();
  return model;
}

std::uint64_t parameter_hash(const Model& model) {
  std::uint64_t h = 1469598103934665603ULL;
  auto feed = [&h](const double* data, std::size_t n) {
    const auto* bytes = reinterpret_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n * sizeof(double); ++i) {
      h ^= bytes[i];
      h *= 1099511628211ULL;
    }
  };
  for (const Layer& layer : model.layers) {
    feed(layer.weight.data(), static_cast<std::size_t>(layer.weight.size()));
    feed(layer.bias.data(), static_cast<std::size_t>(layer.bias.size()));
  }
  return h;
}

}  // namespace placebocil
