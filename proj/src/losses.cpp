#include "placebocil/losses.hpp"

#include <cmath>

#include "placebocil/errors.hpp"

namespace placebocil {

namespace {

constexpr double kTinyProb = 1e-12;
constexpr double kTinyNorm = 1e-12;

Eigen::MatrixXd log_softmax_rows(const Eigen::MatrixXd& logits) {
  Eigen::MatrixXd shifted =
      logits.colwise() - logits.rowwise().maxCoeff();
  Eigen::VectorXd lse =
      shifted.array().exp().rowwise().sum().log().matrix();
  return shifted.colwise() - lse;
}

Eigen::MatrixXd relu_mask(const Eigen::MatrixXd& pre) {
  return (pre.array() > 0.0).cast<double>().matrix();
}

}  // namespace

Gradients Gradients::zeros_like(const Model& model) {
  Gradients g;
  g.dweight.reserve(model.layers.size());
  g.dbias.reserve(model.layers.size());
  for (const Layer& layer : model.layers) {
    g.dweight.push_back(
        Eigen::MatrixXd::Zero(layer.weight.rows(), layer.weight.cols()));
    g.dbias.push_back(Eigen::VectorXd::Zero(layer.bias.size()));
  }
  return g;
}

void Gradients::add_scaled(const Gradients& other, double factor) {
  if (other.dweight.size() != dweight.size()) {
    throw ShapeError("Gradients::add_scaled: layer count mismatch");
  }
  for (std::size_t k = 0; k < dweight.size(); ++k) {
    dweight[k] += factor * other.dweight[k];
    dbias[k] += factor * other.dbias[k];
  }
}

bool Gradients::all_zero() const {
  for (std::size_t k = 0; k < dweight.size(); ++k) {
    if (dweight[k].cwiseAbs().maxCoeff() != 0.0 ||
        (dbias[k].size() > 0 && dbias[k].cwiseAbs().maxCoeff() != 0.0)) {
      return false;
    }
  }
  return true;
}

Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& logits) {
  Eigen::MatrixXd shifted =
      logits.colwise() - logits.rowwise().maxCoeff();
  Eigen::MatrixXd e = shifted.array().exp().matrix();
  Eigen::VectorXd sums = e.rowwise().sum();
  return e.array().colwise() / sums.array();
}

Gradients backprop_from_logits(const Model& model, const ForwardTrace& trace,
                               const Eigen::MatrixXd& dlogits) {
  Gradients grads = Gradients::zeros_like(model);
  Eigen::MatrixXd g = dlogits;
  for (int k = static_cast<int>(model.layers.size()) - 1; k >= 0; --k) {
    const Layer& layer = model.layers[k];
    Eigen::MatrixXd dpre;
    if (layer.activation == Activation::kRelu) {
      dpre = g.cwiseProduct(relu_mask(trace.pre[k]));
    } else {
      dpre = std::move(g);
    }
    grads.dweight[k] = dpre.transpose() * trace.inputs[k];
    grads.dbias[k] = dpre.colwise().sum();
    if (k > 0) {
      g = dpre * layer.weight;
    }
  }
  return grads;
}

Gradients backprop_from_features(const Model& model, const ForwardTrace& trace,
                                 const Eigen::MatrixXd& dfeatures) {
  Gradients grads = Gradients::zeros_like(model);
  if (model.layers.size() < 2) {
    return grads;  // head-only model: raw inputs carry no parameters
  }
  Eigen::MatrixXd g = dfeatures;
  for (int k = static_cast<int>(model.layers.size()) - 2; k >= 0; --k) {
    const Layer& layer = model.layers[k];
    Eigen::MatrixXd dpre;
    if (layer.activation == Activation::kRelu) {
      dpre = g.cwiseProduct(relu_mask(trace.pre[k]));
    } else {
      dpre = std::move(g);
    }
    grads.dweight[k] = dpre.transpose() * trace.inputs[k];
    grads.dbias[k] = dpre.colwise().sum();
    if (k > 0) {
      g = dpre * layer.weight;
    }
  }
  return grads;
}

LossResult ce_loss_grad(const Model& model, const Eigen::MatrixXd& batch,
                        const std::vector<int>& labels) {
  if (static_cast<Eigen::Index>(labels.size()) != batch.rows()) {
    throw ShapeError("ce_loss_grad: label count does not match batch rows");
  }
  LossResult result;
  result.grads = Gradients::zeros_like(model);
  const Eigen::Index n = batch.rows();
  if (n == 0) {
    return result;
  }
  const int classes = model.class_count();
  for (int label : labels) {
    if (label < 1 || label > classes) {
      throw DomainError("ce_loss_grad: label " + std::to_string(label) +
                        " outside [1, " + std::to_string(classes) + "]");
    }
  }
  ForwardTrace trace;
  ForwardResult fwd = forward(model, batch, trace);
  Eigen::MatrixXd log_probs = log_softmax_rows(fwd.logits);
  Eigen::MatrixXd dlogits = softmax_rows(fwd.logits);
  double loss = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const int col = labels[i] - 1;
    loss -= log_probs(i, col);
    dlogits(i, col) -= 1.0;
  }
  result.loss = loss / static_cast<double>(n);
  dlogits /= static_cast<double>(n);
  result.grads = backprop_from_logits(model, trace, dlogits);
  return result;
}

LossResult kd_loss_grad(const Model& teacher, const Model& student,
                        const Eigen::MatrixXd& batch, const LossConfig& cfg) {
  LossResult result;
  result.grads = Gradients::zeros_like(student);
  const Eigen::Index n = batch.rows();
  if (n == 0) {
    return result;  // no placebos available this step
  }
  if (cfg.temperature <= 0.0) {
    throw DomainError("kd_loss_grad: temperature must be positive");
  }
  const int old_classes = teacher.class_count();
  if (student.class_count() < old_classes) {
    throw ShapeError("kd_loss_grad: student head smaller than teacher head");
  }

  ForwardTrace trace;
  ForwardResult student_fwd = forward(student, batch, trace);
  ForwardResult teacher_fwd = forward(teacher, batch);

  if (cfg.kd_kind == KdKind::kLogitKl) {
    const double tau = cfg.temperature;
    Eigen::MatrixXd teacher_probs =
        softmax_rows(teacher_fwd.logits / tau);
    Eigen::MatrixXd student_old = student_fwd.logits.leftCols(old_classes);
    Eigen::MatrixXd student_logp = log_softmax_rows(student_old / tau);
    Eigen::MatrixXd student_probs = softmax_rows(student_old / tau);

    double loss = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      for (int k = 0; k < old_classes; ++k) {
        const double p = teacher_probs(i, k);
        if (p < kTinyProb) {
          continue;  // vanishing teacher mass contributes nothing
        }
        loss += p * (std::log(p) - student_logp(i, k));
      }
    }
    result.loss = loss / static_cast<double>(n);

    Eigen::MatrixXd dlogits =
        Eigen::MatrixXd::Zero(n, student.class_count());
    dlogits.leftCols(old_classes) =
        (student_probs - teacher_probs) / (static_cast<double>(n) * tau);
    result.grads = backprop_from_logits(student, trace, dlogits);
    return result;
  }

  // Cosine-embedding KD on extractor features: mean of 1 - cos(t, s).
  const Eigen::MatrixXd& t_feat = teacher_fwd.features;
  const Eigen::MatrixXd& s_feat = student_fwd.features;
  if (t_feat.cols() != s_feat.cols()) {
    throw ShapeError("kd_loss_grad: teacher and student feature dims differ");
  }
  Eigen::MatrixXd dfeat = Eigen::MatrixXd::Zero(n, s_feat.cols());
  double loss = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::VectorXd t = t_feat.row(i).transpose();
    const Eigen::VectorXd s = s_feat.row(i).transpose();
    const double nt = t.norm();
    const double ns = s.norm();
    if (nt < kTinyNorm && ns < kTinyNorm) {
      continue;  // identical zero features: treated as equal, no gradient
    }
    if (nt < kTinyNorm || ns < kTinyNorm) {
      loss += 1.0;  // cosine defined as 0 against a zero vector
      continue;
    }
    const double cos = t.dot(s) / (nt * ns);
    loss += 1.0 - cos;
    dfeat.row(i) = (-t / (nt * ns) + cos * s / (ns * ns)).transpose();
  }
  result.loss = loss / static_cast<double>(n);
  dfeat /= static_cast<double>(n);
  result.grads = backprop_from_features(student, trace, dfeat);
  return result;
}

std::vector<int> predict(const Model& model, const Eigen::MatrixXd& batch) {
  ForwardResult fwd = forward(model, batch);
  std::vector<int> out(static_cast<std::size_t>(batch.rows()));
  for (Eigen::Index i = 0; i < fwd.logits.rows(); ++i) {
    Eigen::Index best = 0;
    fwd.logits.row(i).maxCoeff(&best);
    out[static_cast<std::size_t>(i)] = static_cast<int>(best) + 1;
  }
  return out;
}

}  // namespace placebocil
