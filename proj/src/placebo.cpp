#include "placebocil/placebo.hpp"

#include <algorithm>
#include <numeric>

#include "placebocil/errors.hpp"
#include "placebocil/losses.hpp"
#include "placebocil/rng.hpp"

namespace placebocil {

namespace {

constexpr double kTinyNorm = 1e-12;

Eigen::VectorXd mean_feature(const Model& snapshot,
                             const std::vector<Sample>& samples) {
  Eigen::MatrixXd batch(samples.size(), samples.front().features.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    batch.row(i) = samples[i].features.transpose();
  }
  Eigen::MatrixXd features = extract_features(snapshot, batch);
  return features.colwise().mean().transpose();
}

}  // namespace

PrototypeSet compute_prototypes(
    const Model& snapshot,
    const std::map<int, std::vector<Sample>>& old_per_class,
    const std::map<int, std::vector<Sample>>& new_per_class) {
  PrototypeSet set;
  set.snapshot_tag = parameter_hash(snapshot);
  for (const auto& [class_id, samples] : old_per_class) {
    if (samples.empty()) {
      throw ConfigError("compute_prototypes: old class " +
                        std::to_string(class_id) + " has no samples");
    }
    set.old_prototypes[class_id] = mean_feature(snapshot, samples);
  }
  for (const auto& [class_id, samples] : new_per_class) {
    if (samples.empty()) {
      throw ConfigError("compute_prototypes: new class " +
                        std::to_string(class_id) + " has no samples");
    }
    set.new_prototypes[class_id] = mean_feature(snapshot, samples);
  }
  return set;
}

double cosine_sim(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double na = a.norm();
  const double nb = b.norm();
  if (na < kTinyNorm || nb < kTinyNorm) {
    return 0.0;
  }
  return a.dot(b) / (na * nb);
}

double evaluate(const Sample& sample, int m, const PrototypeSet& prototypes,
                const Action& action, const Model& snapshot) {
  const auto it = prototypes.old_prototypes.find(m);
  if (it == prototypes.old_prototypes.end()) {
    throw DomainError("evaluate: no prototype for old class " +
                      std::to_string(m));
  }
  Eigen::MatrixXd batch = sample.features.transpose();
  Eigen::VectorXd feature =
      extract_features(snapshot, batch).row(0).transpose();

  double score = -cosine_sim(feature, it->second);

  if (prototypes.old_prototypes.size() > 1) {
    double sum = 0.0;
    for (const auto& [class_id, proto] : prototypes.old_prototypes) {
      if (class_id != m) {
        sum += cosine_sim(feature, proto);
      }
    }
    score += action.beta * sum /
             static_cast<double>(prototypes.old_prototypes.size() - 1);
  }
  if (!prototypes.new_prototypes.empty()) {
    double sum = 0.0;
    for (const auto& [class_id, proto] : prototypes.new_prototypes) {
      sum += cosine_sim(feature, proto);
    }
    score += action.gamma * sum /
             static_cast<double>(prototypes.new_prototypes.size());
  }
  return score;
}

PlaceboBuffer refill_placebos(const std::vector<Sample>& candidates,
                              const PrototypeSet& prototypes,
                              const Action& action, int k,
                              const Model& snapshot, ScoreObjective objective) {
  const int old_classes = prototypes.old_class_count();
  if (old_classes < 1) {
    throw DomainError("refill_placebos: no old classes to select for");
  }
  if (k < 1) {
    throw DomainError("refill_placebos: k must be >= 1");
  }
  const long long needed = static_cast<long long>(old_classes) * k;
  if (static_cast<long long>(candidates.size()) < needed) {
    throw RefillUnderflowError(
        "refill_placebos: need " + std::to_string(needed) +
        " candidates for " + std::to_string(old_classes) + " classes, have " +
        std::to_string(candidates.size()));
  }

  // One batched extractor pass, then cosines against every prototype.
  Eigen::MatrixXd batch(candidates.size(), candidates.front().features.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    batch.row(i) = candidates[i].features.transpose();
  }
  Eigen::MatrixXd features = extract_features(snapshot, batch);

  const std::size_t n = candidates.size();
  std::vector<double> new_term(n, 0.0);
  if (!prototypes.new_prototypes.empty()) {
    for (std::size_t i = 0; i < n; ++i) {
      double sum = 0.0;
      for (const auto& [class_id, proto] : prototypes.new_prototypes) {
        sum += cosine_sim(features.row(i).transpose(), proto);
      }
      new_term[i] = sum / static_cast<double>(prototypes.new_prototypes.size());
    }
  }
  std::vector<std::vector<double>> old_sims;  // [old class index][candidate]
  std::vector<int> old_ids;
  old_sims.reserve(old_classes);
  for (const auto& [class_id, proto] : prototypes.old_prototypes) {
    std::vector<double> sims(n);
    for (std::size_t i = 0; i < n; ++i) {
      sims[i] = cosine_sim(features.row(i).transpose(), proto);
    }
    old_sims.push_back(std::move(sims));
    old_ids.push_back(class_id);
  }
  std::vector<double> old_sum(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (int c = 0; c < old_classes; ++c) {
      old_sum[i] += old_sims[c][i];
    }
  }

  PlaceboBuffer buffer;
  buffer.capacity = static_cast<int>(needed);
  std::vector<char> used(n, 0);
  for (int c = 0; c < old_classes; ++c) {
    std::vector<std::size_t> pool;
    pool.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (!used[i]) {
        pool.push_back(i);
      }
    }
    auto score_of = [&](std::size_t i) {
      double s = -old_sims[c][i];
      if (old_classes > 1) {
        s += action.beta * (old_sum[i] - old_sims[c][i]) /
             static_cast<double>(old_classes - 1);
      }
      s += action.gamma * new_term[i];
      return objective == ScoreObjective::kLowestScore ? s : -s;
    };
    std::sort(pool.begin(), pool.end(), [&](std::size_t a, std::size_t b) {
      const double sa = score_of(a);
      const double sb = score_of(b);
      if (sa != sb) {
        return sa < sb;
      }
      return candidates[a].id < candidates[b].id;
    });
    for (int j = 0; j < k; ++j) {
      const std::size_t idx = pool[j];
      used[idx] = 1;
      buffer.entries.push_back({candidates[idx], old_ids[c]});
    }
  }
  return buffer;
}

std::vector<PlaceboEntry> consume(PlaceboBuffer& buffer, int batch_size) {
  if (batch_size < 1) {
    throw DomainError("consume: batch_size must be >= 1");
  }
  const int take = std::min(batch_size, buffer.size());
  std::vector<PlaceboEntry> out;
  out.reserve(take);
  for (int i = 0; i < take; ++i) {
    out.push_back(std::move(buffer.entries.front()));
    buffer.entries.pop_front();
  }
  return out;
}

PlaceboBuffer baseline_select(const std::vector<Sample>& candidates,
                              BaselineMode mode, const Model& snapshot,
                              int count, std::uint64_t seed) {
  if (count > static_cast<int>(candidates.size())) {
    throw RefillUnderflowError("baseline_select: count " +
                               std::to_string(count) + " exceeds " +
                               std::to_string(candidates.size()) +
                               " candidates");
  }
  PlaceboBuffer buffer;
  buffer.capacity = count;
  std::vector<std::size_t> order(candidates.size());
  std::iota(order.begin(), order.end(), 0);

  if (mode == BaselineMode::kRandom) {
    std::mt19937_64 eng(seed);
    std::shuffle(order.begin(), order.end(), eng);
  } else {
    Eigen::MatrixXd batch(candidates.size(),
                          candidates.front().features.size());
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      batch.row(i) = candidates[i].features.transpose();
    }
    Eigen::MatrixXd probs = softmax_rows(forward(snapshot, batch).logits);
    Eigen::VectorXd confidence = probs.rowwise().maxCoeff();
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (confidence[a] != confidence[b]) {
        return confidence[a] > confidence[b];
      }
      return candidates[a].id < candidates[b].id;
    });
  }
  for (int i = 0; i < count; ++i) {
    buffer.entries.push_back({candidates[order[i]], 0});
  }
  return buffer;
}

}  // namespace placebocil
