#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace placebocil {

// 1-based class id; 0 marks an unlabeled (stream) sample.
constexpr int kUnlabeled = 0;

// Stream sample ids live in their own namespace so they can never collide
// with task sample ids.
constexpr long long kStreamIdBase = 1'000'000'000LL;

struct Sample {
  long long id = 0;
  Eigen::VectorXd features;
  int label = kUnlabeled;

  bool labeled() const { return label != kUnlabeled; }
};

struct Dataset {
  std::vector<Sample> samples;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
  int dim() const {
    return samples.empty() ? 0
                           : static_cast<int>(samples.front().features.size());
  }

  Eigen::MatrixXd feature_matrix() const;
  std::vector<int> labels() const;
  std::map<int, std::vector<std::size_t>> indices_by_class() const;
  std::vector<int> class_ids() const;  // distinct labels, ascending
};

// Cumulative class counts c_0 < c_1 < ... ; phase i introduces the 1-based
// class ids (c_{i-1}, c_i].
struct PhaseSchedule {
  std::vector<int> class_counts;

  int phases() const { return static_cast<int>(class_counts.size()); }
  int classes_at(int phase) const { return class_counts.at(phase); }
  int total_classes() const { return class_counts.back(); }
  std::vector<int> classes_in_phase(int phase) const;

  void validate() const;
};

struct Environment {
  Dataset train;
  Dataset test;
};

// h_i = (T \ B, B); holdout is the class-balanced subset B.
struct LocalEnv {
  Dataset train;
  Dataset holdout;
};

struct SyntheticTaskSpec {
  int classes = 10;
  int feature_dim = 16;
  int train_per_class = 700;
  int test_per_class = 200;
  double mean_radius = 5.0;
  double noise_sigma = 1.5;
  int stream_classes = 24;
  int stream_pool_size = 6000;
  double stream_min_dist = 3.0;     // min distance stream means keep from task means
  double overlap_fraction = 0.0;    // fraction of stream samples drawn from task classes

  void validate() const;
};

struct SyntheticTask {
  Dataset train;
  Dataset test;
  Dataset stream_pool;                     // unlabeled
  std::vector<Eigen::VectorXd> class_means;
  std::vector<Eigen::VectorXd> stream_means;
};

// Gaussian clusters per class; stream pool drawn from distinct distributions
// whose means keep spec.stream_min_dist from every task mean (overlap_fraction
// mixes task-class samples back in).
SyntheticTask make_synthetic_task(const SyntheticTaskSpec& spec,
                                  std::uint64_t seed);

// Per-phase new-class datasets; phase i holds exactly classes (c_{i-1}, c_i].
std::vector<Dataset> split_phases(const Dataset& dataset,
                                  const PhaseSchedule& schedule);

// Class-balanced holdout of per_class samples per class. Every class needs
// at least per_class + 1 samples so training keeps at least one.
LocalEnv rebuild_local_env(const Dataset& train, int per_class,
                           std::uint64_t seed);

// Free unlabeled stream. Pool-backed streams draw without replacement and
// reshuffle with a phase-derived seed on exhaustion; generator streams are
// unbounded Gaussian mixtures.
class FreeStream {
 public:
  static FreeStream from_pool(Dataset pool, std::uint64_t seed);
  static FreeStream generator(std::vector<Eigen::VectorXd> means, double sigma,
                              std::uint64_t seed);

  void begin_phase(int phase);
  std::vector<Sample> draw(int count);

  long long draw_calls() const { return draw_calls_; }
  bool is_pool() const { return mode_ == Mode::kPool; }

 private:
  enum class Mode { kPool, kGenerator };

  FreeStream() = default;

  Mode mode_ = Mode::kPool;
  Dataset pool_;
  std::vector<std::size_t> order_;
  std::size_t cursor_ = 0;
  int reshuffles_ = 0;

  std::vector<Eigen::VectorXd> means_;
  double sigma_ = 1.0;
  long long next_id_ = kStreamIdBase;

  std::uint64_t seed_ = 0;
  int phase_ = 0;
  long long draw_calls_ = 0;
  std::mt19937_64 gen_engine_;

  void reshuffle();
};

std::vector<Sample> draw_candidates(FreeStream& stream, int count);

// CSV with header id,label,f0,...,f{d-1}; the label column is empty for
// unlabeled samples.
Dataset load_dataset_csv(const std::string& path);
void save_dataset_csv(const Dataset& dataset, const std::string& path);

}  // namespace placebocil
