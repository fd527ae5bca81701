#include "placebocil/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "placebocil/errors.hpp"
#include "placebocil/rng.hpp"

namespace placebocil {

Eigen::MatrixXd Dataset::feature_matrix() const {
  Eigen::MatrixXd m(samples.size(), dim());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    m.row(i) = samples[i].features.transpose();
  }
  return m;
}

std::vector<int> Dataset::labels() const {
  std::vector<int> out;
  out.reserve(samples.size());
  for (const Sample& s : samples) {
    out.push_back(s.label);
  }
  return out;
}

std::map<int, std::vector<std::size_t>> Dataset::indices_by_class() const {
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    by_class[samples[i].label].push_back(i);
  }
  return by_class;
}

std::vector<int> Dataset::class_ids() const {
  std::set<int> ids;
  for (const Sample& s : samples) {
    ids.insert(s.label);
  }
  return {ids.begin(), ids.end()};
}

std::vector<int> PhaseSchedule::classes_in_phase(int phase) const {
  const int lo = phase == 0 ? 0 : class_counts.at(phase - 1);
  const int hi = class_counts.at(phase);
  std::vector<int> out;
  for (int c = lo + 1; c <= hi; ++c) {
    out.push_back(c);
  }
  return out;
}

void PhaseSchedule::validate() const {
  if (class_counts.empty()) {
    throw ConfigError("schedule.class_counts must not be empty");
  }
  int prev = 0;
  for (int c : class_counts) {
    if (c <= prev) {
      throw ConfigError("schedule.class_counts must be strictly increasing");
    }
    prev = c;
  }
}

void SyntheticTaskSpec::validate() const {
  if (feature_dim < 2) {
    throw ConfigError("task.feature_dim must be >= 2");
  }
  if (classes < 1) {
    throw ConfigError("task.classes must be >= 1");
  }
  if (train_per_class < 2 || test_per_class < 1) {
    throw ConfigError("task.train_per_class must be >= 2 and test_per_class >= 1");
  }
  if (noise_sigma <= 0.0) {
    throw ConfigError("task.noise_sigma must be positive (degenerate covariance)");
  }
  if (mean_radius <= 0.0) {
    throw ConfigError("task.mean_radius must be positive");
  }
  if (stream_pool_size > 0 && stream_classes < 1) {
    throw ConfigError("task.stream_classes must be >= 1 when a pool is generated");
  }
  if (overlap_fraction < 0.0 || overlap_fraction > 1.0) {
    throw ConfigError("task.overlap_fraction must lie in [0, 1]");
  }
}

namespace {

Eigen::VectorXd random_unit(std::mt19937_64& eng, int dim) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd v(dim);
  double norm2 = 0.0;
  do {
    for (int i = 0; i < dim; ++i) {
      v[i] = normal(eng);
    }
    norm2 = v.squaredNorm();
  } while (norm2 < 1e-12);
  return v / std::sqrt(norm2);
}

Eigen::VectorXd gaussian_sample(std::mt19937_64& eng,
                                const Eigen::VectorXd& mean, double sigma) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd v(mean.size());
  for (Eigen::Index i = 0; i < mean.size(); ++i) {
    v[i] = mean[i] + sigma * normal(eng);
  }
  return v;
}

double min_dist_to(const std::vector<Eigen::VectorXd>& means,
                   const Eigen::VectorXd& v) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& m : means) {
    best = std::min(best, (m - v).norm());
  }
  return best;
}

}  // namespace

SyntheticTask make_synthetic_task(const SyntheticTaskSpec& spec,
                                  std::uint64_t seed) {
  spec.validate();
  auto eng = rng::engine(seed, rng::kTaskData);

  SyntheticTask task;
  const int d = spec.feature_dim;

  // Task class means: signed axis layout while it fits (keeps every pair at
  // least radius*sqrt(2) apart), random directions beyond that.
  for (int k = 1; k <= spec.classes; ++k) {
    Eigen::VectorXd mean;
    if (spec.classes <= 2 * d) {
      mean = Eigen::VectorXd::Zero(d);
      const int axis = (k - 1) / 2;
      mean[axis] = (k % 2 == 1 ? 1.0 : -1.0) * spec.mean_radius;
    } else {
      for (int attempt = 0; attempt < 200; ++attempt) {
        mean = random_unit(eng, d) * spec.mean_radius;
        if (min_dist_to(task.class_means, mean) >= 0.7 * spec.mean_radius) {
          break;
        }
      }
    }
    task.class_means.push_back(mean);
  }

  long long next_id = 0;
  for (int k = 1; k <= spec.classes; ++k) {
    for (int i = 0; i < spec.train_per_class; ++i) {
      task.train.samples.push_back(
          {next_id++, gaussian_sample(eng, task.class_means[k - 1], spec.noise_sigma), k});
    }
  }
  for (int k = 1; k <= spec.classes; ++k) {
    for (int i = 0; i < spec.test_per_class; ++i) {
      task.test.samples.push_back(
          {next_id++, gaussian_sample(eng, task.class_means[k - 1], spec.noise_sigma), k});
    }
  }

  if (spec.stream_pool_size > 0) {
    auto stream_eng = rng::engine(seed, rng::kStreamPool);
    for (int k = 0; k < spec.stream_classes; ++k) {
      Eigen::VectorXd mean;
      bool placed = false;
      for (int attempt = 0; attempt < 10000; ++attempt) {
        mean = random_unit(stream_eng, d) * spec.mean_radius;
        if (min_dist_to(task.class_means, mean) >= spec.stream_min_dist) {
          placed = true;
          break;
        }
      }
      if (!placed) {
        throw ConfigError(
            "task.stream_min_dist leaves no room for stream class means");
      }
      task.stream_means.push_back(mean);
    }
    long long stream_id = kStreamIdBase;
    for (int i = 0; i < spec.stream_pool_size; ++i) {
      const bool from_task =
          rng::uniform01(stream_eng) < spec.overlap_fraction;
      const auto& means = from_task ? task.class_means : task.stream_means;
      const auto& mean = means[rng::uniform_index(stream_eng, means.size())];
      task.stream_pool.samples.push_back(
          {stream_id++, gaussian_sample(stream_eng, mean, spec.noise_sigma),
           kUnlabeled});
    }
  }
  return task;
}

std::vector<Dataset> split_phases(const Dataset& dataset,
                                  const PhaseSchedule& schedule) {
  schedule.validate();
  const int total = schedule.total_classes();
  std::set<int> present;
  for (const Sample& s : dataset.samples) {
    if (s.label < 1 || s.label > total) {
      throw ConfigError("split_phases: label " + std::to_string(s.label) +
                        " outside schedule classes [1, " +
                        std::to_string(total) + "]");
    }
    present.insert(s.label);
  }
  std::string missing;
  for (int c = 1; c <= total; ++c) {
    if (!present.count(c)) {
      missing += (missing.empty() ? "" : ", ") + std::to_string(c);
    }
  }
  if (!missing.empty()) {
    throw ConfigError("split_phases: dataset is missing classes " + missing);
  }

  std::vector<Dataset> phases(schedule.phases());
  for (const Sample& s : dataset.samples) {
    for (int i = 0; i < schedule.phases(); ++i) {
      const int lo = i == 0 ? 0 : schedule.classes_at(i - 1);
      if (s.label > lo && s.label <= schedule.classes_at(i)) {
        phases[i].samples.push_back(s);
        break;
      }
    }
  }
  return phases;
}

LocalEnv rebuild_local_env(const Dataset& train, int per_class,
                           std::uint64_t seed) {
  if (per_class < 1) {
    throw ConfigError("rebuild_local_env: per_class must be >= 1");
  }
  auto by_class = train.indices_by_class();
  std::mt19937_64 eng(seed);
  std::vector<char> in_holdout(train.size(), 0);
  for (auto& [class_id, indices] : by_class) {
    if (static_cast<int>(indices.size()) < per_class + 1) {
      throw ConfigError("rebuild_local_env: class " + std::to_string(class_id) +
                        " has " + std::to_string(indices.size()) +
                        " samples, needs at least " +
                        std::to_string(per_class + 1));
    }
    std::shuffle(indices.begin(), indices.end(), eng);
    for (int i = 0; i < per_class; ++i) {
      in_holdout[indices[i]] = 1;
    }
  }
  LocalEnv env;
  for (std::size_t i = 0; i < train.size(); ++i) {
    (in_holdout[i] ? env.holdout : env.train).samples.push_back(train.samples[i]);
  }
  return env;
}

FreeStream FreeStream::from_pool(Dataset pool, std::uint64_t seed) {
  FreeStream s;
  s.mode_ = Mode::kPool;
  s.pool_ = std::move(pool);
  for (Sample& sample : s.pool_.samples) {
    sample.label = kUnlabeled;
  }
  s.seed_ = seed;
  s.order_.resize(s.pool_.size());
  std::iota(s.order_.begin(), s.order_.end(), 0);
  if (!s.order_.empty()) {
    auto eng = rng::engine(seed, rng::kStreamShuffle, 0, 0);
    std::shuffle(s.order_.begin(), s.order_.end(), eng);
  }
  return s;
}

FreeStream FreeStream::generator(std::vector<Eigen::VectorXd> means,
                                 double sigma, std::uint64_t seed) {
  if (means.empty()) {
    throw ConfigError("FreeStream::generator needs at least one mean");
  }
  if (sigma <= 0.0) {
    throw ConfigError("FreeStream::generator sigma must be positive");
  }
  FreeStream s;
  s.mode_ = Mode::kGenerator;
  s.means_ = std::move(means);
  s.sigma_ = sigma;
  s.seed_ = seed;
  s.gen_engine_ = rng::engine(seed, rng::kStreamPool);
  return s;
}

void FreeStream::begin_phase(int phase) { phase_ = phase; }

void FreeStream::reshuffle() {
  ++reshuffles_;
  auto eng = rng::engine(seed_, rng::kStreamShuffle,
                         static_cast<std::uint64_t>(phase_),
                         static_cast<std::uint64_t>(reshuffles_));
  std::shuffle(order_.begin(), order_.end(), eng);
  cursor_ = 0;
}

std::vector<Sample> FreeStream::draw(int count) {
  ++draw_calls_;
  std::vector<Sample> out;
  if (count <= 0) {
    return out;
  }
  out.reserve(count);
  if (mode_ == Mode::kGenerator) {
    for (int i = 0; i < count; ++i) {
      const auto& mean = means_[rng::uniform_index(gen_engine_, means_.size())];
      out.push_back({next_id_++, gaussian_sample(gen_engine_, mean, sigma_),
                     kUnlabeled});
    }
    return out;
  }
  if (pool_.empty()) {
    throw StreamExhaustedError("free stream pool is empty");
  }
  for (int i = 0; i < count; ++i) {
    if (cursor_ >= order_.size()) {
      reshuffle();
    }
    out.push_back(pool_.samples[order_[cursor_++]]);
  }
  return out;
}

std::vector<Sample> draw_candidates(FreeStream& stream, int count) {
  return stream.draw(count);
}

Dataset load_dataset_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open dataset file: " + path);
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw ConfigError("dataset file is empty: " + path);
  }
  // header: id,label,f0,...,f{d-1}
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      header.push_back(cell);
    }
  }
  if (header.size() < 3 || header[0] != "id" || header[1] != "label") {
    throw ConfigError("dataset header must be id,label,f0,...: " + path);
  }
  const int dim = static_cast<int>(header.size()) - 2;

  Dataset dataset;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) {
      continue;
    }
    std::stringstream ss(line);
    std::string cell;
    Sample sample;
    sample.features.resize(dim);
    int col = 0;
    while (std::getline(ss, cell, ',')) {
      if (col == 0) {
        sample.id = std::stoll(cell);
      } else if (col == 1) {
        sample.label = cell.empty() ? kUnlabeled : std::stoi(cell);
      } else if (col - 2 < dim) {
        sample.features[col - 2] = std::strtod(cell.c_str(), nullptr);
      }
      ++col;
    }
    // a trailing empty label cell is eaten by getline; "id," yields col == 1
    if (col == 1) {
      sample.label = kUnlabeled;
      col = 2;
    }
    if (col != dim + 2) {
      throw ConfigError(path + ":" + std::to_string(line_no) +
                        ": expected " + std::to_string(dim + 2) +
                        " columns, got " + std::to_string(col));
    }
    dataset.samples.push_back(std::move(sample));
  }
  return dataset;
}

void save_dataset_csv(const Dataset& dataset, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) {
    throw Error("cannot open dataset file for writing: " + path);
  }
  std::fprintf(f, "id,label");
  for (int i = 0; i < dataset.dim(); ++i) {
    std::fprintf(f, ",f%d", i);
  }
  std::fprintf(f, "\n");
  for (const Sample& s : dataset.samples) {
    if (s.labeled()) {
      std::fprintf(f, "%lld,%d", s.id, s.label);
    } else {
      std::fprintf(f, "%lld,", s.id);
    }
    for (Eigen::Index i = 0; i < s.features.size(); ++i) {
      std::fprintf(f, ",%.17g", s.features[i]);
    }
    std::fprintf(f, "\n");
  }
  std::fclose(f);
}

}  // namespace placebocil
