#pragma once

#include <cstdint>
#include <random>

namespace placebocil::rng {

// Every random decision in the engine derives its generator from the single
// top-level experiment seed through mix(). Each component owns a fixed
// stream id below, so reordering unrelated work never shifts another
// component's draws. The (a, b) words scope a stream to a phase, iteration,
// class id or call id where needed.
enum Stream : std::uint64_t {
  kTaskData = 1,         // synthetic task generation
  kStreamPool = 2,       // free-stream pool generation / generator draws
  kStreamShuffle = 3,    // pool order, reshuffled on exhaustion
  kModelInit = 4,        // phase-0 weight initialisation
  kBudgetRemoval = 5,    // strict-budget removal, scoped by phase
  kExemplarSelect = 6,   // scoped by (phase, class)
  kLocalEnv = 7,         // class-balanced subset B, scoped by (phase, iter)
  kPolicySample = 8,     // action draws, one sequential stream per run
  kBatchOrder = 9,       // mini-batch shuffles, scoped by (phase, call id)
  kOracleBatch = 10,     // old-data-oracle KD batches, scoped by (phase, call id)
  kBaselineSelect = 11,  // random-placebo baseline, scoped by (phase, call id)
};

// splitmix64; decorrelates consecutive seeds and stream ids.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t mix(std::uint64_t seed, std::uint64_t stream,
                         std::uint64_t a = 0, std::uint64_t b = 0) {
  std::uint64_t h = splitmix64(seed ^ 0x5bf03635d2a372c8ULL);
  h = splitmix64(h ^ stream);
  h = splitmix64(h ^ a);
  h = splitmix64(h ^ b);
  return h;
}

inline std::mt19937_64 engine(std::uint64_t seed, std::uint64_t stream,
                              std::uint64_t a = 0, std::uint64_t b = 0) {
  return std::mt19937_64(mix(seed, stream, a, b));
}

// Uniform double in [0, 1) from the top 53 bits.
inline double uniform01(std::mt19937_64& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, n); n must be positive.
inline std::size_t uniform_index(std::mt19937_64& eng, std::size_t n) {
  return static_cast<std::size_t>(uniform01(eng) * static_cast<double>(n)) % n;
}

}  // namespace placebocil::rng
