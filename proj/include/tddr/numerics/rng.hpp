#pragma once

#include <cstdint>
#include <random>

#include "tddr/numerics/matrix.hpp"

namespace tddr {

// Seeded random source with a platform-independent draw sequence.
//
// The engine is mt19937_64, whose output is fixed by the standard. All
// distributions are implemented here rather than taken from <random>, whose
// distribution algorithms are implementation-defined.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 bits of resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n), unbiased (rejection on the top range).
  std::size_t index(std::size_t n);

  // Standard normal via the Marsaglia polar method; the spare is cached.
  double normal();

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  bool operator==(const SeededRng& other) const {
    return engine_ == other.engine_ && has_spare_ == other.has_spare_ &&
           (!has_spare_ || spare_ == other.spare_);
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// splitmix64 finalizer; used to derive independent stream seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

inline SeededRng derive_rng(std::uint64_t seed, std::uint64_t stream) {
  return SeededRng(mix_seed(seed, stream));
}

// Each component drawn from N(0, sigma) and clipped to [-clip, clip].
Vec sample_clipped_gaussian(SeededRng& rng, double sigma, double clip, std::size_t dim);

}  // namespace tddr
