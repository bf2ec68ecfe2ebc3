#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "relunmd/core/matrix.hpp"

namespace relunmd {

/// Named sub-streams derived from one user seed. Data and init draws never
/// share a stream, so "same seed for data and init" does not make the init
/// equal to the generating factors.
enum class Stream : std::uint64_t {
  data = 0,
  init = 1,
  subsample = 2,
  sketch = 3,
  dictionary = 4,
};

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/**
 * Seedable generator with fixed stream semantics:
 *  - engine: std::mt19937_64 seeded with splitmix64(seed, stream);
 *  - uniform(): top 53 bits of one engine output, in [0, 1);
 *  - normal(): Box-Muller on two uniforms, the second variate of each pair is
 *    cached and returned by the next call;
 *  - normal_matrix(): filled row by row.
 * The output sequence depends only on (seed, stream).
 */
class Rng {
 public:
  explicit Rng(std::uint64_t seed, Stream stream = Stream::data) {
    std::uint64_t state = seed ^ (static_cast<std::uint64_t>(stream) * 0xD1B54A32D192ED03ULL);
    engine_.seed(splitmix64(state));
  }

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    // u1 in (0, 1] keeps log finite.
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  Matrix normal_matrix(Index rows, Index cols) {
    Matrix out(rows, cols);
    for (Index i = 0; i < rows; ++i)
      for (Index j = 0; j < cols; ++j) out(i, j) = normal();
    return out;
  }

  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound) {
    return static_cast<std::uint64_t>(uniform() * static_cast<double>(bound)) % bound;
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace relunmd
