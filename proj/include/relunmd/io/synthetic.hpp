#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "relunmd/core/matrix.hpp"
#include "relunmd/core/rng.hpp"

namespace relunmd {

struct SyntheticSpec {
  Index m = 100;
  Index n = 100;
  Index r = 5;
  std::uint64_t seed = 1;

  void validate() const {
    if (m < 1 || n < 1) throw ParameterError("synthetic: dimensions must be positive");
    if (r < 1 || r > std::min(m, n)) throw ParameterError("synthetic: r must lie in [1, min(m, n)]");
  }
};

struct SyntheticInstance {
  Matrix x;       // max(0, w_true * h_true)
  Matrix w_true;  // m x r
  Matrix h_true;  // r x n
};

/// X = max(0, W H) with i.i.d. standard normal W, H from the data stream.
inline SyntheticInstance generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  Rng rng(spec.seed, Stream::data);
  SyntheticInstance out;
  out.w_true = rng.normal_matrix(spec.m, spec.r);
  out.h_true = rng.normal_matrix(spec.r, spec.n);
  out.x = relu(out.w_true * out.h_true);
  return out;
}

inline double zero_fraction(const Matrix& x) {
  return static_cast<double>((x.array() == 0.0).count()) / static_cast<double>(x.size());
}

/**
 * Sparse nonnegative dictionary: each entry is nonzero with probability
 * 1 - zero_prob, with value uniform in (0, 1].
 */
inline Matrix sparse_dictionary(Index m, Index n, double zero_prob, std::uint64_t seed) {
  Rng rng(seed, Stream::dictionary);
  Matrix u(m, n);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < n; ++j) {
      const double keep = rng.uniform();
      const double value = 1.0 - rng.uniform();
      u(i, j) = keep < zero_prob ? 0.0 : value;
    }
  return u;
}

/**
 * Stand-in for an image matrix when no IDX files are at hand: rows are
 * max(0, W H - t) for a rank `latent_rank` Gaussian product, with t set to the
 * empirical quantile that zeroes `zero_prob` of the entries, scaled to [0, 1].
 */
inline Matrix sparse_surrogate(Index m, Index n, Index latent_rank, double zero_prob, std::uint64_t seed) {
  Rng rng(seed, Stream::data);
  const Matrix w = rng.normal_matrix(m, latent_rank);
  const Matrix h = rng.normal_matrix(latent_rank, n);
  Matrix theta = w * h;
  std::vector<double> values(theta.data(), theta.data() + theta.size());
  const auto cut = static_cast<std::size_t>(zero_prob * static_cast<double>(values.size()));
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(cut), values.end());
  const double threshold = values[cut];
  Matrix x = (theta.array() - threshold).cwiseMax(0.0).matrix();
  const double top = x.maxCoeff();
  if (top > 0.0) x /= top;
  return x;
}

}  // namespace relunmd
