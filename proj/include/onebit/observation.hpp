#pragma once

#include <cstdint>
#include <optional>
#include <random>

#include "onebit/link.hpp"
#include "onebit/tensor.hpp"

namespace onebit {

using Rng = std::mt19937_64;

/// Sampling distribution Pi = {pi_omega}; either uniform or an explicit
/// nonnegative weight per entry (in linear order) summing to 1.
struct SamplingDistribution {
  Shape shape;
  bool uniform = true;
  VectorXd weights;  // empty when uniform

  static SamplingDistribution Uniform(Shape shape);
  static SamplingDistribution Weighted(Shape shape, VectorXd weights);
};

/// m sampled (index, sign) pairs; duplicates retained with multiplicity.
struct ObservationSet {
  Shape shape;
  Eigen::MatrixXi indices;  // m x d, 0-based
  Eigen::VectorXi signs;    // entries in {-1, +1}

  std::int64_t count() const { return indices.rows(); }
  ObservationSet subset(const std::vector<std::int64_t>& which) const;
};

/// m i.i.d. draws from Pi with replacement; deterministic for a fixed seed.
std::vector<TensorIndex> sample_indices(const SamplingDistribution& pi,
                                        std::int64_t m, std::uint64_t seed);

/// 1-bit measurements of T at the given indices.  With a link, y = +1 with
/// probability f(T(omega)); without, y = sign(T(omega)) and sign(0) = +1.
ObservationSet quantize(const DenseTensor& t,
                        const std::vector<TensorIndex>& indices,
                        const std::optional<LinkFunction>& link,
                        std::uint64_t seed);

}  // namespace onebit
