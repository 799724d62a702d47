#include "onebit/observation.hpp"

#include <cmath>
#include <stdexcept>

namespace onebit {

SamplingDistribution SamplingDistribution::Uniform(Shape shape) {
  SamplingDistribution pi;
  pi.shape = std::move(shape);
  pi.uniform = true;
  return pi;
}

SamplingDistribution SamplingDistribution::Weighted(Shape shape, VectorXd weights) {
  SamplingDistribution pi;
  pi.shape = std::move(shape);
  pi.uniform = false;
  if (weights.size() != pi.shape.size())
    throw std::invalid_argument("sampling weights: size mismatch");
  if ((weights.array() < 0.0).any())
    throw std::invalid_argument("sampling weights must be nonnegative");
  if (std::abs(weights.sum() - 1.0) > 1e-9)
    throw std::invalid_argument("sampling weights must sum to 1");
  pi.weights = std::move(weights);
  return pi;
}

ObservationSet ObservationSet::subset(const std::vector<std::int64_t>& which) const {
  ObservationSet out;
  out.shape = shape;
  out.indices.resize(which.size(), indices.cols());
  out.signs.resize(which.size());
  for (std::size_t i = 0; i < which.size(); ++i) {
    out.indices.row(i) = indices.row(which[i]);
    out.signs[i] = signs[which[i]];
  }
  return out;
}

std::vector<TensorIndex> sample_indices(const SamplingDistribution& pi,
                                        std::int64_t m, std::uint64_t seed) {
  if (m < 1) throw std::invalid_argument("sample_indices: m must be positive");
  Rng rng(seed);
  std::vector<TensorIndex> out;
  out.reserve(m);
  if (pi.uniform) {
    std::uniform_int_distribution<std::int64_t> dist(0, pi.shape.size() - 1);
    for (std::int64_t i = 0; i < m; ++i) out.push_back(pi.shape.index(dist(rng)));
  } else {
    std::discrete_distribution<std::int64_t> dist(pi.weights.data(),
                                                  pi.weights.data() + pi.weights.size());
    for (std::int64_t i = 0; i < m; ++i) out.push_back(pi.shape.index(dist(rng)));
  }
  return out;
}

ObservationSet quantize(const DenseTensor& t,
                        const std::vector<TensorIndex>& indices,
                        const std::optional<LinkFunction>& link,
                        std::uint64_t seed) {
  const int d = t.shape().order();
  ObservationSet obs;
  obs.shape = t.shape();
  obs.indices.resize(indices.size(), d);
  obs.signs.resize(indices.size());
  Rng rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (std::size_t s = 0; s < indices.size(); ++s) {
    if (!t.shape().contains(indices[s]))
      throw std::out_of_range("quantize: index out of range");
    for (int j = 0; j < d; ++j) obs.indices(s, j) = indices[s][j];
    const double x = t(indices[s]);
    if (link) {
      const double f = link_eval(*link, x).first;
      obs.signs[s] = unif(rng) < f ? 1 : -1;
    } else {
      obs.signs[s] = x >= 0.0 ? 1 : -1;
    }
  }
  return obs;
}

}  // namespace onebit
