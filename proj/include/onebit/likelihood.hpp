#pragma once

#include "onebit/link.hpp"
#include "onebit/observation.hpp"
#include "onebit/tensor.hpp"

namespace onebit {

struct ObjectiveValue {
  double value = 0.0;
  std::vector<double> per_sample;  // empty unless requested
};

/// Per-sample loss g(x; y) = -log f(x) for y = +1, -log(1 - f(x)) for y = -1,
/// with f clamped so the value stays finite.
double sample_loss(double x, int y, const LinkFunction& link);

/// Negative log-likelihood of the observations at the expanded factor set,
/// summed over samples (duplicates count with multiplicity).
ObjectiveValue nll(const CpFactorSet& factors, const ObservationSet& obs,
                   const LinkFunction& link, bool keep_per_sample = false);

/// d/dx of sample_loss: -f'(x)/f(x) for y = +1, f'(x)/(1-f(x)) for y = -1.
double nll_grad_entry(double x, int y, const LinkFunction& link);

/// Gradient of nll with respect to factor j, other factors held fixed.
MatrixXd nll_grad_factor(const CpFactorSet& factors, const ObservationSet& obs,
                         const LinkFunction& link, int mode);

}  // namespace onebit
