#pragma once

#include "onebit/link.hpp"
#include "onebit/observation.hpp"
#include "onebit/tensor.hpp"

namespace onebit {

/// Constants appearing in the error-bound formulas.  The absolute constants
/// are unspecified in the analysis and default to 1; the resulting values are
/// shape-only sanity curves, not certified bounds.
struct BoundConstants {
  double c1 = 0.89;
  double c2 = 1.41;
  double c_max = 1.0;
  double c_m = 1.0;
  double c0 = 1.0;
  double c1_lower = 1.0;
  double c2_lower = 1.0;

  double grothendieck() const { return c1 * c2 * c2; }
};

/// ||estimate - truth||_F^2 / ||truth||_F^2
double rse(const DenseTensor& estimate, const DenseTensor& truth);

/// One held-out test point: index, true value.
struct TruthSample {
  TensorIndex index;
  double value;
};

/// Fraction of test points whose side of the threshold is predicted
/// correctly; values equal to the threshold are predicted as +.
double sign_accuracy(const DenseTensor& estimate, const std::vector<TruthSample>& test,
                     double threshold);

double mae(const DenseTensor& estimate, const std::vector<TruthSample>& test);

/// sum_omega pi_omega (estimate(omega) - truth(omega))^2
double pi_weighted_mse(const DenseTensor& estimate, const DenseTensor& truth,
                       const SamplingDistribution& pi);

/// Squared Hellinger distance between probability tensors, averaged over
/// entries.  Entries must lie in [0, 1].
double hellinger_sq(const DenseTensor& p, const DenseTensor& q);

/// Entrywise KL divergence averaged over entries; q is clamped away from
/// {0, 1}.
double kl_div(const DenseTensor& p, const DenseTensor& q);

double hellinger_sq_scalar(double p, double q);
double kl_div_scalar(double p, double q);

struct RankNormBounds {
  double max_qnorm_ub;  // r^((d^2-d)/2) * alpha
  double m_norm_ub;     // (r*sqrt(r))^(d-1) * alpha
};
RankNormBounds rank_norm_bounds(int r, int d, double alpha);

enum class BoundKind { max_qnorm, m_norm };

/// Right-hand side of the recovery error bound:
/// C * beta * { L * R * sqrt(dN/m) + U * sqrt(log(4/delta)/m) }
/// with C = c_max * c2^d for the max-qnorm variant and c_m for the M-norm one.
double theorem1_rhs(BoundKind kind, const BoundConstants& consts,
                    const LinkConstants& link_consts, double r_bound, int d,
                    int n, std::int64_t m, double delta);

struct RademacherBounds {
  double m_norm_ball;      // 6 * sqrt(dN/m)
  double max_qnorm_ball;   // 6 * c1 * c2^d * sqrt(dN/m)
};
RademacherBounds rademacher_bounds(int d, int n, std::int64_t m,
                                   const BoundConstants& consts);

}  // namespace onebit
