#pragma once

#include <utility>

namespace onebit {

enum class LinkKind { logistic, probit };

/// Dithering model f mapping entry values to P(y = +1).
/// logistic: f(x) = e^x / (1 + e^x); probit: f(x) = Phi(x / sigma).
struct LinkFunction {
  LinkKind kind = LinkKind::logistic;
  double sigma = 1.0;       // probit scale; unused for logistic
  double clamp_eps = 1e-12; // f is reported within [eps, 1-eps]

  static LinkFunction Logistic();
  static LinkFunction Probit(double sigma);
};

/// Steepness/flatness constants of f on [-alpha, alpha].
/// For probit these are the standard upper bounds, not exact suprema.
struct LinkConstants {
  double alpha;
  double L;
  double beta;
  double U;
  bool is_upper_bound;
};

/// f clamped to [eps, 1-eps] and the exact derivative of the unclamped f.
std::pair<double, double> link_eval(const LinkFunction& link, double x);

LinkConstants link_constants(const LinkFunction& link, double alpha);

/// log f(x), evaluated through a stable tail path for probit, then clamped
/// to [log eps, log(1-eps)].  log(1 - f(x)) = log_link(-x) by symmetry.
double log_link(const LinkFunction& link, double x);

/// Numerically stable log Phi(z) (standard normal CDF).
double log_norm_cdf(double z);
double norm_cdf(double z);
double norm_pdf(double z);

}  // namespace onebit
