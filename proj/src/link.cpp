#include "onebit/link.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace onebit {

namespace {
constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kLog2Pi = 1.8378770664093453;
}  // namespace

LinkFunction LinkFunction::Logistic() { return LinkFunction{LinkKind::logistic, 1.0, 1e-12}; }

LinkFunction LinkFunction::Probit(double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("probit: sigma must be positive");
  return LinkFunction{LinkKind::probit, sigma, 1e-12};
}

double norm_cdf(double z) { return 0.5 * std::erfc(-z / kSqrt2); }

double norm_pdf(double z) { return std::exp(-0.5 * (kLog2Pi + z * z)); }

double log_norm_cdf(double z) {
  if (z > -6.0) return std::log(norm_cdf(z));
  // far tail: Phi(z) ~ phi(z)/(-z) * (1 - 1/z^2 + 3/z^4 - 15/z^6)
  const double z2 = z * z;
  const double series = -1.0 / z2 + 3.0 / (z2 * z2) - 15.0 / (z2 * z2 * z2);
  return -0.5 * (kLog2Pi + z2) - std::log(-z) + std::log1p(series);
}

std::pair<double, double> link_eval(const LinkFunction& link, double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("link_eval: x must be finite");
  double f, fp;
  if (link.kind == LinkKind::logistic) {
    // 1/(1+e^-x), stable on both sides
    f = x >= 0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
    fp = f * (1.0 - f);
  } else {
    const double z = x / link.sigma;
    f = norm_cdf(z);
    fp = norm_pdf(z) / link.sigma;
  }
  f = std::clamp(f, link.clamp_eps, 1.0 - link.clamp_eps);
  return {f, fp};
}

double log_link(const LinkFunction& link, double x) {
  double lf;
  if (link.kind == LinkKind::logistic) {
    lf = x >= 0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x));
  } else {
    lf = log_norm_cdf(x / link.sigma);
  }
  return std::clamp(lf, std::log(link.clamp_eps), std::log1p(-link.clamp_eps));
}

LinkConstants link_constants(const LinkFunction& link, double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("link_constants: alpha must be positive");
  LinkConstants c{};
  c.alpha = alpha;
  if (link.kind == LinkKind::logistic) {
    const double ea = std::exp(alpha);
    c.L = 1.0;
    c.beta = (1.0 + ea) * (1.0 + ea) / ea;
    c.U = 2.0 * std::log(std::exp(alpha / 2.0) + std::exp(-alpha / 2.0));
    c.is_upper_bound = false;
  } else {
    const double s = link.sigma;
    c.L = (4.0 / s) * (alpha / s + 1.0);
    c.beta = M_PI * s * s * std::exp(alpha * alpha / (2.0 * s * s));
    c.U = (alpha / s + 1.0) * (alpha / s + 1.0);
    c.is_upper_bound = true;
  }
  return c;
}

}  // namespace onebit
