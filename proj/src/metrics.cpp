#include "onebit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace onebit {

double rse(const DenseTensor& estimate, const DenseTensor& truth) {
  if (!(estimate.shape() == truth.shape()))
    throw std::invalid_argument("rse: shape mismatch");
  const double denom = truth.data().squaredNorm();
  if (denom == 0.0) throw std::invalid_argument("rse: zero ground truth");
  return (estimate.data() - truth.data()).squaredNorm() / denom;
}

double sign_accuracy(const DenseTensor& estimate, const std::vector<TruthSample>& test,
                     double threshold) {
  if (test.empty()) throw std::invalid_argument("sign_accuracy: empty test set");
  auto side = [threshold](double v) { return v >= threshold ? 1 : -1; };
  std::int64_t correct = 0;
  for (const auto& t : test)
    if (side(estimate(t.index)) == side(t.value)) ++correct;
  return static_cast<double>(correct) / static_cast<double>(test.size());
}

double mae(const DenseTensor& estimate, const std::vector<TruthSample>& test) {
  if (test.empty()) throw std::invalid_argument("mae: empty test set");
  double total = 0.0;
  for (const auto& t : test) total += std::abs(estimate(t.index) - t.value);
  return total / static_cast<double>(test.size());
}

double pi_weighted_mse(const DenseTensor& estimate, const DenseTensor& truth,
                       const SamplingDistribution& pi) {
  if (!(estimate.shape() == truth.shape()) || !(pi.shape == truth.shape()))
    throw std::invalid_argument("pi_weighted_mse: shape mismatch");
  const VectorXd diff2 = (estimate.data() - truth.data()).array().square();
  if (pi.uniform) return diff2.sum() / static_cast<double>(truth.shape().size());
  return pi.weights.dot(diff2);
}

double hellinger_sq_scalar(double p, double q) {
  const double a = std::sqrt(p) - std::sqrt(q);
  const double b = std::sqrt(1.0 - p) - std::sqrt(1.0 - q);
  return a * a + b * b;
}

double kl_div_scalar(double p, double q) {
  constexpr double eps = 1e-12;
  q = std::clamp(q, eps, 1.0 - eps);
  double out = 0.0;
  if (p > 0.0) out += p * std::log(p / q);
  if (p < 1.0) out += (1.0 - p) * std::log((1.0 - p) / (1.0 - q));
  return out;
}

namespace {
void check_prob_tensor(const DenseTensor& t, const char* what) {
  if ((t.data().array() < 0.0).any() || (t.data().array() > 1.0).any())
    throw std::invalid_argument(std::string(what) + ": entries must lie in [0, 1]");
}
}  // namespace

double hellinger_sq(const DenseTensor& p, const DenseTensor& q) {
  if (!(p.shape() == q.shape())) throw std::invalid_argument("hellinger_sq: shape mismatch");
  check_prob_tensor(p, "hellinger_sq");
  check_prob_tensor(q, "hellinger_sq");
  double total = 0.0;
  for (Eigen::Index i = 0; i < p.data().size(); ++i)
    total += hellinger_sq_scalar(p.data()[i], q.data()[i]);
  return total / static_cast<double>(p.shape().size());
}

double kl_div(const DenseTensor& p, const DenseTensor& q) {
  if (!(p.shape() == q.shape())) throw std::invalid_argument("kl_div: shape mismatch");
  check_prob_tensor(p, "kl_div");
  check_prob_tensor(q, "kl_div");
  double total = 0.0;
  for (Eigen::Index i = 0; i < p.data().size(); ++i)
    total += kl_div_scalar(p.data()[i], q.data()[i]);
  return total / static_cast<double>(p.shape().size());
}

RankNormBounds rank_norm_bounds(int r, int d, double alpha) {
  if (r < 1 || d < 2 || !(alpha > 0.0))
    throw std::invalid_argument("rank_norm_bounds: invalid arguments");
  const double rd = static_cast<double>(r);
  return RankNormBounds{
      std::pow(rd, static_cast<double>(d) * (d - 1) / 2.0) * alpha,
      std::pow(rd * std::sqrt(rd), d - 1) * alpha};
}

double theorem1_rhs(BoundKind kind, const BoundConstants& consts,
                    const LinkConstants& link_consts, double r_bound, int d,
                    int n, std::int64_t m, double delta) {
  if (!(r_bound > 0.0) || d < 2 || n < 1 || m < 1 || !(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("theorem1_rhs: invalid arguments");
  const double c = kind == BoundKind::max_qnorm
                       ? consts.c_max * std::pow(consts.c2, d)
                       : consts.c_m;
  const double md = static_cast<double>(m);
  return c * link_consts.beta *
         (link_consts.L * r_bound * std::sqrt(static_cast<double>(d) * n / md) +
          link_consts.U * std::sqrt(std::log(4.0 / delta) / md));
}

RademacherBounds rademacher_bounds(int d, int n, std::int64_t m,
                                   const BoundConstants& consts) {
  if (d < 2 || n < 1 || m < 1)
    throw std::invalid_argument("rademacher_bounds: invalid arguments");
  const double base = 6.0 * std::sqrt(static_cast<double>(d) * n / static_cast<double>(m));
  return RademacherBounds{base, base * consts.c1 * std::pow(consts.c2, d)};
}

}  // namespace onebit
