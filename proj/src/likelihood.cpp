#include "onebit/likelihood.hpp"

#include <cmath>
#include <stdexcept>

namespace onebit {

double sample_loss(double x, int y, const LinkFunction& link) {
  return y > 0 ? -log_link(link, x) : -log_link(link, -x);
}

double nll_grad_entry(double x, int y, const LinkFunction& link) {
  if (link.kind == LinkKind::logistic) {
    // f' = f(1-f), so -f'/f = -(1-f) and f'/(1-f) = f
    const auto [f, fp] = link_eval(link, x);
    (void)fp;
    return y > 0 ? -(1.0 - f) : f;
  }
  const double z = x / link.sigma;
  const double log_pdf = std::log(norm_pdf(z));
  // ratio against the clamped CDF keeps the gradient consistent with the
  // clamped objective in the far tail
  if (y > 0) return -std::exp(log_pdf - log_link(link, x)) / link.sigma;
  return std::exp(log_pdf - log_link(link, -x)) / link.sigma;
}

ObjectiveValue nll(const CpFactorSet& factors, const ObservationSet& obs,
                   const LinkFunction& link, bool keep_per_sample) {
  if (!(factors.shape() == obs.shape))
    throw std::invalid_argument("nll: factor shape does not match observations");
  const int d = factors.order();
  ObjectiveValue out;
  if (keep_per_sample) out.per_sample.reserve(obs.count());
  TensorIndex idx(d);
  for (std::int64_t s = 0; s < obs.count(); ++s) {
    for (int j = 0; j < d; ++j) idx[j] = obs.indices(s, j);
    const double g = sample_loss(cp_eval_entry(factors, idx), obs.signs[s], link);
    out.value += g;
    if (keep_per_sample) out.per_sample.push_back(g);
  }
  return out;
}

MatrixXd nll_grad_factor(const CpFactorSet& factors, const ObservationSet& obs,
                         const LinkFunction& link, int mode) {
  const int d = factors.order();
  if (mode < 0 || mode >= d) throw std::invalid_argument("nll_grad_factor: bad mode");
  if (!(factors.shape() == obs.shape))
    throw std::invalid_argument("nll_grad_factor: shape mismatch");
  const int k = factors.rank();
  MatrixXd grad = MatrixXd::Zero(factors.factor(mode).rows(), k);
  Eigen::RowVectorXd partner(k);
  for (std::int64_t s = 0; s < obs.count(); ++s) {
    partner.setOnes();
    for (int j = 0; j < d; ++j)
      if (j != mode)
        partner = partner.cwiseProduct(factors.factor(j).row(obs.indices(s, j)));
    const int i = obs.indices(s, mode);
    const double x = factors.factor(mode).row(i).dot(partner);
    grad.row(i) += nll_grad_entry(x, obs.signs[s], link) * partner;
  }
  return grad;
}

}  // namespace onebit
