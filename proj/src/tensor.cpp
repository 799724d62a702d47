#include "onebit/tensor.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace onebit {

Shape::Shape(std::vector<int> d) : dims(std::move(d)) {
  if (dims.size() < 2) throw std::invalid_argument("shape: order must be >= 2");
  std::int64_t total = 1;
  for (int n : dims) {
    if (n < 1) throw std::invalid_argument("shape: dims must be positive");
    if (total > std::numeric_limits<std::int64_t>::max() / n)
      throw std::invalid_argument("shape: total size overflows");
    total *= n;
  }
}

std::int64_t Shape::size() const {
  std::int64_t total = 1;
  for (int n : dims) total *= n;
  return total;
}

std::int64_t Shape::offset(const TensorIndex& idx) const {
  if (static_cast<int>(idx.size()) != order())
    throw std::invalid_argument("index order mismatch");
  std::int64_t off = 0, stride = 1;
  for (int j = 0; j < order(); ++j) {
    if (idx[j] < 0 || idx[j] >= dims[j])
      throw std::out_of_range("tensor index out of range");
    off += stride * idx[j];
    stride *= dims[j];
  }
  return off;
}

TensorIndex Shape::index(std::int64_t off) const {
  TensorIndex idx(order());
  for (int j = 0; j < order(); ++j) {
    idx[j] = static_cast<int>(off % dims[j]);
    off /= dims[j];
  }
  return idx;
}

bool Shape::contains(const TensorIndex& idx) const {
  if (static_cast<int>(idx.size()) != order()) return false;
  for (int j = 0; j < order(); ++j)
    if (idx[j] < 0 || idx[j] >= dims[j]) return false;
  return true;
}

DenseTensor::DenseTensor(Shape shape)
    : shape_(std::move(shape)), data_(VectorXd::Zero(shape_.size())) {}

DenseTensor::DenseTensor(Shape shape, VectorXd entries)
    : shape_(std::move(shape)), data_(std::move(entries)) {
  if (data_.size() != shape_.size())
    throw std::invalid_argument("entry count does not match shape");
  if (!data_.allFinite())
    throw std::invalid_argument("tensor entries must be finite");
}

CpFactorSet::CpFactorSet(std::vector<MatrixXd> factors)
    : factors_(std::move(factors)) {
  if (factors_.size() < 2)
    throw std::invalid_argument("factor set: need at least 2 factors");
  const auto k = factors_[0].cols();
  for (const auto& f : factors_) {
    if (f.cols() != k)
      throw std::invalid_argument("factor set: mismatched column counts");
    if (!f.allFinite())
      throw std::invalid_argument("factor set: entries must be finite");
  }
}

Shape CpFactorSet::shape() const {
  std::vector<int> dims;
  dims.reserve(factors_.size());
  for (const auto& f : factors_) dims.push_back(static_cast<int>(f.rows()));
  return Shape(dims);
}

DenseTensor cp_expand(const CpFactorSet& factors) {
  const Shape shape = factors.shape();
  const int d = factors.order();
  const int k = factors.rank();
  DenseTensor out(shape);
  TensorIndex idx(d, 0);
  Eigen::RowVectorXd prod(k);
  for (std::int64_t off = 0; off < shape.size(); ++off) {
    prod = factors.factor(0).row(idx[0]);
    for (int j = 1; j < d; ++j)
      prod = prod.cwiseProduct(factors.factor(j).row(idx[j]));
    out.data()[off] = prod.sum();
    for (int j = 0; j < d; ++j) {  // odometer, first mode fastest
      if (++idx[j] < shape.dims[j]) break;
      idx[j] = 0;
    }
  }
  return out;
}

double cp_eval_entry(const CpFactorSet& factors, const TensorIndex& idx) {
  const Shape shape = factors.shape();
  if (!shape.contains(idx)) throw std::out_of_range("cp_eval_entry: index out of range");
  const int d = factors.order();
  Eigen::RowVectorXd prod = factors.factor(0).row(idx[0]);
  for (int j = 1; j < d; ++j)
    prod = prod.cwiseProduct(factors.factor(j).row(idx[j]));
  return prod.sum();
}

ModeSplit::ModeSplit(Shape s, std::vector<int> rows)
    : shape(std::move(s)), row_modes(std::move(rows)) {
  const int d = shape.order();
  if (row_modes.empty() || static_cast<int>(row_modes.size()) >= d)
    throw std::invalid_argument("row_modes must be a nonempty proper subset");
  std::vector<bool> used(d, false);
  for (int m : row_modes) {
    if (m < 0 || m >= d || used[m])
      throw std::invalid_argument("row_modes: invalid or repeated mode");
    used[m] = true;
  }
  for (int j = 0; j < d; ++j)
    if (!used[j]) col_modes.push_back(j);
}

std::int64_t ModeSplit::row_count() const {
  std::int64_t n = 1;
  for (int m : row_modes) n *= shape.dims[m];
  return n;
}

std::int64_t ModeSplit::col_count() const {
  std::int64_t n = 1;
  for (int m : col_modes) n *= shape.dims[m];
  return n;
}

std::pair<std::int64_t, std::int64_t> ModeSplit::to_matrix(const TensorIndex& idx) const {
  // lexicographic: the first listed mode is the most significant digit
  std::int64_t r = 0;
  for (int m : row_modes) r = r * shape.dims[m] + idx[m];
  std::int64_t c = 0;
  for (int m : col_modes) c = c * shape.dims[m] + idx[m];
  return {r, c};
}

TensorIndex ModeSplit::to_tensor(std::int64_t r, std::int64_t c) const {
  TensorIndex idx(shape.order());
  for (auto it = row_modes.rbegin(); it != row_modes.rend(); ++it) {
    idx[*it] = static_cast<int>(r % shape.dims[*it]);
    r /= shape.dims[*it];
  }
  for (auto it = col_modes.rbegin(); it != col_modes.rend(); ++it) {
    idx[*it] = static_cast<int>(c % shape.dims[*it]);
    c /= shape.dims[*it];
  }
  return idx;
}

DenseTensor matricize(const DenseTensor& t, const std::vector<int>& row_modes) {
  ModeSplit split(t.shape(), row_modes);
  const std::int64_t rows = split.row_count();
  const std::int64_t cols = split.col_count();
  DenseTensor out(Shape({static_cast<int>(rows), static_cast<int>(cols)}));
  for (std::int64_t off = 0; off < t.shape().size(); ++off) {
    const TensorIndex idx = t.shape().index(off);
    auto [r, c] = split.to_matrix(idx);
    out.data()[r + rows * c] = t.data()[off];
  }
  return out;
}

double frobenius_norm(const DenseTensor& t) { return t.data().norm(); }

double infinity_norm(const DenseTensor& t) {
  return t.data().size() == 0 ? 0.0 : t.data().cwiseAbs().maxCoeff();
}

double factor_max_qnorm(const CpFactorSet& factors) {
  double prod = 1.0;
  for (const auto& f : factors.factors())
    prod *= f.rowwise().norm().maxCoeff();
  return prod;
}

}  // namespace onebit
