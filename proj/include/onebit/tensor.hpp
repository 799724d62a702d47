#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace onebit {

using MatrixXd = Eigen::MatrixXd;
using VectorXd = Eigen::VectorXd;

/// Tensor index, 0-based, one entry per mode.
using TensorIndex = std::vector<int>;

/// Dimensions (N_1,...,N_d) of an order-d tensor, d >= 2.
struct Shape {
  std::vector<int> dims;

  Shape() = default;
  explicit Shape(std::vector<int> d);

  int order() const { return static_cast<int>(dims.size()); }
  std::int64_t size() const;

  /// Linear offset of an index; the first mode varies fastest.
  std::int64_t offset(const TensorIndex& idx) const;
  TensorIndex index(std::int64_t off) const;

  bool contains(const TensorIndex& idx) const;
  bool operator==(const Shape& o) const { return dims == o.dims; }
};

/// Dense order-d tensor stored as a flat array in first-index-fastest order.
class DenseTensor {
 public:
  DenseTensor() = default;
  explicit DenseTensor(Shape shape);
  DenseTensor(Shape shape, VectorXd entries);

  const Shape& shape() const { return shape_; }
  VectorXd& data() { return data_; }
  const VectorXd& data() const { return data_; }

  double operator()(const TensorIndex& idx) const {
    return data_[shape_.offset(idx)];
  }
  double& operator()(const TensorIndex& idx) {
    return data_[shape_.offset(idx)];
  }

 private:
  Shape shape_;
  VectorXd data_;
};

/// CP factor matrices V_1,...,V_d; factor j is N_j x k with a shared k.
class CpFactorSet {
 public:
  CpFactorSet() = default;
  explicit CpFactorSet(std::vector<MatrixXd> factors);

  int order() const { return static_cast<int>(factors_.size()); }
  int rank() const { return factors_.empty() ? 0 : static_cast<int>(factors_[0].cols()); }
  Shape shape() const;

  const MatrixXd& factor(int j) const { return factors_[j]; }
  MatrixXd& factor(int j) { return factors_[j]; }
  const std::vector<MatrixXd>& factors() const { return factors_; }

 private:
  std::vector<MatrixXd> factors_;
};

/// T(i_1,...,i_d) = sum_c prod_j V_j(i_j, c), materialized.
DenseTensor cp_expand(const CpFactorSet& factors);

/// Single entry of the expanded tensor without materializing it.
double cp_eval_entry(const CpFactorSet& factors, const TensorIndex& idx);

/// Maps a tensor index to (row, col) of an unfolding and back.
/// Rows are indexed lexicographically by row_modes in listed order (first
/// listed most significant), columns by the remaining modes in increasing
/// order under the same convention.
struct ModeSplit {
  Shape shape;
  std::vector<int> row_modes;
  std::vector<int> col_modes;

  ModeSplit(Shape s, std::vector<int> rows);

  std::int64_t row_count() const;
  std::int64_t col_count() const;
  std::pair<std::int64_t, std::int64_t> to_matrix(const TensorIndex& idx) const;
  TensorIndex to_tensor(std::int64_t r, std::int64_t c) const;
};

DenseTensor matricize(const DenseTensor& t, const std::vector<int>& row_modes);

double frobenius_norm(const DenseTensor& t);
double infinity_norm(const DenseTensor& t);

/// Product over factors of the maximum row l2 norm; upper-bounds the
/// max-qnorm of the expanded tensor at this factorization.
double factor_max_qnorm(const CpFactorSet& factors);

}  // namespace onebit
