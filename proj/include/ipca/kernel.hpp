#pragma once

#include "ipca/basis.hpp"
#include "ipca/types.hpp"

#include <optional>
#include <span>
#include <vector>

namespace ipca {

/// One instance of k(x, y) = (theta <x, y> + 1)^d on R^n.
struct KernelParams {
  int degree = 2;
  double theta = 1.0;
  int dim = 2;

  void validate() const;
  FeatureBasis basis() const { return FeatureBasis(dim, degree, theta); }

  friend bool operator==(const KernelParams&, const KernelParams&) = default;
};

/// Rows of `points` are samples; labels, when present, align with rows.
struct Dataset {
  Matrix points;
  std::optional<std::vector<int>> labels;

  Index rows() const { return points.rows(); }
  Index dim() const { return points.cols(); }
  std::span<const double> row(Index i) const {
    return {points.data() + i * points.cols(), static_cast<std::size_t>(points.cols())};
  }

  /// Throws DimensionError / Error when entries are non-finite or labels mis-sized.
  void validate() const;
};

double kernel_eval(std::span<const double> x, std::span<const double> y, const KernelParams& params);

/// (gamma_alpha x^alpha) in basis order. Test oracle for the closed-form kernel.
Vector feature_map(std::span<const double> x, const FeatureBasis& basis);

/// Rows are feature_map images of the rows of X.
Matrix feature_matrix(const Matrix& X, const FeatureBasis& basis);

/// (k(x_i, z_j))_{ij}. Rows assembled in parallel; every entry is evaluated
/// with the same operation order as kernel_eval, so the result does not
/// depend on the thread count.
Matrix cross_kernel_matrix(const Matrix& X, const Matrix& Z, const KernelParams& params);

/// cross_kernel_matrix(X, X), filling the upper triangle and mirroring.
Matrix kernel_matrix(const Matrix& X, const KernelParams& params);

/// (k(x, z_j))_j for one point.
RowVector kernel_row(std::span<const double> x, const Matrix& Z, const KernelParams& params);

namespace serial {

// Single-threaded references for the parallel assembly above.
Matrix cross_kernel_matrix(const Matrix& X, const Matrix& Z, const KernelParams& params);
Matrix kernel_matrix(const Matrix& X, const KernelParams& params);

}  // namespace serial

/// Number of OpenMP threads the parallel kernels will use.
int max_threads();
/// Caps the OpenMP thread count; n <= 0 leaves the runtime default.
void set_max_threads(int n);

}  // namespace ipca
