#include "ipca/kernel.hpp"

#include "kernel_detail.hpp"

#include <omp.h>

#include <cmath>
#include <string>

namespace ipca {

void KernelParams::validate() const {
  if (degree < 1) throw ConfigError("kernel degree must be >= 1");
  if (dim < 1) throw ConfigError("ambient dimension must be >= 1");
  if (!(theta > 0.0) || !std::isfinite(theta)) throw ConfigError("theta must be positive and finite");
}

void Dataset::validate() const {
  if (!points.allFinite()) throw Error("dataset contains non-finite entries");
  if (labels && static_cast<Index>(labels->size()) != points.rows()) {
    throw Error("dataset has " + std::to_string(points.rows()) + " rows but " +
                std::to_string(labels->size()) + " labels");
  }
}

double kernel_eval(std::span<const double> x, std::span<const double> y, const KernelParams& params) {
  if (x.size() != y.size() || x.size() != static_cast<std::size_t>(params.dim)) {
    throw DimensionError("kernel_eval: dimension mismatch");
  }
  return detail::kernel_entry(x.data(), y.data(), params.dim, params.theta, params.degree);
}

Vector feature_map(std::span<const double> x, const FeatureBasis& basis) {
  return basis.gammas().cwiseProduct(basis.monomials(x));
}

Matrix feature_matrix(const Matrix& X, const FeatureBasis& basis) {
  Matrix F(X.rows(), basis.size());
  for (Index i = 0; i < X.rows(); ++i) {
    std::span<const double> row(X.data() + i * X.cols(), static_cast<std::size_t>(X.cols()));
    F.row(i) = feature_map(row, basis).transpose();
  }
  return F;
}

Matrix cross_kernel_matrix(const Matrix& X, const Matrix& Z, const KernelParams& params) {
  detail::check_same_dim(X, Z, params);
  const Index N = X.rows();
  const Index M = Z.rows();
  const Index n = X.cols();
  Matrix K(N, M);
  const double* xs = X.data();
  const double* zs = Z.data();
  double* out = K.data();
#pragma omp parallel for schedule(static) if (N * M > 4096)
  for (Index i = 0; i < N; ++i) {
    for (Index j = 0; j < M; ++j) {
      out[i * M + j] = detail::kernel_entry(xs + i * n, zs + j * n, n, params.theta, params.degree);
    }
  }
  return K;
}

Matrix kernel_matrix(const Matrix& X, const KernelParams& params) {
  detail::check_same_dim(X, X, params);
  const Index N = X.rows();
  const Index n = X.cols();
  Matrix K(N, N);
  const double* xs = X.data();
  double* out = K.data();
#pragma omp parallel for schedule(dynamic, 16) if (N * N > 8192)
  for (Index i = 0; i < N; ++i) {
    for (Index j = i; j < N; ++j) {
      const double v = detail::kernel_entry(xs + i * n, xs + j * n, n, params.theta, params.degree);
      out[i * N + j] = v;
      out[j * N + i] = v;
    }
  }
  return K;
}

RowVector kernel_row(std::span<const double> x, const Matrix& Z, const KernelParams& params) {
  if (x.size() != static_cast<std::size_t>(Z.cols()) || Z.cols() != params.dim) {
    throw DimensionError("kernel_row: point has " + std::to_string(x.size()) +
                         " coordinates, expected " + std::to_string(params.dim));
  }
  const Index n = Z.cols();
  RowVector r(Z.rows());
  for (Index j = 0; j < Z.rows(); ++j) {
    r[j] = detail::kernel_entry(x.data(), Z.data() + j * n, n, params.theta, params.degree);
  }
  return r;
}

int max_threads() { return omp_get_max_threads(); }

void set_max_threads(int n) {
  if (n > 0) omp_set_num_threads(n);
}

}  // namespace ipca
