#pragma once

#include "ipca/kernel.hpp"

namespace ipca::detail {

// Shared by the parallel and serial paths so both produce identical bits.
inline double kernel_entry(const double* x, const double* y, Index n, double theta, int degree) {
  double dot = 0.0;
  for (Index k = 0; k < n; ++k) dot += x[k] * y[k];
  double base = theta * dot + 1.0;
  double r = 1.0;
  int e = degree;
  while (e > 0) {
    if (e & 1) r *= base;
    base *= base;
    e >>= 1;
  }
  return r;
}

inline void check_same_dim(const Matrix& X, const Matrix& Z, const KernelParams& params) {
  if (X.cols() != Z.cols() || X.cols() != params.dim) {
    throw DimensionError("kernel matrix: point dimensions " + std::to_string(X.cols()) + " and " +
                         std::to_string(Z.cols()) + " do not match n = " +
                         std::to_string(params.dim));
  }
}

}  // namespace ipca::detail
