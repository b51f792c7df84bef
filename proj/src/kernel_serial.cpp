#include "ipca/kernel.hpp"

#include "kernel_detail.hpp"

namespace ipca::serial {

Matrix cross_kernel_matrix(const Matrix& X, const Matrix& Z, const KernelParams& params) {
  detail::check_same_dim(X, Z, params);
  const Index n = X.cols();
  Matrix K(X.rows(), Z.rows());
  for (Index i = 0; i < X.rows(); ++i) {
    for (Index j = 0; j < Z.rows(); ++j) {
      K(i, j) = detail::kernel_entry(X.row(i).data(), Z.row(j).data(), n, params.theta,
                                     params.degree);
    }
  }
  return K;
}

Matrix kernel_matrix(const Matrix& X, const KernelParams& params) {
  return serial::cross_kernel_matrix(X, X, params);
}

}  // namespace ipca::serial
