#include "ipca/ipca.hpp"

#include <cmath>
#include <string>

namespace ipca {

namespace {

void check_inputs(const Matrix& X, const Matrix& Z, const KernelParams& params) {
  params.validate();
  if (X.cols() != params.dim || Z.cols() != params.dim) {
    throw DimensionError("IPCA: data has " + std::to_string(X.cols()) + " columns, Z has " +
                         std::to_string(Z.cols()) + ", kernel expects " + std::to_string(params.dim));
  }
  if (X.rows() < 1) throw Error("IPCA: no training points");
  if (Z.rows() < 1) throw Error("IPCA: Z has no rows");
  if (!X.allFinite() || !Z.allFinite()) throw FitError("IPCA: non-finite data");
}

// Certifying residual of one point, shared by the parallel and serial batch paths.
double certify_one(const IpcaModel& model, std::span<const double> x) {
  RowVector kz = kernel_row(x, model.Z, model.params);
  if (model.centered) kz -= model.kxz_mean;
  const RowVector w = kz * model.kzz_inv_sqrt;
  const RowVector coords = w * model.V;
  return (w - coords * model.V.transpose()).norm();
}

}  // namespace

Matrix ipca_factor(const Matrix& X, const Matrix& Z, const KernelParams& params, bool center,
                   const Tolerance& tol) {
  check_inputs(X, Z, params);
  const Matrix Kxz = cross_kernel_matrix(X, Z, params);
  const Matrix B = inv_sqrt_psd(kernel_matrix(Z, params), tol);
  Matrix K = Kxz * B;
  if (center) K.rowwise() -= K.colwise().mean();
  return K;
}

IpcaModel ipca_fit(const Matrix& X, const Matrix& Z, const KernelParams& params,
                   const Truncation& trunc, bool center, const Tolerance& tol) {
  trunc.validate();
  check_inputs(X, Z, params);

  IpcaModel model;
  model.params = params;
  model.X = X;
  model.Z = Z;
  model.centered = center;

  const Matrix Kxz = cross_kernel_matrix(X, Z, params);
  model.kzz_inv_sqrt = inv_sqrt_psd(kernel_matrix(Z, params), tol);
  Matrix K = Kxz * model.kzz_inv_sqrt;
  model.kxz_mean = RowVector::Zero(Z.rows());
  if (center) {
    model.kxz_mean = Kxz.colwise().mean();
    K.rowwise() -= K.colwise().mean();
  }

  SvdResult svd = svd_truncated(K, trunc);
  Index keep = 0;
  if (!svd.empty()) {
    while (keep < svd.size() && svd.S[keep] > tol.rank_tol * svd.S[0]) ++keep;
  }
  if (keep == 0) throw FitError("no components retained");
  model.U = svd.U.leftCols(keep);
  model.S = svd.S.head(keep);
  model.V = svd.V.leftCols(keep);
  return model;
}

IpcaFeatures ipca_eval(const IpcaModel& model, std::span<const double> x) {
  if (x.size() != static_cast<std::size_t>(model.params.dim)) {
    throw DimensionError("ipca_eval: point has " + std::to_string(x.size()) +
                         " coordinates, model expects " + std::to_string(model.params.dim));
  }
  const RowVector kx = kernel_row(x, model.X, model.params);
  RowVector kz = kernel_row(x, model.Z, model.params);
  const Vector s_inv = model.S.cwiseInverse();

  IpcaFeatures f;
  f.u = (kx * model.U).cwiseProduct(s_inv.transpose());
  if (model.centered) {
    // kappa_X centered like a row of H K_XX H; the all-ones terms vanish
    // against U because its columns are orthogonal to 1.
    const RowVector mu = model.kxz_mean * model.kzz_inv_sqrt;
    f.u -= mu * model.V;
    kz -= model.kxz_mean;
  }
  f.v = (kz * model.V).cwiseProduct(s_inv.transpose());
  const RowVector w = kz * model.kzz_inv_sqrt;
  f.v_perp = w - (w * model.V) * model.V.transpose();
  f.v_perp_norm = f.v_perp.norm();
  return f;
}

Vector certify_norms(const IpcaModel& model, const Matrix& points) {
  if (points.cols() != model.params.dim) {
    throw DimensionError("certify_norms: points have " + std::to_string(points.cols()) +
                         " columns, model expects " + std::to_string(model.params.dim));
  }
  const Index n = points.cols();
  Vector out(points.rows());
#pragma omp parallel for schedule(static) if (points.rows() > 256)
  for (Index i = 0; i < points.rows(); ++i) {
    out[i] = certify_one(model, {points.data() + i * n, static_cast<std::size_t>(n)});
  }
  return out;
}

namespace serial {

Vector certify_norms(const IpcaModel& model, const Matrix& points) {
  if (points.cols() != model.params.dim) throw DimensionError("certify_norms: dimension mismatch");
  Vector out(points.rows());
  for (Index i = 0; i < points.rows(); ++i) {
    out[i] = certify_one(model, {points.row(i).data(), static_cast<std::size_t>(points.cols())});
  }
  return out;
}

}  // namespace serial

KernelPcaResult kernel_pca(const Matrix& X, const KernelParams& params, Index cutoff_m, bool center) {
  params.validate();
  if (cutoff_m < 1 || cutoff_m > X.rows()) {
    throw ConfigError("kernel_pca: cutoff m must lie in [1, N]");
  }
  Matrix K = kernel_matrix(X, params);
  if (center) {
    K.rowwise() -= K.colwise().mean();
    K.colwise() -= K.rowwise().mean();
  }
  EigenDecomposition eig = symmetric_eigen(K);
  KernelPcaResult r;
  r.eigvals = eig.values.head(cutoff_m);
  r.components = eig.vectors.leftCols(cutoff_m);
  return r;
}

double decomposition_error(const Matrix& X, const Matrix& Z, const KernelParams& params,
                           const Tolerance& tol) {
  check_inputs(X, Z, params);
  const Matrix Kxx = kernel_matrix(X, params);
  const Matrix Kxz = cross_kernel_matrix(X, Z, params);
  const Matrix approx = Kxz * pinv(kernel_matrix(Z, params), tol) * Kxz.transpose();
  return relative_frobenius_error(Kxx, approx);
}

}  // namespace ipca
