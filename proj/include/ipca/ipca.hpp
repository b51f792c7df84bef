#pragma once

#include "ipca/kernel.hpp"
#include "ipca/numerics.hpp"

#include <span>

namespace ipca {

/// Fitted IPCA factors: K(X, Z) K(Z, Z)^{-1/2} (optionally centered) = U S V^T.
struct IpcaModel {
  KernelParams params;
  Matrix X;             // N x n training points, needed for kappa_X
  Matrix Z;             // M x n feature-generating points
  Matrix kzz_inv_sqrt;  // M x M clamped pseudo-inverse square root
  Matrix U;             // N x m
  Vector S;             // m, strictly positive, non-increasing
  Matrix V;             // M x m
  bool centered = false;
  /// Column means of the uncentered K(X, Z); zero when not centered. The fit
  /// subtracts kxz_mean * kzz_inv_sqrt from every row, and evaluation applies
  /// the same shift to kappa_Z.
  RowVector kxz_mean;

  Index components() const { return S.size(); }
  Index train_size() const { return X.rows(); }
  Index z_size() const { return Z.rows(); }
};

/// Per-point outputs of evaluation.
struct IpcaFeatures {
  RowVector u;       // m, left principal features (agree with kernel PCA)
  RowVector v;       // m, right principal features
  RowVector v_perp;  // M, certifying features; near zero on the data manifold
  double v_perp_norm = 0.0;
};

/// K = K(X, Z) * inv_sqrt_psd(K(Z, Z)), centered as K - (1/N) 1 K when
/// `center` is set.
Matrix ipca_factor(const Matrix& X, const Matrix& Z, const KernelParams& params, bool center = false,
                   const Tolerance& tol = {});

/// Fit by truncated SVD of ipca_factor. Triplets with sigma <= rank_tol *
/// sigma_1 are dropped even under a count cutoff so that S^{-1} is defined.
/// Throws FitError if nothing is retained or the data are not finite.
IpcaModel ipca_fit(const Matrix& X, const Matrix& Z, const KernelParams& params,
                   const Truncation& trunc, bool center = false, const Tolerance& tol = {});

/// u = kappa_X U S^{-1}, v = kappa_Z V S^{-1},
/// v_perp = kappa_Z K_ZZ^{-1/2} (I - V V^T).
IpcaFeatures ipca_eval(const IpcaModel& model, std::span<const double> x);

/// ||v_perp|| for every row of `points`, evaluated in parallel. Skips kappa_X,
/// so it is O(M^2) per point regardless of N.
Vector certify_norms(const IpcaModel& model, const Matrix& points);

namespace serial {
Vector certify_norms(const IpcaModel& model, const Matrix& points);
}  // namespace serial

struct KernelPcaResult {
  Vector eigvals;     // m, non-increasing
  Matrix components;  // N x m unit eigenvectors of the (centered) kernel matrix
};

/// Top `cutoff_m` eigenpairs of K(X, X); with `center`, of H K(X, X) H where
/// H = I - (1/N) 1, which matches what ipca_fit's centering does to K K^T.
KernelPcaResult kernel_pca(const Matrix& X, const KernelParams& params, Index cutoff_m,
                           bool center = false);

/// ||K_XX - K_XZ pinv(K_ZZ) K_ZX||_F / ||K_XX||_F
double decomposition_error(const Matrix& X, const Matrix& Z, const KernelParams& params,
                           const Tolerance& tol = {});

}  // namespace ipca
