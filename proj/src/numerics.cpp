#include "ipca/numerics.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <stdexcept>

namespace ipca {

void Tolerance::validate() const {
  if (!(rank_tol > 0.0 && rank_tol < 1.0)) throw ConfigError("rank_tol must lie in (0, 1)");
  if (!(residual_tol > 0.0 && residual_tol < 1.0)) {
    throw ConfigError("residual_tol must lie in (0, 1)");
  }
}

void Truncation::validate() const {
  if (eps.has_value() == count.has_value()) {
    throw std::invalid_argument("exactly one of eps and cutoff m must be given");
  }
  if (eps && !(*eps >= 0.0)) throw ConfigError("eps must be non-negative");
  if (count && *count < 1) throw ConfigError("cutoff m must be >= 1");
}

SvdResult svd_thin(const Matrix& A) {
  SvdResult r;
  if (A.rows() == 0 || A.cols() == 0) {
    r.U = Matrix(A.rows(), 0);
    r.V = Matrix(A.cols(), 0);
    r.S = Vector(0);
    return r;
  }
  if (!A.allFinite()) throw Error("SVD input contains non-finite entries");
  const Eigen::MatrixXd a = A;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  r.U = svd.matrixU();
  r.S = svd.singularValues();
  r.V = svd.matrixV();
  return r;
}

SvdResult svd_truncated(const Matrix& A, const Truncation& trunc) {
  trunc.validate();
  SvdResult full = svd_thin(A);
  Index keep = 0;
  if (trunc.count) {
    keep = std::min(*trunc.count, full.size());
  } else {
    while (keep < full.size() && full.S[keep] >= *trunc.eps) ++keep;
  }
  SvdResult r;
  r.U = full.U.leftCols(keep);
  r.S = full.S.head(keep);
  r.V = full.V.leftCols(keep);
  return r;
}

Matrix pinv(const Matrix& A, const Tolerance& tol) {
  const SvdResult svd = svd_thin(A);
  Matrix P = Matrix::Zero(A.cols(), A.rows());
  if (svd.empty() || svd.S[0] == 0.0) return P;
  const double cut = tol.rank_tol * svd.S[0];
  for (Index k = 0; k < svd.size(); ++k) {
    if (svd.S[k] <= cut) break;
    P.noalias() += (svd.V.col(k) / svd.S[k]) * svd.U.col(k).transpose();
  }
  return P;
}

Matrix inv_sqrt_psd(const Matrix& A, const Tolerance& tol) {
  if (A.rows() != A.cols()) throw DimensionError("inv_sqrt_psd: matrix is not square");
  const double norm = A.norm();
  if ((A - A.transpose()).norm() > 1e-10 * norm) {
    throw Error("inv_sqrt_psd: matrix is not symmetric");
  }
  if (norm == 0.0) return Matrix::Zero(A.rows(), A.cols());
  const EigenDecomposition eig = symmetric_eigen(A);
  const double lmax = eig.values[0];
  if (!(lmax > 0.0)) throw Error("inv_sqrt_psd: matrix is not positive semidefinite");
  const double lmin = eig.values[eig.values.size() - 1];
  if (lmin < -tol.rank_tol * lmax) {
    throw Error("inv_sqrt_psd: matrix is not positive semidefinite (eigenvalue " +
                std::to_string(lmin) + ")");
  }
  Vector scale(eig.values.size());
  for (Index k = 0; k < scale.size(); ++k) {
    const double l = eig.values[k];
    scale[k] = l > tol.rank_tol * lmax ? 1.0 / std::sqrt(l) : 0.0;
  }
  Matrix B = eig.vectors * scale.asDiagonal() * eig.vectors.transpose();
  // exact symmetry
  return 0.5 * (B + B.transpose());
}

Index numerical_rank(const Matrix& A, const Tolerance& tol) {
  if (A.size() == 0) return 0;
  const Eigen::MatrixXd a = A;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(a);
  const Vector& s = svd.singularValues();
  if (s.size() == 0 || s[0] == 0.0) return 0;
  Index r = 0;
  while (r < s.size() && s[r] > tol.rank_tol * s[0]) ++r;
  return r;
}

RowSpace::RowSpace(const Matrix& A, const Tolerance& tol) : tol_(tol) {
  const SvdResult svd = svd_thin(A);
  Index r = 0;
  if (!svd.empty() && svd.S[0] > 0.0) {
    while (r < svd.size() && svd.S[r] > tol.rank_tol * svd.S[0]) ++r;
  }
  basis_ = svd.V.leftCols(r);
  if (basis_.rows() != A.cols()) basis_.resize(A.cols(), 0);
}

RowVector RowSpace::residual_vector(const RowVector& v) const {
  if (v.size() != basis_.rows()) {
    throw DimensionError("row vector length " + std::to_string(v.size()) + " does not match " +
                         std::to_string(basis_.rows()) + " columns");
  }
  if (basis_.cols() == 0) return v;
  const RowVector coords = v * basis_;
  return v - coords * basis_.transpose();
}

Membership RowSpace::contains(const RowVector& v) const {
  const RowVector res = residual_vector(v);
  Membership m;
  m.residual = res.norm();
  const double vn = v.norm();
  m.relative_residual = vn > 0.0 ? m.residual / vn : 0.0;
  m.contained = m.residual <= tol_.residual_tol * vn;
  return m;
}

Membership rowspan_contains(const Matrix& A, const RowVector& v, const Tolerance& tol) {
  return RowSpace(A, tol).contains(v);
}

double matcomp_residual(const Matrix& A, const Matrix& B, const Matrix& C, const Tolerance& tol) {
  if (A.cols() != B.rows() || C.cols() != A.rows()) {
    throw DimensionError("matcomp: shapes are not conformable");
  }
  const double an = A.norm();
  if (an == 0.0) return 0.0;
  const Matrix AB = A * B;
  const Matrix CA = C * A;
  const Matrix CAB = C * AB;
  const Matrix R = A - AB * pinv(CAB, tol) * CA;
  return R.norm() / an;
}

bool matcomp_holds(const Matrix& A, const Matrix& B, const Matrix& C, const Tolerance& tol) {
  return matcomp_residual(A, B, C, tol) <= tol.residual_tol;
}

EigenDecomposition symmetric_eigen(const Matrix& A) {
  if (A.rows() != A.cols()) throw DimensionError("symmetric_eigen: matrix is not square");
  const Eigen::MatrixXd a = A;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  if (es.info() != Eigen::Success) throw Error("symmetric eigendecomposition failed");
  // Eigen returns ascending order.
  EigenDecomposition r;
  r.values = es.eigenvalues().reverse();
  r.vectors = es.eigenvectors().rowwise().reverse();
  return r;
}

double relative_frobenius_error(const Matrix& A, const Matrix& B) {
  const double an = A.norm();
  const double d = (A - B).norm();
  return an > 0.0 ? d / an : d;
}

}  // namespace ipca
