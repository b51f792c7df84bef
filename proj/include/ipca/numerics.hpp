#pragma once

#include "ipca/types.hpp"

#include <optional>

namespace ipca {

/// Relative thresholds used for every rank and residual decision.
///
/// rank_tol: a singular value (or eigenvalue) counts as nonzero when it
/// exceeds rank_tol times the largest one.
/// residual_tol: a residual passes when it is at most residual_tol times the
/// norm of the quantity being tested.
struct Tolerance {
  double rank_tol = 1e-8;
  double residual_tol = 1e-6;

  void validate() const;
};

/// Selects the retained singular triplets: either every sigma >= eps, or the
/// top `count`. Exactly one of the two must be set; eps = 0 keeps every triplet.
struct Truncation {
  std::optional<double> eps;
  std::optional<Index> count;

  static Truncation threshold(double eps) { return {eps, std::nullopt}; }
  static Truncation top(Index count) { return {std::nullopt, count}; }

  void validate() const;
};

struct SvdResult {
  Matrix U;  // N x m, orthonormal columns
  Vector S;  // non-increasing
  Matrix V;  // M x m, orthonormal columns

  Index size() const { return S.size(); }
  bool empty() const { return S.size() == 0; }
};

/// Thin SVD with all min(N, M) triplets, singular values non-increasing.
SvdResult svd_thin(const Matrix& A);

/// Thin SVD restricted to the triplets chosen by `trunc`. An eps above sigma_1
/// gives an empty result; callers decide whether that is an error.
SvdResult svd_truncated(const Matrix& A, const Truncation& trunc);

/// Moore-Penrose pseudoinverse, inverting singular values above
/// rank_tol * sigma_1.
Matrix pinv(const Matrix& A, const Tolerance& tol = {});

/// Pseudo-inverse square root of a symmetric PSD matrix: eigenvalues at or
/// below rank_tol * lambda_max map to 0, the rest to lambda^{-1/2}.
/// Throws Error if A is not symmetric (1e-10 relative) or has an eigenvalue
/// below -rank_tol * lambda_max.
Matrix inv_sqrt_psd(const Matrix& A, const Tolerance& tol = {});

/// Number of singular values above rank_tol * sigma_1 (0 for the zero matrix).
Index numerical_rank(const Matrix& A, const Tolerance& tol = {});

struct Membership {
  bool contained = false;
  double residual = 0.0;           // ||v - proj(v)||_2
  double relative_residual = 0.0;  // residual / ||v||_2 (0 when v = 0)
};

/// Orthonormal basis of the row space of A, kept for repeated membership
/// queries against the same matrix.
class RowSpace {
 public:
  RowSpace(const Matrix& A, const Tolerance& tol = {});

  Index rank() const { return basis_.cols(); }
  Index ambient() const { return basis_.rows(); }
  const Matrix& basis() const { return basis_; }

  /// v - v * pinv(A) * A, i.e. the component of v outside the row space.
  RowVector residual_vector(const RowVector& v) const;
  Membership contains(const RowVector& v) const;

 private:
  Matrix basis_;  // M x r
  Tolerance tol_;
};

/// true iff ||v - v pinv(A) A||_2 <= residual_tol * ||v||_2.
Membership rowspan_contains(const Matrix& A, const RowVector& v, const Tolerance& tol = {});

/// ||A - A B pinv(C A B) C A||_F / ||A||_F (0 when A = 0).
double matcomp_residual(const Matrix& A, const Matrix& B, const Matrix& C, const Tolerance& tol = {});

/// Whether A = A B (C A B)^+ C A holds to residual_tol. Equivalent to
/// rank A == rank C A B.
bool matcomp_holds(const Matrix& A, const Matrix& B, const Matrix& C, const Tolerance& tol = {});

struct EigenDecomposition {
  Vector values;   // non-increasing
  Matrix vectors;  // columns aligned with values
};

/// Full symmetric eigendecomposition, eigenvalues sorted non-increasing.
EigenDecomposition symmetric_eigen(const Matrix& A);

/// ||A - B||_F / ||A||_F, or ||B||_F when A = 0.
double relative_frobenius_error(const Matrix& A, const Matrix& B);

}  // namespace ipca
