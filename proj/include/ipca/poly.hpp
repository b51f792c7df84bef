#pragma once

#include "ipca/basis.hpp"
#include "ipca/kernel.hpp"
#include "ipca/numerics.hpp"

#include <memory>
#include <span>
#include <string>
#include <vector>

namespace ipca {

using BasisPtr = std::shared_ptr<const FeatureBasis>;

BasisPtr make_basis(const KernelParams& params);

/// Polynomial of degree <= d as coefficients c_alpha over a FeatureBasis.
class Poly {
 public:
  Poly(BasisPtr basis, Vector coeffs);

  static Poly zero(BasisPtr basis);
  static Poly constant(BasisPtr basis, double c);
  /// c * t^alpha
  static Poly monomial(BasisPtr basis, const MultiIndex& alpha, double c = 1.0);

  const FeatureBasis& basis() const { return *basis_; }
  const BasisPtr& basis_ptr() const { return basis_; }
  const Vector& coeffs() const { return coeffs_; }

  double operator()(std::span<const double> x) const;

  Poly& operator+=(const Poly& other);
  Poly& operator*=(double s);
  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator*(double s, Poly p) { return p *= s; }

 private:
  BasisPtr basis_;
  Vector coeffs_;
};

/// sum_alpha c_alpha x^alpha
double eval_poly(const Poly& f, std::span<const double> x);

/// Kernel decision function t -> (theta <z, t> + 1)^d expanded in the
/// monomial basis: coefficient of t^alpha is gamma_alpha^2 z^alpha.
Poly kdf(std::span<const double> z, BasisPtr basis);

/// <f, g>_phi = sum_alpha c_alpha c'_alpha / gamma_alpha^2. For every f and x,
/// <f, kdf(x)>_phi = f(x).
double phi_inner(const Poly& f, const Poly& g);
double phi_norm(const Poly& f);

/// Feature-space vector (c_alpha / gamma_alpha); its standard inner product
/// with feature_map(x) equals f(x).
Vector psi_embed(const Poly& f);

/// "1.000000 - 2.500000*t1*t2^2", terms in basis order, zero terms skipped.
std::string to_string(const Poly& f, int precision = 6);

/// Approximate generators of I(X)_{<=d} recovered from the nullspace of K(X, Z).
struct IdealBasis {
  /// Mutually orthonormal under <., .>_phi.
  std::vector<Poly> generators;
  /// Generator i equals sum_j z_coeffs[i][j] * kdf(z_j).
  std::vector<Vector> z_coeffs;
  /// max_i |f(x_i)| over the training points, per generator.
  std::vector<double> residual_scale;
  /// numerical_rank(K(X, Z)) at the tolerance used.
  Index kernel_rank = 0;

  std::size_t size() const { return generators.size(); }
  bool empty() const { return generators.empty(); }
};

/// Right singular vectors of K(X, Z) with sigma <= rank_tol * sigma_1, mapped
/// through z -> kdf(z) and re-orthonormalized under <., .>_phi. Directions
/// that only span the nullspace of K(Z, Z) give the zero polynomial and are
/// dropped.
IdealBasis vanishing_basis(const Matrix& X, const Matrix& Z, const KernelParams& params,
                           const Tolerance& tol = {});

/// Row space of K(X, Z) kept for repeated membership queries.
class ManifoldCertificate {
 public:
  ManifoldCertificate(const Matrix& X, const Matrix& Z, const KernelParams& params,
                      const Tolerance& tol = {});

  /// Whether kappa_Z(c) = (k(c, z_j))_j lies in the row span of K(X, Z),
  /// i.e. Phi(c) lies in the feature span of X.
  Membership check(std::span<const double> c) const;
  Index rank() const { return rowspace_.rank(); }

 private:
  Matrix Z_;
  KernelParams params_;
  RowSpace rowspace_;
};

Membership membership_certificate(std::span<const double> c, const Matrix& X, const Matrix& Z,
                                  const KernelParams& params, const Tolerance& tol = {});

}  // namespace ipca
