#pragma once

#include "ipca/types.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace ipca {

/// Exponent tuple of a monomial t^alpha.
struct MultiIndex {
  std::vector<int> exponents;

  int degree() const;
  std::size_t size() const { return exponents.size(); }
  int operator[](std::size_t i) const { return exponents[i]; }

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
};

/// All alpha in N^n with |alpha| <= d: ordered by degree, and within one degree
/// by descending lexicographic order with the first coordinate most
/// significant, e.g. (n=2, d=2) -> 1, t1, t2, t1^2, t1 t2, t2^2.
std::vector<MultiIndex> enumerate_multiindices(int n, int d);

/// C(n, k) in 64-bit arithmetic. Throws ConfigError on overflow.
std::uint64_t binomial(int n, int k);

/// k! / (alpha_1! ... alpha_n!). Requires k == |alpha|.
std::uint64_t multinomial(int k, const MultiIndex& alpha);

/// sqrt(theta^|alpha| * C(d, |alpha|) * multinomial(|alpha|; alpha)).
double gamma(const MultiIndex& alpha, int d, double theta);

/// Feature-space dimension C(n + d, d); throws ConfigError above 2^31.
Index feature_dimension(int n, int d);

/// Monomial basis of R[t]_{<=d} with the weights that make the explicit
/// feature map reproduce the inhomogeneous polynomial kernel.
class FeatureBasis {
 public:
  FeatureBasis(int n, int d, double theta);

  int dim() const { return n_; }
  int degree() const { return d_; }
  double theta() const { return theta_; }
  Index size() const { return static_cast<Index>(indices_.size()); }

  const std::vector<MultiIndex>& indices() const { return indices_; }
  const MultiIndex& index(Index i) const { return indices_[static_cast<std::size_t>(i)]; }
  const Vector& gammas() const { return gammas_; }
  /// gamma_alpha^2, i.e. the coefficients of (theta <x,t> + 1)^d.
  const Vector& gamma_squares() const { return gamma_sq_; }

  /// Position of alpha in the basis, or -1.
  Index find(const MultiIndex& alpha) const;

  /// (x^alpha) for every alpha in basis order.
  Vector monomials(std::span<const double> x) const;

  bool same_as(const FeatureBasis& other) const {
    return n_ == other.n_ && d_ == other.d_ && theta_ == other.theta_;
  }

 private:
  int n_;
  int d_;
  double theta_;
  std::vector<MultiIndex> indices_;
  Vector gammas_;
  Vector gamma_sq_;
};

}  // namespace ipca
