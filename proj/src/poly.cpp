#include "ipca/poly.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <cstdio>
#include <sstream>

namespace ipca {

BasisPtr make_basis(const KernelParams& params) {
  params.validate();
  return std::make_shared<const FeatureBasis>(params.dim, params.degree, params.theta);
}

Poly::Poly(BasisPtr basis, Vector coeffs) : basis_(std::move(basis)), coeffs_(std::move(coeffs)) {
  if (!basis_) throw std::invalid_argument("Poly: null basis");
  if (coeffs_.size() != basis_->size()) {
    throw DimensionError("Poly: " + std::to_string(coeffs_.size()) +
                         " coefficients for a basis of size " + std::to_string(basis_->size()));
  }
}

Poly Poly::zero(BasisPtr basis) {
  const Index m = basis->size();
  return Poly(std::move(basis), Vector::Zero(m));
}

Poly Poly::constant(BasisPtr basis, double c) {
  Poly p = zero(std::move(basis));
  p.coeffs_[0] = c;
  return p;
}

Poly Poly::monomial(BasisPtr basis, const MultiIndex& alpha, double c) {
  const Index i = basis->find(alpha);
  if (i < 0) throw std::invalid_argument("Poly::monomial: exponent not in basis");
  Poly p = zero(std::move(basis));
  p.coeffs_[i] = c;
  return p;
}

double Poly::operator()(std::span<const double> x) const { return eval_poly(*this, x); }

Poly& Poly::operator+=(const Poly& other) {
  if (!basis_->same_as(other.basis())) throw std::invalid_argument("Poly: basis mismatch");
  coeffs_ += other.coeffs_;
  return *this;
}

Poly& Poly::operator*=(double s) {
  coeffs_ *= s;
  return *this;
}

double eval_poly(const Poly& f, std::span<const double> x) {
  return f.basis().monomials(x).dot(f.coeffs());
}

Poly kdf(std::span<const double> z, BasisPtr basis) {
  Vector c = basis->gamma_squares().cwiseProduct(basis->monomials(z));
  return Poly(std::move(basis), std::move(c));
}

double phi_inner(const Poly& f, const Poly& g) {
  if (!f.basis().same_as(g.basis())) throw std::invalid_argument("phi_inner: basis mismatch");
  return (f.coeffs().array() * g.coeffs().array() / f.basis().gamma_squares().array()).sum();
}

double phi_norm(const Poly& f) { return std::sqrt(phi_inner(f, f)); }

Vector psi_embed(const Poly& f) { return f.coeffs().cwiseQuotient(f.basis().gammas()); }

std::string to_string(const Poly& f, int precision) {
  const auto& basis = f.basis();
  std::ostringstream os;
  bool first = true;
  char buf[64];
  for (Index i = 0; i < basis.size(); ++i) {
    const double c = f.coeffs()[i];
    if (c == 0.0) continue;
    std::snprintf(buf, sizeof buf, "%.*f", precision, std::abs(c));
    if (first) {
      if (c < 0) os << '-';
    } else {
      os << (c < 0 ? " - " : " + ");
    }
    os << buf;
    const auto& a = basis.index(i);
    for (std::size_t v = 0; v < a.size(); ++v) {
      if (a[v] == 0) continue;
      os << "*t" << v + 1;
      if (a[v] > 1) os << '^' << a[v];
    }
    first = false;
  }
  if (first) {
    std::snprintf(buf, sizeof buf, "%.*f", precision, 0.0);
    os << buf;
  }
  return os.str();
}

namespace {

// Rows are monomial vectors of the rows of Z.
Matrix monomial_matrix(const Matrix& Z, const FeatureBasis& basis) {
  Matrix Mz(Z.rows(), basis.size());
  for (Index j = 0; j < Z.rows(); ++j) {
    std::span<const double> z(Z.data() + j * Z.cols(), static_cast<std::size_t>(Z.cols()));
    Mz.row(j) = basis.monomials(z).transpose();
  }
  return Mz;
}

}  // namespace

IdealBasis vanishing_basis(const Matrix& X, const Matrix& Z, const KernelParams& params,
                           const Tolerance& tol) {
  params.validate();
  if (Z.rows() < 1) throw std::invalid_argument("vanishing_basis: Z must have at least one row");
  const BasisPtr basis = make_basis(params);
  const Index M = Z.rows();

  const Eigen::MatrixXd K = cross_kernel_matrix(X, Z, params);
  Index rank = 0;
  Eigen::MatrixXd V;
  if (K.rows() == 0) {
    V = Eigen::MatrixXd::Identity(M, M);
  } else {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(K, Eigen::ComputeFullV);
    const Vector& s = svd.singularValues();
    if (s[0] > 0.0) {
      while (rank < s.size() && s[rank] > tol.rank_tol * s[0]) ++rank;
    }
    V = svd.matrixV();
  }

  IdealBasis out;
  out.kernel_rank = rank;
  if (rank == M) return out;

  const Eigen::MatrixXd C = V.rightCols(M - rank);
  const Eigen::MatrixXd Kzz = kernel_matrix(Z, params);
  // phi-Gram matrix of the candidate polynomials sum_j C(j, k) kdf(z_j)
  const Eigen::MatrixXd G = C.transpose() * Kzz * C;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
  const double kzz_max =
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(Kzz, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();

  const Matrix Mz = monomial_matrix(Z, *basis);
  for (Index k = G.rows() - 1; k >= 0; --k) {
    const double lambda = es.eigenvalues()[k];
    if (!(lambda > tol.rank_tol * kzz_max)) continue;
    Vector zc = C * es.eigenvectors().col(k) / std::sqrt(lambda);
    // Fix the sign so the largest-magnitude coefficient is positive.
    Index imax = 0;
    Vector coeffs = basis->gamma_squares().cwiseProduct(Mz.transpose() * zc);
    coeffs.cwiseAbs().maxCoeff(&imax);
    if (coeffs[imax] < 0) {
      coeffs = -coeffs;
      zc = -zc;
    }
    Poly f(basis, std::move(coeffs));
    double worst = 0.0;
    for (Index i = 0; i < X.rows(); ++i) {
      std::span<const double> x(X.data() + i * X.cols(), static_cast<std::size_t>(X.cols()));
      worst = std::max(worst, std::abs(f(x)));
    }
    out.generators.push_back(std::move(f));
    out.z_coeffs.push_back(std::move(zc));
    out.residual_scale.push_back(worst);
  }
  return out;
}

ManifoldCertificate::ManifoldCertificate(const Matrix& X, const Matrix& Z,
                                         const KernelParams& params, const Tolerance& tol)
    : Z_(Z), params_(params), rowspace_(cross_kernel_matrix(X, Z, params), tol) {}

Membership ManifoldCertificate::check(std::span<const double> c) const {
  return rowspace_.contains(kernel_row(c, Z_, params_));
}

Membership membership_certificate(std::span<const double> c, const Matrix& X, const Matrix& Z,
                                  const KernelParams& params, const Tolerance& tol) {
  return ManifoldCertificate(X, Z, params, tol).check(c);
}

}  // namespace ipca
