#include "ipca/data.hpp"
#include "ipca/ipca.hpp"
#include "ipca/poly.hpp"

#include "doctest.h"
#include "oracles.hpp"

#include <cmath>

using namespace ipca;

namespace {

MultiIndex mi(std::initializer_list<int> e) { return MultiIndex{std::vector<int>(e)}; }

Poly random_poly(const BasisPtr& b, Rng& rng) {
  Vector c(b->size());
  for (Index i = 0; i < c.size(); ++i) c[i] = rng.normal();
  return Poly(b, c);
}

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

TEST_CASE("eval_poly examples") {
  const auto b = make_basis(KernelParams{2, 1.0, 2});
  const double any[] = {-4.0, 2.5};
  CHECK(eval_poly(Poly::constant(b, 1.0), any) == 1.0);

  const Poly circle = Poly::monomial(b, mi({2, 0})) + Poly::monomial(b, mi({0, 2})) +
                      Poly::constant(b, -100.0);
  const double on[] = {6.0, 8.0};
  CHECK(eval_poly(circle, on) == 0.0);

  const double p[] = {3.0, 5.0};
  CHECK(eval_poly(Poly::monomial(b, mi({1, 1})), p) == 15.0);
  const double bad[] = {1.0};
  CHECK_THROWS_AS(eval_poly(circle, bad), DimensionError);
}

TEST_CASE("eval_poly agrees with the naive oracle") {
  Rng rng(1);
  for (int rep = 0; rep < 100; ++rep) {
    const int n = 1 + static_cast<int>(rng.index(3));
    const int d = 1 + static_cast<int>(rng.index(4));
    const auto b = make_basis(KernelParams{d, 1.0, n});
    const Poly f = random_poly(b, rng);
    std::vector<double> x(static_cast<std::size_t>(n));
    for (auto& v : x) v = rng.normal();
    const double want = oracle::eval_poly(to_std(f.coeffs()), x.data(), n, d);
    CHECK(f(x) == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("kdf examples") {
  const auto b2 = make_basis(KernelParams{2, 1.0, 2});
  const double zero[] = {0.0, 0.0};
  const Poly k0 = kdf(zero, b2);
  CHECK(k0.coeffs()[0] == 1.0);
  CHECK(k0.coeffs().tail(5).isZero(0.0));

  const auto b1 = make_basis(KernelParams{1, 1.0, 1});
  const double two[] = {2.0};
  const Poly k2 = kdf(two, b1);
  CHECK(k2.coeffs()[0] == 1.0);
  CHECK(k2.coeffs()[1] == 2.0);

  Rng rng(2);
  for (int rep = 0; rep < 100; ++rep) {
    const KernelParams p{1 + static_cast<int>(rng.index(4)), 0.5, 1 + static_cast<int>(rng.index(3))};
    const auto b = make_basis(p);
    std::vector<double> x(static_cast<std::size_t>(p.dim)), z(static_cast<std::size_t>(p.dim));
    for (auto& v : x) v = rng.normal();
    for (auto& v : z) v = rng.normal();
    const double k = kernel_eval(x, z, p);
    CHECK(eval_poly(kdf(z, b), x) == doctest::Approx(k).epsilon(1e-12));
  }
}

TEST_CASE("phi scalar product") {
  const auto b = make_basis(KernelParams{2, 1.0, 1});
  CHECK(phi_inner(Poly::constant(b, 1.0), Poly::constant(b, 1.0)) == 1.0);
  const double three[] = {3.0};
  const Poly t2 = Poly::monomial(b, mi({2}));
  CHECK(phi_inner(t2, kdf(three, b)) == doctest::Approx(9.0).epsilon(1e-15));

  const auto b2 = make_basis(KernelParams{3, 0.5, 2});
  for (Index i = 0; i < b2->size(); ++i) {
    for (Index j = 0; j < b2->size(); ++j) {
      const double v = phi_inner(Poly::monomial(b2, b2->index(i)), Poly::monomial(b2, b2->index(j)));
      if (i == j) {
        CHECK(v == doctest::Approx(1.0 / b2->gamma_squares()[i]));
      } else {
        CHECK(v == 0.0);
      }
    }
  }
  const auto other = make_basis(KernelParams{2, 1.0, 2});
  CHECK_THROWS_AS(phi_inner(t2, Poly::constant(other, 1.0)), std::invalid_argument);
}

TEST_CASE("reproducing property of the phi scalar product") {
  Rng rng(3);
  for (int rep = 0; rep < 500; ++rep) {
    const KernelParams p{1 + static_cast<int>(rng.index(4)),
                         std::array{0.25, 0.5, 1.0}[static_cast<std::size_t>(rng.index(3))],
                         1 + static_cast<int>(rng.index(4))};
    const auto b = make_basis(p);
    const Poly f = random_poly(b, rng);
    std::vector<double> x(static_cast<std::size_t>(p.dim));
    for (auto& v : x) v = rng.normal();
    const double lhs = phi_inner(f, kdf(x, b));
    const double fx = oracle::eval_poly(to_std(f.coeffs()), x.data(), p.dim, p.degree);
    const double scale = (1.0 + phi_norm(f)) * (1.0 + feature_map(x, *b).norm());
    CHECK(std::abs(lhs - fx) <= 1e-9 * scale);
  }
}

TEST_CASE("psi embedding") {
  const auto b = make_basis(KernelParams{2, 1.0, 2});
  const Vector e = psi_embed(Poly::constant(b, 1.0));
  CHECK(e[0] == 1.0);
  CHECK(e.tail(5).isZero(0.0));

  const Vector t1t2 = psi_embed(Poly::monomial(b, mi({1, 1})));
  CHECK(t1t2[b->find(mi({1, 1}))] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(t1t2.sum() == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));

  Rng rng(4);
  for (int rep = 0; rep < 100; ++rep) {
    const Poly f = random_poly(b, rng);
    const double x[] = {rng.normal(), rng.normal()};
    CHECK(psi_embed(f).dot(feature_map(x, *b)) ==
          doctest::Approx(oracle::eval_poly(to_std(f.coeffs()), x, 2, 2)).epsilon(1e-12));
  }
}

TEST_CASE("pretty printer") {
  const auto b = make_basis(KernelParams{2, 1.0, 2});
  Vector c = Vector::Zero(6);
  c[0] = 1.0;
  c[3] = 2.0;
  CHECK(to_string(Poly(b, c)) == "1.000000 + 2.000000*t1^2");
  c[0] = -100.0;
  c[4] = -0.5;
  c[5] = 1.0;
  CHECK(to_string(Poly(b, c), 3) == "-100.000 + 2.000*t1^2 - 0.500*t1*t2 + 1.000*t2^2");
  CHECK(to_string(Poly::zero(b)) == "0.000000");
}

TEST_CASE("spanning: kdfs at m generic points span R[t]_{<=d}") {
  Rng rng(5);
  for (auto [n, d] : {std::pair{1, 3}, std::pair{2, 2}, std::pair{3, 2}}) {
    const auto b = make_basis(KernelParams{d, 1.0, n});
    const Index m = b->size();
    for (int draw = 0; draw < 20; ++draw) {
      for (Index extra : {Index{0}, Index{3}}) {
        const Matrix P = standard_normal(m + extra, n, rng);
        Matrix C(m + extra, m);
        for (Index j = 0; j < P.rows(); ++j) {
          C.row(j) = kdf({P.data() + j * n, static_cast<std::size_t>(n)}, b).coeffs().transpose();
        }
        CHECK(numerical_rank(C) == m);
      }
    }
  }
}

TEST_CASE("vanishing_basis: generic points have no ideal") {
  Rng rng(6);
  const KernelParams p{2, 1.0, 3};
  const Matrix X = standard_normal(10, 3, rng);
  const Matrix Z = standard_normal(10, 3, rng);
  const auto ideal = vanishing_basis(X, Z, p);
  CHECK(ideal.empty());
  CHECK(ideal.kernel_rank == 10);
}

TEST_CASE("vanishing_basis: circle of radius 10") {
  Rng rng(7);
  const KernelParams p{2, 1.0, 2};
  const Matrix X = oracle::circle(50, 10.0, rng);
  const Matrix Z = standard_normal(8, 2, rng);
  const Tolerance tol;
  const auto ideal = vanishing_basis(X, Z, p, tol);
  REQUIRE(ideal.size() == 1);
  const Vector c = ideal.generators[0].coeffs();
  Vector want(6);
  want << -100.0, 0.0, 0.0, 1.0, 0.0, 1.0;
  const double scale = c[3];
  CHECK((c / scale - want).norm() / want.norm() <= 1e-6);
  CHECK(phi_norm(ideal.generators[0]) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(ideal.residual_scale[0] <= tol.residual_tol);

  const Matrix fresh = oracle::circle(50, 10.0, rng);
  for (Index i = 0; i < fresh.rows(); ++i) {
    CHECK(std::abs(ideal.generators[0](std::span<const double>(fresh.row(i).data(), 2))) <= 1e-8);
  }

  // generator equals the z-coefficient combination of kernel decision functions
  const auto b = make_basis(p);
  Poly sum = Poly::zero(b);
  for (Index j = 0; j < Z.rows(); ++j) {
    sum += ideal.z_coeffs[0][j] * kdf({Z.data() + j * 2, 2}, b);
  }
  CHECK((sum.coeffs() - c).norm() <= 1e-10 * c.norm());
}

TEST_CASE("vanishing_basis: two noiseless circles on a sphere") {
  const KernelParams p{2, 1.0, 3};
  const Dataset data = gen_two_circles_on_sphere(100, 5.0, 0.0, 8);
  Rng rng(9);
  const Tolerance tol;
  for (Index M : {Index{10}, Index{8}, Index{12}}) {
    const Matrix Z = standard_normal(M, 3, rng);
    const auto ideal = vanishing_basis(data.points, Z, p, tol);
    const Index rank = numerical_rank(cross_kernel_matrix(data.points, Z, p), tol);
    CHECK(ideal.kernel_rank == rank);
    // frk = 10 - dim I(X)_{<=2} = 8, so rank = min(M, 8)
    CHECK(rank == std::min<Index>(M, 8));
    if (M <= 10) CHECK(static_cast<Index>(ideal.size()) + rank == M);
    if (M >= 10) CHECK(ideal.size() == 2);
    for (std::size_t g = 0; g < ideal.size(); ++g) {
      // duality: psi(f) is orthogonal to the feature images of the data
      const Vector e = psi_embed(ideal.generators[g]);
      for (Index i = 0; i < data.rows(); ++i) {
        CHECK(std::abs(e.dot(feature_map(data.row(i), *make_basis(p)))) <= tol.residual_tol);
      }
      for (std::size_t h = 0; h < ideal.size(); ++h) {
        const double ip = phi_inner(ideal.generators[g], ideal.generators[h]);
        CHECK(std::abs(ip - (g == h ? 1.0 : 0.0)) <= 1e-8);
      }
    }
  }
}

TEST_CASE("membership certificate on the circle fixture") {
  Rng rng(10);
  const KernelParams p{2, 1.0, 2};
  const Matrix X = oracle::circle(50, 10.0, rng);
  const Matrix Z = standard_normal(8, 2, rng);
  const ManifoldCertificate cert(X, Z, p);
  CHECK(cert.check({X.data() + 3 * 2, 2}).contained);
  const Matrix fresh = oracle::circle(20, 10.0, rng);
  for (Index i = 0; i < fresh.rows(); ++i) {
    const auto m = cert.check({fresh.data() + i * 2, 2});
    CHECK(m.contained);
    CHECK(m.relative_residual <= 1e-8);
  }
  const double off[] = {11.0, 0.0};
  const auto m = membership_certificate(off, X, Z, p);
  CHECK_FALSE(m.contained);
  CHECK(m.residual > 0.1);
}

TEST_CASE("cross-kernel range: left range of K maps into the data span") {
  // Complement of vanishing_basis: directions of K's row space give
  // polynomials that do not vanish on X, nullspace directions do.
  Rng rng(11);
  const KernelParams p{2, 1.0, 2};
  const Matrix X = oracle::circle(40, 10.0, rng);
  const Matrix Z = standard_normal(6, 2, rng);
  const Matrix B = inv_sqrt_psd(kernel_matrix(Z, p));
  const Matrix K = cross_kernel_matrix(X, Z, p) * B;
  const auto s = svd_thin(K);
  const auto b = make_basis(p);
  for (Index k = 0; k < s.size(); ++k) {
    const Vector zc = B * s.V.col(k);
    Poly f = Poly::zero(b);
    for (Index j = 0; j < Z.rows(); ++j) f += zc[j] * kdf({Z.data() + j * 2, 2}, b);
    double worst = 0.0;
    for (Index i = 0; i < X.rows(); ++i) worst = std::max(worst, std::abs(f({X.data() + i * 2, 2})));
    if (s.S[k] > 1e-8 * s.S[0]) {
      CHECK(worst > 1e-3);
    } else {
      CHECK(worst <= 1e-6 * std::max(1.0, phi_norm(f)));
    }
  }
}
