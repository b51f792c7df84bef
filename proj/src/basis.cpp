#include "ipca/basis.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace ipca {

namespace {

// Exponent tuples of one exact degree, descending lexicographic.
void append_degree(int n, int k, std::vector<int>& prefix, std::vector<MultiIndex>& out) {
  const auto pos = prefix.size();
  if (pos + 1 == static_cast<std::size_t>(n)) {
    prefix.push_back(k);
    out.push_back(MultiIndex{prefix});
    prefix.pop_back();
    return;
  }
  for (int e = k; e >= 0; --e) {
    prefix.push_back(e);
    append_degree(n, k - e, prefix, out);
    prefix.pop_back();
  }
}

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
  if (p > std::numeric_limits<std::uint64_t>::max()) {
    throw ConfigError("integer overflow in combinatorial coefficient");
  }
  return static_cast<std::uint64_t>(p);
}

double int_pow(double base, int e) {
  double r = 1.0;
  while (e > 0) {
    if (e & 1) r *= base;
    base *= base;
    e >>= 1;
  }
  return r;
}

}  // namespace

int MultiIndex::degree() const {
  return std::accumulate(exponents.begin(), exponents.end(), 0);
}

std::vector<MultiIndex> enumerate_multiindices(int n, int d) {
  if (n < 1 || d < 0) {
    throw std::invalid_argument("enumerate_multiindices: need n >= 1 and d >= 0");
  }
  (void)feature_dimension(n, d);
  std::vector<MultiIndex> out;
  std::vector<int> prefix;
  prefix.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k <= d; ++k) append_degree(n, k, prefix, out);
  return out;
}

std::uint64_t binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) {
    // r * (n - k + i) is divisible by i at every step.
    const std::uint64_t num = static_cast<std::uint64_t>(n - k + i);
    const std::uint64_t g = std::gcd(r, static_cast<std::uint64_t>(i));
    r = checked_mul(r / g, num / (static_cast<std::uint64_t>(i) / g));
  }
  return r;
}

std::uint64_t multinomial(int k, const MultiIndex& alpha) {
  if (k != alpha.degree()) {
    throw std::invalid_argument("multinomial: k must equal |alpha|");
  }
  std::uint64_t r = 1;
  int remaining = k;
  for (int a : alpha.exponents) {
    if (a < 0) throw std::invalid_argument("multinomial: negative exponent");
    r = checked_mul(r, binomial(remaining, a));
    remaining -= a;
  }
  return r;
}

double gamma(const MultiIndex& alpha, int d, double theta) {
  const int k = alpha.degree();
  if (k > d) throw std::invalid_argument("gamma: |alpha| exceeds the kernel degree");
  if (!(theta > 0.0)) throw std::invalid_argument("gamma: theta must be positive");
  const auto weight = checked_mul(binomial(d, k), multinomial(k, alpha));
  return std::sqrt(int_pow(theta, k) * static_cast<double>(weight));
}

Index feature_dimension(int n, int d) {
  if (n < 1 || d < 0) throw ConfigError("feature dimension needs n >= 1 and d >= 0");
  std::uint64_t m = 0;
  try {
    m = binomial(n + d, d);
  } catch (const ConfigError&) {
    m = std::numeric_limits<std::uint64_t>::max();
  }
  if (m > (std::uint64_t{1} << 31)) {
    throw ConfigError("feature dimension C(" + std::to_string(n + d) + ", " + std::to_string(d) +
                      ") exceeds 2^31");
  }
  return static_cast<Index>(m);
}

FeatureBasis::FeatureBasis(int n, int d, double theta)
    : n_(n), d_(d), theta_(theta) {
  if (!(theta > 0.0) || !std::isfinite(theta)) {
    throw ConfigError("theta must be positive and finite");
  }
  indices_ = enumerate_multiindices(n, d);
  gammas_.resize(size());
  gamma_sq_.resize(size());
  for (Index i = 0; i < size(); ++i) {
    const auto& a = indices_[static_cast<std::size_t>(i)];
    const int k = a.degree();
    const auto weight = checked_mul(binomial(d, k), multinomial(k, a));
    gamma_sq_[i] = int_pow(theta, k) * static_cast<double>(weight);
    gammas_[i] = std::sqrt(gamma_sq_[i]);
  }
}

Index FeatureBasis::find(const MultiIndex& alpha) const {
  for (Index i = 0; i < size(); ++i) {
    if (indices_[static_cast<std::size_t>(i)] == alpha) return i;
  }
  return -1;
}

Vector FeatureBasis::monomials(std::span<const double> x) const {
  if (x.size() != static_cast<std::size_t>(n_)) {
    throw DimensionError("point has " + std::to_string(x.size()) + " coordinates, basis expects " +
                         std::to_string(n_));
  }
  // powers(i, e) = x_i^e
  Matrix powers(n_, d_ + 1);
  for (int i = 0; i < n_; ++i) {
    powers(i, 0) = 1.0;
    for (int e = 1; e <= d_; ++e) powers(i, e) = powers(i, e - 1) * x[static_cast<std::size_t>(i)];
  }
  Vector out(size());
  for (Index j = 0; j < size(); ++j) {
    const auto& a = indices_[static_cast<std::size_t>(j)];
    double v = 1.0;
    for (int i = 0; i < n_; ++i) v *= powers(i, a[static_cast<std::size_t>(i)]);
    out[j] = v;
  }
  return out;
}

}  // namespace ipca
