#include "ipca/model_io.hpp"

#include "ipca/data.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace ipca {

namespace {

constexpr std::array<char, 8> kMagic = {'I', 'P', 'C', 'A', 'M', 'O', 'D', 'L'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ostream& os, T value) {
  static_assert(std::is_integral_v<T>);
  using U = std::make_unsigned_t<T>;
  auto u = static_cast<U>(value);
  for (std::size_t b = 0; b < sizeof(T); ++b) {
    os.put(static_cast<char>(u & 0xffu));
    u = static_cast<U>(u >> 8);
  }
}

void put_double(std::ostream& os, double v) { put(os, std::bit_cast<std::uint64_t>(v)); }

template <typename T>
T get(std::istream& is) {
  using U = std::make_unsigned_t<T>;
  U u = 0;
  for (std::size_t b = 0; b < sizeof(T); ++b) {
    const int c = is.get();
    if (c == std::char_traits<char>::eof()) throw ParseError("model file is truncated");
    u = static_cast<U>(u | (static_cast<U>(static_cast<unsigned char>(c)) << (8 * b)));
  }
  return static_cast<T>(u);
}

double get_double(std::istream& is) { return std::bit_cast<double>(get<std::uint64_t>(is)); }

void put_matrix(std::ostream& os, const Matrix& A) {
  put<std::int64_t>(os, A.rows());
  put<std::int64_t>(os, A.cols());
  for (Index i = 0; i < A.size(); ++i) put_double(os, A.data()[i]);
}

void put_vector(std::ostream& os, const Eigen::Ref<const Eigen::VectorXd>& v) {
  put<std::int64_t>(os, v.size());
  for (Index i = 0; i < v.size(); ++i) put_double(os, v[i]);
}

Index get_extent(std::istream& is) {
  const auto n = get<std::int64_t>(is);
  if (n < 0 || n > (std::int64_t{1} << 32)) throw ParseError("model file has an invalid extent");
  return static_cast<Index>(n);
}

Matrix get_matrix(std::istream& is) {
  const Index r = get_extent(is);
  const Index c = get_extent(is);
  Matrix A(r, c);
  for (Index i = 0; i < A.size(); ++i) A.data()[i] = get_double(is);
  return A;
}

Vector get_vector(std::istream& is) {
  Vector v(get_extent(is));
  for (Index i = 0; i < v.size(); ++i) v[i] = get_double(is);
  return v;
}

}  // namespace

void write_model(std::ostream& os, const IpcaModel& model) {
  os.write(kMagic.data(), kMagic.size());
  put<std::uint32_t>(os, kVersion);
  put<std::int32_t>(os, model.params.degree);
  put_double(os, model.params.theta);
  put<std::int32_t>(os, model.params.dim);
  put<std::uint8_t>(os, model.centered ? 1 : 0);
  put_matrix(os, model.X);
  put_matrix(os, model.Z);
  put_matrix(os, model.kzz_inv_sqrt);
  put_matrix(os, model.U);
  put_vector(os, model.S);
  put_matrix(os, model.V);
  put_vector(os, model.kxz_mean.transpose());
}

IpcaModel read_model(std::istream& is) {
  std::array<char, 8> magic{};
  is.read(magic.data(), magic.size());
  if (!is || magic != kMagic) throw ParseError("not an IPCA model file");
  const auto version = get<std::uint32_t>(is);
  if (version != kVersion) {
    throw ParseError("unsupported model version " + std::to_string(version));
  }
  IpcaModel m;
  m.params.degree = get<std::int32_t>(is);
  m.params.theta = get_double(is);
  m.params.dim = get<std::int32_t>(is);
  m.centered = get<std::uint8_t>(is) != 0;
  m.X = get_matrix(is);
  m.Z = get_matrix(is);
  m.kzz_inv_sqrt = get_matrix(is);
  m.U = get_matrix(is);
  m.S = get_vector(is);
  m.V = get_matrix(is);
  m.kxz_mean = get_vector(is).transpose();

  m.params.validate();
  const Index N = m.X.rows();
  const Index M = m.Z.rows();
  const Index k = m.S.size();
  const bool ok = m.X.cols() == m.params.dim && m.Z.cols() == m.params.dim &&
                  m.kzz_inv_sqrt.rows() == M && m.kzz_inv_sqrt.cols() == M && m.U.rows() == N &&
                  m.U.cols() == k && m.V.rows() == M && m.V.cols() == k && m.kxz_mean.size() == M;
  if (!ok) throw ParseError("model file has inconsistent shapes");
  return m;
}

void save_model(const std::filesystem::path& path, const IpcaModel& model) {
  std::ostringstream os(std::ios::binary);
  write_model(os, model);
  write_file_atomic(path, os.str());
}

IpcaModel load_model(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open model file " + path.string());
  return read_model(is);
}

}  // namespace ipca
