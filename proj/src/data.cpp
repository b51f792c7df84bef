#include "ipca/data.hpp"

#include <unistd.h>

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace ipca {

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // 1 - u lies in (0, 1], so the log is finite.
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(a);
  has_spare_ = true;
  return r * std::cos(a);
}

Index Rng::index(Index n) {
  if (n < 1) throw std::invalid_argument("Rng::index: empty range");
  return static_cast<Index>(uniform() * static_cast<double>(n));
}

Matrix standard_normal(Index rows, Index dim, Rng& rng) {
  Matrix A(rows, dim);
  for (Index i = 0; i < A.size(); ++i) A.data()[i] = rng.normal();
  return A;
}

GeneratorKind parse_generator_kind(std::string_view name) {
  if (name == "noisy-circle" || name == "noisy_circle" || name == "circle") {
    return GeneratorKind::NoisyCircle;
  }
  if (name == "two-circles" || name == "two_circles" || name == "two_circles_on_sphere") {
    return GeneratorKind::TwoCirclesOnSphere;
  }
  if (name == "gaussian" || name == "gaussian-cloud" || name == "gaussian_cloud") {
    return GeneratorKind::GaussianCloud;
  }
  if (name == "grid") return GeneratorKind::Grid;
  throw ConfigError("unknown generator kind '" + std::string(name) + "'");
}

std::string_view to_string(GeneratorKind kind) {
  switch (kind) {
    case GeneratorKind::NoisyCircle: return "noisy-circle";
    case GeneratorKind::TwoCirclesOnSphere: return "two-circles";
    case GeneratorKind::GaussianCloud: return "gaussian";
    case GeneratorKind::Grid: return "grid";
  }
  return "unknown";
}

Dataset generate(const GeneratorSpec& spec) {
  switch (spec.kind) {
    case GeneratorKind::NoisyCircle:
      return gen_noisy_circle(spec.count, spec.radius, spec.noise, spec.seed);
    case GeneratorKind::TwoCirclesOnSphere:
      return gen_two_circles_on_sphere(spec.count, spec.radius, spec.noise, spec.seed);
    case GeneratorKind::GaussianCloud:
      return gen_gaussian_cloud(spec.count, spec.dim, spec.seed);
    case GeneratorKind::Grid: {
      std::vector<std::pair<double, double>> bounds(static_cast<std::size_t>(spec.dim),
                                                    {-spec.radius, spec.radius});
      return gen_grid(bounds, spec.count);
    }
  }
  throw ConfigError("unknown generator kind");
}

Dataset gen_noisy_circle(Index count, double radius, double noise_sd, std::uint64_t seed) {
  if (count < 1) throw ConfigError("noisy circle: need at least one point");
  if (!(radius > 0.0)) throw ConfigError("noisy circle: radius must be positive");
  if (!(noise_sd >= 0.0)) throw ConfigError("noisy circle: noise must be non-negative");
  Rng rng(seed);
  Dataset d;
  d.points.resize(count, 2);
  for (Index i = 0; i < count; ++i) {
    const double phi = 2.0 * std::numbers::pi * rng.uniform();
    const double e1 = rng.normal();
    const double e2 = rng.normal();
    d.points(i, 0) = radius * std::cos(phi) + noise_sd * e1;
    d.points(i, 1) = radius * std::sin(phi) + noise_sd * e2;
  }
  return d;
}

Dataset gen_two_circles_on_sphere(Index per_circle, double sphere_radius, double noise_var,
                                  std::uint64_t seed, double plane_offset) {
  if (per_circle < 1) throw ConfigError("two circles: need at least one point per circle");
  if (!(noise_var >= 0.0)) throw ConfigError("two circles: noise variance must be non-negative");
  if (!(std::abs(plane_offset) < sphere_radius)) {
    throw ConfigError("two circles: planes must cut the sphere");
  }
  const double r = std::sqrt(sphere_radius * sphere_radius - plane_offset * plane_offset);
  const double sd = std::sqrt(noise_var);
  Rng rng(seed);
  Dataset d;
  d.points.resize(2 * per_circle, 3);
  d.labels = std::vector<int>(static_cast<std::size_t>(2 * per_circle));
  for (int c = 0; c < 2; ++c) {
    const double height = c == 0 ? plane_offset : -plane_offset;
    for (Index k = 0; k < per_circle; ++k) {
      const Index i = c * per_circle + k;
      const double phi = 2.0 * std::numbers::pi * rng.uniform();
      d.points(i, 0) = r * std::cos(phi) + sd * rng.normal();
      d.points(i, 1) = r * std::sin(phi) + sd * rng.normal();
      d.points(i, 2) = height + sd * rng.normal();
      (*d.labels)[static_cast<std::size_t>(i)] = c;
    }
  }
  return d;
}

Dataset gen_gaussian_cloud(Index count, int dim, std::uint64_t seed) {
  if (count < 1 || dim < 1) throw ConfigError("gaussian cloud: need count >= 1 and dim >= 1");
  Rng rng(seed);
  return Dataset{standard_normal(count, dim, rng), std::nullopt};
}

Dataset gen_grid(const std::vector<std::pair<double, double>>& bounds, Index resolution, Index cap) {
  if (bounds.empty()) throw ConfigError("grid: need at least one dimension");
  if (resolution < 2) throw ConfigError("grid: resolution must be >= 2");
  Index total = 1;
  for (const auto& [lo, hi] : bounds) {
    if (!(lo < hi)) throw ConfigError("grid: each lower bound must be below its upper bound");
    if (total > cap / resolution) {
      throw ConfigError("grid: resolution^n exceeds the cap of " + std::to_string(cap) + " points");
    }
    total *= resolution;
  }
  const Index n = static_cast<Index>(bounds.size());
  Dataset d;
  d.points.resize(total, n);
  std::vector<Index> digit(static_cast<std::size_t>(n), 0);
  for (Index i = 0; i < total; ++i) {
    for (Index k = 0; k < n; ++k) {
      const auto& [lo, hi] = bounds[static_cast<std::size_t>(k)];
      const double t = static_cast<double>(digit[static_cast<std::size_t>(k)]) /
                       static_cast<double>(resolution - 1);
      d.points(i, k) = lo + t * (hi - lo);
    }
    for (Index k = n - 1; k >= 0; --k) {
      auto& dg = digit[static_cast<std::size_t>(k)];
      if (++dg < resolution) break;
      dg = 0;
    }
  }
  return d;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool parse_double(std::string_view s, double& out) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

bool parse_int(std::string_view s, int& out) {
  double v = 0.0;
  if (!parse_double(s, v) || v != std::floor(v) || std::abs(v) > 1e9) return false;
  out = static_cast<int>(v);
  return true;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? line.npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

ParseError line_error(std::size_t line_no, const std::string& what) {
  return ParseError("line " + std::to_string(line_no) + ": " + what);
}

Dataset assemble(std::vector<double>&& values, Index rows, Index cols, std::vector<int>&& labels,
                 bool labelled) {
  Dataset d;
  d.points.resize(rows, cols);
  std::copy(values.begin(), values.end(), d.points.data());
  if (labelled) d.labels = std::move(labels);
  return d;
}

}  // namespace

Dataset parse_csv(std::istream& is) {
  std::string line;
  std::size_t line_no = 0;
  bool seen_first = false;
  bool labelled = false;
  Index cols = -1;  // feature columns
  std::vector<double> values;
  std::vector<int> labels;
  Index rows = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const auto text = trim(line);
    if (text.empty()) continue;
    const auto fields = split(text, ',');
    if (!seen_first) {
      seen_first = true;
      double probe = 0.0;
      bool header = false;
      for (auto f : fields) header = header || !parse_double(f, probe);
      if (header) {
        labelled = trim(fields.back()) == "label";
        cols = static_cast<Index>(fields.size()) - (labelled ? 1 : 0);
        if (cols < 1) throw line_error(line_no, "header has no feature columns");
        continue;
      }
      cols = static_cast<Index>(fields.size());
    }
    const Index expected = cols + (labelled ? 1 : 0);
    if (static_cast<Index>(fields.size()) != expected) {
      throw line_error(line_no, "expected " + std::to_string(expected) + " fields, found " +
                                    std::to_string(fields.size()));
    }
    for (Index k = 0; k < cols; ++k) {
      double v = 0.0;
      if (!parse_double(fields[static_cast<std::size_t>(k)], v) || !std::isfinite(v)) {
        throw line_error(line_no, "invalid number '" +
                                      std::string(trim(fields[static_cast<std::size_t>(k)])) + "'");
      }
      values.push_back(v);
    }
    if (labelled) {
      int lab = 0;
      if (!parse_int(fields.back(), lab)) throw line_error(line_no, "label is not an integer");
      labels.push_back(lab);
    }
    ++rows;
  }
  if (!seen_first) throw ParseError("empty file");
  return assemble(std::move(values), rows, cols, std::move(labels), labelled);
}

Dataset parse_usps(std::istream& is) {
  constexpr Index kFeatures = 256;
  std::string line;
  std::size_t line_no = 0;
  std::vector<double> values;
  std::vector<int> labels;
  Index rows = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const auto fields = split_ws(line);
    if (fields.empty()) continue;
    if (static_cast<Index>(fields.size()) != kFeatures + 1) {
      throw line_error(line_no, "expected a label and 256 features, found " +
                                    std::to_string(fields.size() - 1) + " features");
    }
    int lab = 0;
    if (!parse_int(fields[0], lab)) throw line_error(line_no, "label is not an integer");
    labels.push_back(lab);
    for (Index k = 1; k <= kFeatures; ++k) {
      double v = 0.0;
      if (!parse_double(fields[static_cast<std::size_t>(k)], v)) {
        throw line_error(line_no, "invalid number '" + std::string(fields[static_cast<std::size_t>(k)]) + "'");
      }
      if (v < -1.0 || v > 1.0) throw line_error(line_no, "feature outside [-1, 1]");
      values.push_back(v);
    }
    ++rows;
  }
  if (rows == 0) throw ParseError("empty file");
  return assemble(std::move(values), rows, kFeatures, std::move(labels), true);
}

Dataset load_dataset(const std::filesystem::path& path, DataFormat format) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open " + path.string());
  try {
    return format == DataFormat::Csv ? parse_csv(is) : parse_usps(is);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, ptr);
}

void write_csv(std::ostream& os, const Dataset& data) {
  for (Index k = 0; k < data.dim(); ++k) os << (k ? "," : "") << 'x' << k + 1;
  if (data.labels) os << ",label";
  os << '\n';
  for (Index i = 0; i < data.rows(); ++i) {
    for (Index k = 0; k < data.dim(); ++k) os << (k ? "," : "") << format_double(data.points(i, k));
    if (data.labels) os << ',' << (*data.labels)[static_cast<std::size_t>(i)];
    os << '\n';
  }
}

void save_csv(const std::filesystem::path& path, const Dataset& data) {
  std::ostringstream os;
  write_csv(os, data);
  write_file_atomic(path, os.str());
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  auto tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw Error("cannot write " + path.string());
    os.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!os) throw Error("write failed for " + path.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw Error("cannot write " + path.string() + ": " + ec.message());
  }
}

}  // namespace ipca
