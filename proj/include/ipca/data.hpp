#pragma once

#include "ipca/kernel.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ipca {

/// Seeded random stream: std::mt19937_64 (whose output sequence is fixed by
/// the C++ standard), uniforms from the top 53 bits of each draw, normals by
/// Box-Muller consuming two uniforms per pair and returning the cosine branch
/// first. Identical seeds give identical streams on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1).
  double uniform();
  double normal();
  /// Uniform integer in [0, n).
  Index index(Index n);

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// rows x dim matrix of independent standard normal entries.
Matrix standard_normal(Index rows, Index dim, Rng& rng);

enum class GeneratorKind { NoisyCircle, TwoCirclesOnSphere, GaussianCloud, Grid };

GeneratorKind parse_generator_kind(std::string_view name);
std::string_view to_string(GeneratorKind kind);

/// Kind-specific meaning of the fields:
///   noisy_circle:          count points, radius, noise = standard deviation
///   two_circles_on_sphere: count per circle, radius of the sphere, noise = variance
///   gaussian_cloud:        count points in `dim` dimensions, standard normal
///   grid:                  count points per axis over [-radius, radius]^dim
struct GeneratorSpec {
  GeneratorKind kind = GeneratorKind::NoisyCircle;
  Index count = 400;
  double radius = 10.0;
  double noise = 1.0;
  int dim = 2;
  std::uint64_t seed = 0;
};

Dataset generate(const GeneratorSpec& spec);

/// Angle uniform on [0, 2 pi), point radius (cos, sin) plus noise_sd times a
/// standard normal pair.
Dataset gen_noisy_circle(Index count, double radius = 10.0, double noise_sd = 1.0,
                         std::uint64_t seed = 0);

/// Two circles cut from the sphere of radius `sphere_radius` by the planes
/// z = +plane_offset (label 0) and z = -plane_offset (label 1), each point
/// perturbed by Gaussian noise of variance noise_var per coordinate.
Dataset gen_two_circles_on_sphere(Index per_circle, double sphere_radius = 5.0,
                                  double noise_var = 0.1, std::uint64_t seed = 0,
                                  double plane_offset = 2.0);

Dataset gen_gaussian_cloud(Index count, int dim, std::uint64_t seed = 0);

inline constexpr Index kDefaultGridCap = 10'000'000;

/// Regular grid, resolution points per axis, row-major with the last
/// coordinate varying fastest.
Dataset gen_grid(const std::vector<std::pair<double, double>>& bounds, Index resolution,
                 Index cap = kDefaultGridCap);

enum class DataFormat { Csv, Usps };

/// csv: one point per line, comma-separated; an optional header line whose
/// last column is "label" marks an integer label column.
/// usps: whitespace-separated "label f1 ... f256", features in [-1, 1].
Dataset load_dataset(const std::filesystem::path& path, DataFormat format = DataFormat::Csv);
Dataset parse_csv(std::istream& is);
Dataset parse_usps(std::istream& is);

/// %.17g, round-trips every double.
std::string format_double(double v);

/// Header x1..xn (plus ",label" when labelled), then one row per point.
void write_csv(std::ostream& os, const Dataset& data);
void save_csv(const std::filesystem::path& path, const Dataset& data);

/// Write to "<path>.tmp.<pid>" and rename over path.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace ipca
