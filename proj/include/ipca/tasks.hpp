#pragma once

#include "ipca/data.hpp"
#include "ipca/ipca.hpp"

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace ipca {

// ---------------------------------------------------------------- statistics

/// Linear-interpolation quantile (R type 7) of `values`, p in [0, 1].
double quantile(std::vector<double> values, double p);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

/// Ordinary least squares y ~ slope * x + intercept.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

// ------------------------------------------------------- manifold estimation

struct ManifoldEstimate {
  Dataset grid;
  Vector norms;                       // ||v_perp|| per grid point
  std::vector<std::uint8_t> in_manifold;  // norms[i] <= threshold
  double threshold = 0.0;
  Vector train_norms;
  Index components = 0;               // retained m of the fit
};

/// Fits IPCA with the top `cutoff_m` components and marks grid points whose
/// certifying norm does not exceed the (1 - quantile_q)-quantile of the
/// training points' norms.
ManifoldEstimate estimate_manifold(const Matrix& X, const Matrix& Z, const KernelParams& params,
                                   Index cutoff_m, double quantile_q, const Dataset& grid,
                                   bool center = false, const Tolerance& tol = {});

/// Bounding box of X widened by `margin` times its extent on each side.
std::vector<std::pair<double, double>> default_grid_bounds(const Matrix& X, double margin = 0.2);

/// Connected components of the marked cells of a full grid produced by
/// gen_grid (axis-neighbour connectivity).
Index count_grid_components(const std::vector<std::uint8_t>& mask, Index resolution, Index dim);

void write_manifold_csv(std::ostream& os, const ManifoldEstimate& est);

// ------------------------------------------------------------ classification

enum class ZMode { Random, Subsample, Degenerate, File };

ZMode parse_z_mode(std::string_view name);

/// Feature-generating points drawn from `pool`:
///   random      M x n standard normal entries
///   subsample   M distinct rows of pool (with replacement if M > rows)
///   degenerate  M rows drawn with replacement from a distinct subsample of
///               size max(1, rows / 4)
/// ZMode::File is resolved by the caller.
Matrix choose_z(ZMode mode, const Matrix& pool, Index M, Rng& rng);

struct ClassifierModel {
  std::vector<int> class_ids;     // ascending
  std::vector<IpcaModel> models;  // aligned with class_ids
  Matrix Z;
  KernelParams params;
};

/// Splits a labelled dataset into (sorted class ids, per-class point sets).
std::pair<std::vector<int>, std::vector<Matrix>> split_by_label(const Dataset& data);

/// One IPCA fit per class, all sharing Z. Fits run concurrently.
ClassifierModel train_classifier(std::span<const Matrix> classes, std::span<const int> class_ids,
                                 const Matrix& Z, const KernelParams& params,
                                 const Truncation& trunc, bool center = false,
                                 const Tolerance& tol = {});

/// Class whose model gives the smallest certifying norm; ties go to the
/// lowest class id.
int classify(const ClassifierModel& model, std::span<const double> x);

/// Per-class certifying norms for every row (rows x classes).
Matrix class_residuals(const ClassifierModel& model, const Matrix& points);
std::vector<int> classify_batch(const ClassifierModel& model, const Matrix& points);

enum class FeatureKind { Left, Right, Certifying };

FeatureKind parse_feature_kind(std::string_view name);

/// Rows are u (m columns), v (m columns) or v_perp (M columns) per point.
Matrix extract_features(const IpcaModel& model, const Matrix& points, FeatureKind kind);

/// One-vs-all ridge regression on {-1, +1} targets with an intercept and
/// lambda = 1e-6; predicts the arg-max score, ties to the lowest label.
std::vector<int> linear_classify(const Matrix& features_train, std::span<const int> labels_train,
                                 const Matrix& features_test, double lambda = 1e-6);

double accuracy(std::span<const int> predicted, std::span<const int> truth);

// ----------------------------------------------------------------- benchmark

struct BenchCell {
  Index n = 0;
  std::string algo;
  double mean_s = 0.0;
  double q10_s = 0.0;
  double q90_s = 0.0;
  std::vector<double> samples;
};

struct BenchReport {
  std::vector<Index> n_values;
  std::vector<BenchCell> kernel_pca;  // aligned with n_values
  std::vector<BenchCell> ipca_fit;
};

struct BenchConfig {
  std::vector<Index> n_values;
  Index z_count = 12;
  KernelParams params{2, 1.0, 3};
  Index repetitions = 20;
  Index cutoff_m = 6;
  GeneratorSpec generator{GeneratorKind::TwoCirclesOnSphere, 200, 5.0, 0.1, 3, 0};
};

/// N = 10, 20, ..., 1000.
std::vector<Index> default_bench_sizes();

/// Wall-clock timing of kernel_pca against ipca_fit per N. Cells run one at a
/// time; the first run of every (N, algorithm) cell is a discarded warm-up.
BenchReport run_benchmark(const BenchConfig& config);

/// Columns N, algo, mean_s, q10_s, q90_s.
void write_bench_csv(std::ostream& os, const BenchReport& report);

}  // namespace ipca
