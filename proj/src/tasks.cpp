#include "ipca/tasks.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <map>
#include <numeric>
#include <ostream>

namespace ipca {

double quantile(std::vector<double> values, double p) {
  if (values.empty()) throw std::invalid_argument("quantile of an empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("quantile level must lie in [0, 1]");
  std::sort(values.begin(), values.end());
  const double h = p * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_line: need >= 2 pairs");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LineFit f;
  f.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  f.intercept = my - f.slope * mx;
  f.r2 = (sxx > 0.0 && syy > 0.0) ? (sxy * sxy) / (sxx * syy) : 1.0;
  return f;
}

// ------------------------------------------------------- manifold estimation

ManifoldEstimate estimate_manifold(const Matrix& X, const Matrix& Z, const KernelParams& params,
                                   Index cutoff_m, double quantile_q, const Dataset& grid,
                                   bool center, const Tolerance& tol) {
  if (cutoff_m < 1) throw ConfigError("manifold estimation: cutoff m must be >= 1");
  if (!(quantile_q > 0.0 && quantile_q < 1.0)) {
    throw ConfigError("manifold estimation: quantile must lie in (0, 1)");
  }
  const IpcaModel model = ipca_fit(X, Z, params, Truncation::top(cutoff_m), center, tol);
  ManifoldEstimate est;
  est.components = model.components();
  est.train_norms = certify_norms(model, X);
  est.threshold = quantile({est.train_norms.begin(), est.train_norms.end()}, 1.0 - quantile_q);
  est.grid = grid;
  est.norms = certify_norms(model, grid.points);
  est.in_manifold.resize(static_cast<std::size_t>(est.norms.size()));
  for (Index i = 0; i < est.norms.size(); ++i) {
    est.in_manifold[static_cast<std::size_t>(i)] = est.norms[i] <= est.threshold ? 1 : 0;
  }
  return est;
}

std::vector<std::pair<double, double>> default_grid_bounds(const Matrix& X, double margin) {
  if (X.rows() == 0) throw Error("grid bounds: no data");
  std::vector<std::pair<double, double>> b;
  for (Index k = 0; k < X.cols(); ++k) {
    const double lo = X.col(k).minCoeff();
    const double hi = X.col(k).maxCoeff();
    const double pad = hi > lo ? margin * (hi - lo) : 1.0;
    b.emplace_back(lo - pad, hi + pad);
  }
  return b;
}

Index count_grid_components(const std::vector<std::uint8_t>& mask, Index resolution, Index dim) {
  Index total = 1;
  for (Index k = 0; k < dim; ++k) total *= resolution;
  if (static_cast<Index>(mask.size()) != total) {
    throw std::invalid_argument("count_grid_components: mask size does not match the grid");
  }
  std::vector<Index> stride(static_cast<std::size_t>(dim));
  Index s = 1;
  for (Index k = dim - 1; k >= 0; --k) {
    stride[static_cast<std::size_t>(k)] = s;
    s *= resolution;
  }
  std::vector<std::uint8_t> seen(mask.size(), 0);
  std::vector<Index> stack;
  Index count = 0;
  for (Index start = 0; start < total; ++start) {
    if (!mask[static_cast<std::size_t>(start)] || seen[static_cast<std::size_t>(start)]) continue;
    ++count;
    stack.push_back(start);
    seen[static_cast<std::size_t>(start)] = 1;
    while (!stack.empty()) {
      const Index cell = stack.back();
      stack.pop_back();
      for (Index k = 0; k < dim; ++k) {
        const Index st = stride[static_cast<std::size_t>(k)];
        const Index coord = (cell / st) % resolution;
        for (int dir : {-1, 1}) {
          if ((dir < 0 && coord == 0) || (dir > 0 && coord == resolution - 1)) continue;
          const Index nb = cell + dir * st;
          if (mask[static_cast<std::size_t>(nb)] && !seen[static_cast<std::size_t>(nb)]) {
            seen[static_cast<std::size_t>(nb)] = 1;
            stack.push_back(nb);
          }
        }
      }
    }
  }
  return count;
}

void write_manifold_csv(std::ostream& os, const ManifoldEstimate& est) {
  const Index n = est.grid.dim();
  for (Index k = 0; k < n; ++k) os << 'x' << k + 1 << ',';
  os << "norm,in_manifold\n";
  for (Index i = 0; i < est.grid.rows(); ++i) {
    for (Index k = 0; k < n; ++k) os << format_double(est.grid.points(i, k)) << ',';
    os << format_double(est.norms[i]) << ',' << int(est.in_manifold[static_cast<std::size_t>(i)])
       << '\n';
  }
}

// ------------------------------------------------------------ classification

ZMode parse_z_mode(std::string_view name) {
  if (name == "random") return ZMode::Random;
  if (name == "subsample") return ZMode::Subsample;
  if (name == "degenerate") return ZMode::Degenerate;
  if (name == "file") return ZMode::File;
  throw ConfigError("unknown z mode '" + std::string(name) + "'");
}

namespace {

// k distinct indices of [0, n) by partial Fisher-Yates.
std::vector<Index> sample_distinct(Index n, Index k, Rng& rng) {
  std::vector<Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Index{0});
  for (Index i = 0; i < k; ++i) {
    const Index j = i + rng.index(n - i);
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
  }
  idx.resize(static_cast<std::size_t>(k));
  return idx;
}

Matrix gather_rows(const Matrix& A, const std::vector<Index>& rows) {
  Matrix out(static_cast<Index>(rows.size()), A.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Index>(i)) = A.row(rows[i]);
  return out;
}

}  // namespace

Matrix choose_z(ZMode mode, const Matrix& pool, Index M, Rng& rng) {
  if (M < 1) throw ConfigError("number of Z points must be >= 1");
  const Index N = pool.rows();
  switch (mode) {
    case ZMode::Random:
      return standard_normal(M, pool.cols(), rng);
    case ZMode::Subsample: {
      if (N < 1) throw Error("cannot subsample Z from an empty dataset");
      if (M <= N) return gather_rows(pool, sample_distinct(N, M, rng));
      std::vector<Index> rows(static_cast<std::size_t>(M));
      for (auto& r : rows) r = rng.index(N);
      return gather_rows(pool, rows);
    }
    case ZMode::Degenerate: {
      if (N < 1) throw Error("cannot subsample Z from an empty dataset");
      const auto base = sample_distinct(N, std::max<Index>(1, N / 4), rng);
      std::vector<Index> rows(static_cast<std::size_t>(M));
      for (auto& r : rows) r = base[static_cast<std::size_t>(rng.index(static_cast<Index>(base.size())))];
      return gather_rows(pool, rows);
    }
    case ZMode::File:
      break;
  }
  throw ConfigError("z mode 'file' needs an explicit Z matrix");
}

std::pair<std::vector<int>, std::vector<Matrix>> split_by_label(const Dataset& data) {
  if (!data.labels) throw Error("dataset has no labels");
  std::map<int, std::vector<Index>> groups;
  for (Index i = 0; i < data.rows(); ++i) groups[(*data.labels)[static_cast<std::size_t>(i)]].push_back(i);
  std::pair<std::vector<int>, std::vector<Matrix>> out;
  for (const auto& [id, rows] : groups) {
    out.first.push_back(id);
    out.second.push_back(gather_rows(data.points, rows));
  }
  return out;
}

ClassifierModel train_classifier(std::span<const Matrix> classes, std::span<const int> class_ids,
                                 const Matrix& Z, const KernelParams& params,
                                 const Truncation& trunc, bool center, const Tolerance& tol) {
  if (classes.size() < 2) throw ConfigError("need >= 2 classes");
  if (class_ids.size() != classes.size()) throw std::invalid_argument("one class id per class");
  for (const auto& c : classes) {
    if (c.rows() == 0) throw ConfigError("every class needs at least one point");
  }
  std::vector<std::size_t> order(classes.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return class_ids[a] < class_ids[b]; });
  for (std::size_t k = 1; k < order.size(); ++k) {
    if (class_ids[order[k]] == class_ids[order[k - 1]]) throw ConfigError("duplicate class id");
  }

  ClassifierModel model;
  model.Z = Z;
  model.params = params;
  model.models.resize(classes.size());
  std::vector<std::exception_ptr> errors(classes.size());
  const auto count = static_cast<long>(classes.size());
#pragma omp parallel for schedule(dynamic)
  for (long k = 0; k < count; ++k) {
    const auto src = order[static_cast<std::size_t>(k)];
    try {
      model.models[static_cast<std::size_t>(k)] = ipca_fit(classes[src], Z, params, trunc, center, tol);
    } catch (...) {
      errors[static_cast<std::size_t>(k)] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  for (auto k : order) model.class_ids.push_back(class_ids[k]);
  return model;
}

Matrix class_residuals(const ClassifierModel& model, const Matrix& points) {
  Matrix R(points.rows(), static_cast<Index>(model.models.size()));
  for (std::size_t c = 0; c < model.models.size(); ++c) {
    R.col(static_cast<Index>(c)) = certify_norms(model.models[c], points);
  }
  return R;
}

namespace {

int argmin_class(const ClassifierModel& model, const RowVector& residuals) {
  Index best = 0;
  for (Index c = 1; c < residuals.size(); ++c) {
    if (residuals[c] < residuals[best]) best = c;
  }
  return model.class_ids[static_cast<std::size_t>(best)];
}

}  // namespace

int classify(const ClassifierModel& model, std::span<const double> x) {
  RowVector r(static_cast<Index>(model.models.size()));
  for (std::size_t c = 0; c < model.models.size(); ++c) {
    r[static_cast<Index>(c)] = ipca_eval(model.models[c], x).v_perp_norm;
  }
  return argmin_class(model, r);
}

std::vector<int> classify_batch(const ClassifierModel& model, const Matrix& points) {
  const Matrix R = class_residuals(model, points);
  std::vector<int> out(static_cast<std::size_t>(points.rows()));
  for (Index i = 0; i < points.rows(); ++i) out[static_cast<std::size_t>(i)] = argmin_class(model, R.row(i));
  return out;
}

FeatureKind parse_feature_kind(std::string_view name) {
  if (name == "left") return FeatureKind::Left;
  if (name == "right") return FeatureKind::Right;
  if (name == "certifying") return FeatureKind::Certifying;
  throw ConfigError("unknown feature kind '" + std::string(name) + "'");
}

Matrix extract_features(const IpcaModel& model, const Matrix& points, FeatureKind kind) {
  const Index cols = kind == FeatureKind::Certifying ? model.z_size() : model.components();
  Matrix F(points.rows(), cols);
  const Index n = points.cols();
  if (n != model.params.dim) throw DimensionError("extract_features: dimension mismatch");
#pragma omp parallel for schedule(static) if (points.rows() > 64)
  for (Index i = 0; i < points.rows(); ++i) {
    const IpcaFeatures f = ipca_eval(model, {points.data() + i * n, static_cast<std::size_t>(n)});
    switch (kind) {
      case FeatureKind::Left: F.row(i) = f.u; break;
      case FeatureKind::Right: F.row(i) = f.v; break;
      case FeatureKind::Certifying: F.row(i) = f.v_perp; break;
    }
  }
  return F;
}

std::vector<int> linear_classify(const Matrix& features_train, std::span<const int> labels_train,
                                 const Matrix& features_test, double lambda) {
  if (features_train.rows() != static_cast<Index>(labels_train.size())) {
    throw DimensionError("linear_classify: one label per training row");
  }
  if (features_train.cols() != features_test.cols()) {
    throw DimensionError("linear_classify: train and test feature counts differ");
  }
  if (labels_train.empty()) throw Error("linear_classify: no training data");
  std::vector<int> classes(labels_train.begin(), labels_train.end());
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());

  const Index N = features_train.rows();
  const Index p = features_train.cols() + 1;
  Eigen::MatrixXd D(N, p);
  D.leftCols(p - 1) = features_train;
  D.col(p - 1).setOnes();
  Eigen::MatrixXd Y(N, static_cast<Index>(classes.size()));
  for (std::size_t c = 0; c < classes.size(); ++c) {
    for (Index i = 0; i < N; ++i) {
      Y(i, static_cast<Index>(c)) = labels_train[static_cast<std::size_t>(i)] == classes[c] ? 1.0 : -1.0;
    }
  }
  Eigen::MatrixXd A = D.transpose() * D;
  A.diagonal().array() += lambda;
  const Eigen::MatrixXd rhs = D.transpose() * Y;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(A);
  Eigen::MatrixXd W;
  if (ldlt.info() == Eigen::Success && ldlt.isPositive()) W = ldlt.solve(rhs);
  if (W.size() == 0 || !W.allFinite() || ldlt.info() != Eigen::Success) {
    W = Eigen::MatrixXd(pinv(A) * rhs);
  }

  Eigen::MatrixXd T(features_test.rows(), p);
  T.leftCols(p - 1) = features_test;
  T.col(p - 1).setOnes();
  const Eigen::MatrixXd scores = T * W;
  std::vector<int> out(static_cast<std::size_t>(features_test.rows()));
  for (Index i = 0; i < scores.rows(); ++i) {
    Index best = 0;
    for (Index c = 1; c < scores.cols(); ++c) {
      if (scores(i, c) > scores(i, best)) best = c;
    }
    out[static_cast<std::size_t>(i)] = classes[static_cast<std::size_t>(best)];
  }
  return out;
}

double accuracy(std::span<const int> predicted, std::span<const int> truth) {
  if (predicted.size() != truth.size()) throw std::invalid_argument("accuracy: size mismatch");
  if (truth.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hits += predicted[i] == truth[i];
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

// ----------------------------------------------------------------- benchmark

std::vector<Index> default_bench_sizes() {
  std::vector<Index> n;
  for (Index v = 10; v <= 1000; v += 10) n.push_back(v);
  return n;
}

namespace {

Dataset bench_data(const GeneratorSpec& gen, Index N) {
  GeneratorSpec spec = gen;
  spec.count = gen.kind == GeneratorKind::TwoCirclesOnSphere ? (N + 1) / 2 : N;
  Dataset d = generate(spec);
  if (d.rows() < N) throw ConfigError("benchmark generator produced too few points");
  d.points.conservativeResize(N, Eigen::NoChange);
  if (d.labels) d.labels->resize(static_cast<std::size_t>(N));
  return d;
}

template <typename F>
BenchCell time_cell(Index N, std::string algo, Index reps, F&& run) {
  using clock = std::chrono::steady_clock;
  run();  // warm-up
  BenchCell cell;
  cell.n = N;
  cell.algo = std::move(algo);
  for (Index r = 0; r < reps; ++r) {
    const auto t0 = clock::now();
    run();
    const auto t1 = clock::now();
    cell.samples.push_back(std::chrono::duration<double>(t1 - t0).count());
  }
  cell.mean_s = std::accumulate(cell.samples.begin(), cell.samples.end(), 0.0) /
                static_cast<double>(cell.samples.size());
  cell.q10_s = quantile(cell.samples, 0.1);
  cell.q90_s = quantile(cell.samples, 0.9);
  return cell;
}

}  // namespace

BenchReport run_benchmark(const BenchConfig& config) {
  if (config.repetitions < 1) throw ConfigError("benchmark: repetitions must be >= 1");
  if (config.n_values.empty()) throw ConfigError("benchmark: no N values");
  config.params.validate();
  Rng zrng(config.generator.seed ^ 0x9e3779b97f4a7c15ULL);
  const Matrix Z = standard_normal(config.z_count, config.params.dim, zrng);

  BenchReport report;
  report.n_values = config.n_values;
  for (Index N : config.n_values) {
    const Dataset data = bench_data(config.generator, N);
    if (data.dim() != config.params.dim) throw ConfigError("benchmark: generator dimension mismatch");
    const Index m = std::min(config.cutoff_m, N);
    volatile double sink = 0.0;
    report.kernel_pca.push_back(time_cell(N, "kernel_pca", config.repetitions, [&] {
      sink = sink + kernel_pca(data.points, config.params, m).eigvals[0];
    }));
    report.ipca_fit.push_back(time_cell(N, "ipca", config.repetitions, [&] {
      sink = sink + ipca_fit(data.points, Z, config.params, Truncation::top(m)).S[0];
    }));
  }
  return report;
}

void write_bench_csv(std::ostream& os, const BenchReport& report) {
  os << "N,algo,mean_s,q10_s,q90_s\n";
  auto row = [&](const BenchCell& c) {
    os << c.n << ',' << c.algo << ',' << format_double(c.mean_s) << ',' << format_double(c.q10_s)
       << ',' << format_double(c.q90_s) << '\n';
  };
  for (std::size_t i = 0; i < report.n_values.size(); ++i) {
    row(report.kernel_pca[i]);
    row(report.ipca_fit[i]);
  }
}

}  // namespace ipca
