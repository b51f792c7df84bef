#include "cli.hpp"

#include "ipca/model_io.hpp"
#include "ipca/poly.hpp"
#include "ipca/tasks.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

namespace ipca::cli {

namespace {

using json = nlohmann::json;

// ------------------------------------------------------------------ options

struct KernelOpts {
  int degree = 2;
  double theta = 1.0;
};

struct CutoffOpts {
  std::optional<double> eps;
  std::optional<Index> cutoff;
};

struct ZOpts {
  std::string mode = "random";
  std::string path;
  Index count = 12;
};

struct TolOpts {
  double rank_tol = 1e-8;
  double residual_tol = 1e-6;
};

void add_kernel(CLI::App* app, KernelOpts& k) {
  app->add_option("--degree,-d", k.degree, "Polynomial kernel degree")->capture_default_str();
  app->add_option("--theta", k.theta, "Kernel scale theta")->capture_default_str();
}

void add_cutoff(CLI::App* app, CutoffOpts& c) {
  auto* eps = app->add_option("--eps", c.eps, "Keep singular values >= eps");
  auto* m = app->add_option("--cutoff,-m", c.cutoff, "Keep the top m singular values");
  eps->excludes(m);
}

void add_z(CLI::App* app, ZOpts& z) {
  app->add_option("--z-mode", z.mode, "random | subsample | degenerate | file")
      ->capture_default_str();
  app->add_option("--z", z.path, "CSV of feature-generating points (implies --z-mode file)");
  app->add_option("--z-count,-M", z.count, "Number of feature-generating points")
      ->capture_default_str();
}

void add_tol(CLI::App* app, TolOpts& t) {
  app->add_option("--rank-tol", t.rank_tol, "Relative rank tolerance")->capture_default_str();
  app->add_option("--residual-tol", t.residual_tol, "Relative residual tolerance")
      ->capture_default_str();
}

KernelParams kernel_params(const KernelOpts& k, Index dim) {
  KernelParams p{k.degree, k.theta, static_cast<int>(dim)};
  p.validate();
  return p;
}

Truncation truncation(const CutoffOpts& c, std::optional<Index> fallback = std::nullopt) {
  if (c.eps) return Truncation::threshold(*c.eps);
  if (c.cutoff) return Truncation::top(*c.cutoff);
  if (fallback) return Truncation::top(*fallback);
  throw ConfigError("exactly one of --eps and --cutoff is required");
}

Tolerance tolerance(const TolOpts& t) {
  Tolerance tol{t.rank_tol, t.residual_tol};
  tol.validate();
  return tol;
}

DataFormat parse_format(const std::string& s) {
  if (s == "csv") return DataFormat::Csv;
  if (s == "usps") return DataFormat::Usps;
  throw ConfigError("unknown data format '" + s + "'");
}

Matrix resolve_z(const ZOpts& z, const Matrix& pool, std::uint64_t seed) {
  const ZMode mode = z.path.empty() ? parse_z_mode(z.mode) : ZMode::File;
  if (mode == ZMode::File) {
    if (z.path.empty()) throw ConfigError("--z-mode file needs --z <path>");
    const Dataset zd = load_dataset(z.path);
    if (zd.rows() == 0) throw ConfigError("Z file has no rows");
    return zd.points;
  }
  Rng rng(seed);
  return choose_z(mode, pool, z.count, rng);
}

std::string join(const Vector& v, int precision = 6) {
  std::ostringstream os;
  os << std::setprecision(precision);
  for (Index i = 0; i < v.size(); ++i) os << (i ? " " : "") << v[i];
  return os.str();
}

// ------------------------------------------------------------ config file

std::string normalize_key(std::string key) {
  std::replace(key.begin(), key.end(), '_', '-');
  return key;
}

std::string json_scalar(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number()) return format_double(v.get<double>());
  throw ConfigError("config values must be strings, numbers, booleans or arrays");
}

bool flag_given(const std::vector<std::string>& args, const std::string& flag) {
  return std::any_of(args.begin(), args.end(), [&](const std::string& a) {
    return a == flag || a.rfind(flag + "=", 0) == 0;
  });
}

// Values from a JSON object, rendered as command-line tokens for the keys the
// user did not pass explicitly, so flags always win over the file.
std::vector<std::string> config_tokens(const std::string& path, const std::vector<std::string>& args) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file " + path);
  json doc;
  try {
    doc = json::parse(is);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file " + path + ": " + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config file must hold a JSON object");
  std::vector<std::string> out;
  for (const auto& [key, value] : doc.items()) {
    const std::string flag = "--" + normalize_key(key);
    if (flag == "--config" || flag_given(args, flag)) continue;
    if (value.is_boolean()) {
      out.push_back(flag + "=" + (value.get<bool>() ? "true" : "false"));
    } else if (value.is_array()) {
      std::string joined;
      for (const auto& item : value) joined += (joined.empty() ? "" : ",") + json_scalar(item);
      out.push_back(flag + "=" + joined);
    } else if (!value.is_null()) {
      out.push_back(flag + "=" + json_scalar(value));
    }
  }
  return out;
}

// Inserts config tokens right after the subcommand name.
std::vector<std::string> apply_config(std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    }
  }
  if (path.empty()) return args;
  const auto tokens = config_tokens(path, args);
  static const std::vector<std::string> commands{"gen", "fit", "eval", "manifold", "classify", "bench"};
  auto sub = std::find_if(args.begin(), args.end(), [](const std::string& a) {
    return std::find(commands.begin(), commands.end(), a) != commands.end();
  });
  const auto at = sub == args.end() ? args.end() : sub + 1;
  args.insert(at, tokens.begin(), tokens.end());
  return args;
}

void apply_thread_env() {
  if (const char* env = std::getenv("IPCA_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || n < 1) throw ConfigError("IPCA_THREADS must be a positive integer");
    set_max_threads(static_cast<int>(n));
  }
}

// --------------------------------------------------------------- commands

struct GenOpts {
  std::string kind = "noisy-circle";
  std::optional<Index> count;
  std::optional<double> radius;
  std::optional<double> noise;
  int dim = 2;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_gen(const GenOpts& o, std::ostream& out) {
  GeneratorSpec spec;
  spec.kind = parse_generator_kind(o.kind);
  spec.seed = o.seed;
  spec.dim = o.dim;
  switch (spec.kind) {
    case GeneratorKind::NoisyCircle:
      spec.count = o.count.value_or(400);
      spec.radius = o.radius.value_or(10.0);
      spec.noise = o.noise.value_or(1.0);
      break;
    case GeneratorKind::TwoCirclesOnSphere:
      spec.count = o.count.value_or(200);
      spec.radius = o.radius.value_or(5.0);
      spec.noise = o.noise.value_or(0.1);
      break;
    case GeneratorKind::GaussianCloud:
      spec.count = o.count.value_or(400);
      break;
    case GeneratorKind::Grid:
      spec.count = o.count.value_or(50);
      spec.radius = o.radius.value_or(1.0);
      break;
  }
  const Dataset d = generate(spec);
  save_csv(o.out, d);
  out << "wrote " << d.rows() << " rows x " << d.dim() << " columns"
      << (d.labels ? " (+label)" : "") << " to " << o.out << '\n';
  return 0;
}

struct FitOpts {
  std::string data;
  std::string format = "csv";
  KernelOpts kernel;
  CutoffOpts cut;
  ZOpts z;
  TolOpts tol;
  bool center = false;
  bool check = false;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_fit(const FitOpts& o, std::ostream& out) {
  const Dataset d = load_dataset(o.data, parse_format(o.format));
  if (d.rows() == 0) throw ConfigError("training data has no rows");
  const KernelParams p = kernel_params(o.kernel, d.dim());
  const Tolerance tol = tolerance(o.tol);
  const Matrix Z = resolve_z(o.z, d.points, o.seed);
  const IpcaModel m = ipca_fit(d.points, Z, p, truncation(o.cut), o.center, tol);
  save_model(o.out, m);
  out << "components: " << m.components() << '\n';
  out << "singular values: " << join(m.S, 10) << '\n';
  if (o.check) {
    out << "decomposition error: " << std::setprecision(6) << std::scientific
        << decomposition_error(d.points, Z, p, tol) << std::defaultfloat << '\n';
  }
  out << "model written to " << o.out << '\n';
  return 0;
}

struct EvalOpts {
  std::string model;
  std::string data;
  std::string format = "csv";
  bool full = false;
  std::string out;
};

int cmd_eval(const EvalOpts& o, std::ostream& out) {
  const IpcaModel m = load_model(o.model);
  const Dataset d = load_dataset(o.data, parse_format(o.format));
  if (d.rows() > 0 && d.dim() != m.params.dim) {
    throw DimensionError("data has " + std::to_string(d.dim()) + " columns, model expects " +
                         std::to_string(m.params.dim));
  }
  std::ostringstream os;
  const Index k = m.components();
  for (Index j = 0; j < k; ++j) os << "u_" << j + 1 << ',';
  for (Index j = 0; j < k; ++j) os << "v_" << j + 1 << ',';
  os << "vperp_norm";
  if (o.full) {
    for (Index j = 0; j < m.z_size(); ++j) os << ",vperp_" << j + 1;
  }
  os << '\n';
  for (Index i = 0; i < d.rows(); ++i) {
    const IpcaFeatures f = ipca_eval(m, d.row(i));
    for (Index j = 0; j < k; ++j) os << format_double(f.u[j]) << ',';
    for (Index j = 0; j < k; ++j) os << format_double(f.v[j]) << ',';
    os << format_double(f.v_perp_norm);
    if (o.full) {
      for (Index j = 0; j < f.v_perp.size(); ++j) os << ',' << format_double(f.v_perp[j]);
    }
    os << '\n';
  }
  write_file_atomic(o.out, os.str());
  out << "evaluated " << d.rows() << " points with " << k << " components to " << o.out << '\n';
  return 0;
}

struct ManifoldOpts {
  std::string data;
  KernelOpts kernel;
  Index cutoff = 5;
  double quantile = 0.1;
  ZOpts z;
  TolOpts tol;
  std::optional<Index> resolution;
  std::vector<double> bounds;
  double margin = 0.2;
  bool center = false;
  std::uint64_t seed = 0;
  std::string out;
};

Index default_resolution(Index dim) {
  if (dim <= 2) return 200;
  if (dim == 3) return 60;
  return 20;
}

int cmd_manifold(const ManifoldOpts& o, std::ostream& out) {
  const Dataset d = load_dataset(o.data);
  if (d.rows() == 0) throw ConfigError("training data has no rows");
  const KernelParams p = kernel_params(o.kernel, d.dim());
  const Matrix Z = resolve_z(o.z, d.points, o.seed);
  std::vector<std::pair<double, double>> bounds;
  if (o.bounds.empty()) {
    bounds = default_grid_bounds(d.points, o.margin);
  } else {
    if (static_cast<Index>(o.bounds.size()) != 2 * d.dim()) {
      throw ConfigError("--bounds needs lo,hi for each of the " + std::to_string(d.dim()) + " dimensions");
    }
    for (std::size_t k = 0; k < o.bounds.size(); k += 2) bounds.emplace_back(o.bounds[k], o.bounds[k + 1]);
  }
  const Index res = o.resolution.value_or(default_resolution(d.dim()));
  const Dataset grid = gen_grid(bounds, res);
  const auto est = estimate_manifold(d.points, Z, p, o.cutoff, o.quantile, grid, o.center, tolerance(o.tol));
  std::ostringstream os;
  write_manifold_csv(os, est);
  write_file_atomic(o.out, os.str());
  const Index in = std::count(est.in_manifold.begin(), est.in_manifold.end(), 1);
  out << "components: " << est.components << '\n';
  out << "threshold: " << std::setprecision(6) << est.threshold << '\n';
  out << "in-manifold: " << in << " of " << grid.rows() << " grid points ("
      << std::fixed << std::setprecision(2) << 100.0 * static_cast<double>(in) / static_cast<double>(grid.rows())
      << "%)" << std::defaultfloat << '\n';
  out << "connected regions: " << count_grid_components(est.in_manifold, res, d.dim()) << '\n';
  return 0;
}

struct ClassifyOpts {
  std::string train;
  std::string test;
  std::string format = "csv";
  KernelOpts kernel;
  CutoffOpts cut;
  ZOpts z;
  TolOpts tol;
  std::string method = "min-norm";
  std::string features = "certifying";
  bool center = false;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_classify(const ClassifyOpts& o, std::ostream& out) {
  const DataFormat fmt = parse_format(o.format);
  const Dataset train = load_dataset(o.train, fmt);
  const Dataset test = o.test.empty() ? train : load_dataset(o.test, fmt);
  if (!train.labels) throw ConfigError("training data needs a label column");
  if (train.rows() == 0) throw ConfigError("training data has no rows");
  if (test.rows() > 0 && test.dim() != train.dim()) throw DimensionError("train and test dimensions differ");
  const KernelParams p = kernel_params(o.kernel, train.dim());
  const Tolerance tol = tolerance(o.tol);
  const Truncation trunc = truncation(o.cut);
  const Matrix Z = resolve_z(o.z, train.points, o.seed);

  std::vector<int> pred;
  if (o.method == "min-norm") {
    const auto [ids, parts] = split_by_label(train);
    const ClassifierModel model = train_classifier(parts, ids, Z, p, trunc, o.center, tol);
    pred = classify_batch(model, test.points);
  } else if (o.method == "linear") {
    const FeatureKind kind = parse_feature_kind(o.features);
    const IpcaModel model = ipca_fit(train.points, Z, p, trunc, o.center, tol);
    pred = linear_classify(extract_features(model, train.points, kind), *train.labels,
                           extract_features(model, test.points, kind));
  } else {
    throw ConfigError("unknown method '" + o.method + "' (min-norm or linear)");
  }

  std::ostringstream os;
  os << "predicted" << (test.labels ? ",label" : "") << '\n';
  for (std::size_t i = 0; i < pred.size(); ++i) {
    os << pred[i];
    if (test.labels) os << ',' << (*test.labels)[i];
    os << '\n';
  }
  write_file_atomic(o.out, os.str());
  out << "classified " << pred.size() << " points\n";
  if (test.labels) {
    out << "accuracy: " << std::fixed << std::setprecision(4) << accuracy(pred, *test.labels)
        << std::defaultfloat << '\n';
  }
  return 0;
}

struct BenchOpts {
  std::vector<Index> n_values;
  Index z_count = 12;
  KernelOpts kernel;
  int dim = 3;
  Index reps = 20;
  Index cutoff = 6;
  std::string kind = "two-circles";
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_bench(const BenchOpts& o, std::ostream& out) {
  BenchConfig cfg;
  cfg.n_values = o.n_values.empty() ? default_bench_sizes() : o.n_values;
  for (Index n : cfg.n_values) {
    if (n < 1) throw ConfigError("--n-values must be positive");
  }
  cfg.z_count = o.z_count;
  cfg.params = kernel_params(o.kernel, o.dim);
  cfg.repetitions = o.reps;
  cfg.cutoff_m = o.cutoff;
  cfg.generator.kind = parse_generator_kind(o.kind);
  cfg.generator.seed = o.seed;
  cfg.generator.dim = o.dim;
  if (cfg.generator.kind == GeneratorKind::NoisyCircle) {
    cfg.generator.radius = 10.0;
    cfg.generator.noise = 1.0;
  }
  const BenchReport r = run_benchmark(cfg);
  std::ostringstream os;
  write_bench_csv(os, r);
  write_file_atomic(o.out, os.str());
  const auto& kp = r.kernel_pca.back();
  const auto& ip = r.ipca_fit.back();
  out << "N = " << kp.n << ": kernel_pca mean " << std::scientific << std::setprecision(3) << kp.mean_s
      << " s, ipca mean " << ip.mean_s << " s" << std::defaultfloat << '\n';
  out << "report written to " << o.out << '\n';
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Ideal PCA: cross-kernel principal features and manifold certificates", "ipca"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "JSON file with default flag values");

  GenOpts gen;
  auto* g = app.add_subcommand("gen", "Generate a synthetic dataset as CSV");
  g->add_option("--kind", gen.kind, "noisy-circle | two-circles | gaussian | grid")->capture_default_str();
  g->add_option("--n,--count", gen.count, "Points (per circle for two-circles, per axis for grid)");
  g->add_option("--radius", gen.radius, "Circle or sphere radius, grid half-width");
  g->add_option("--noise", gen.noise, "Noise sd (circle) or variance (two-circles)");
  g->add_option("--dim", gen.dim, "Dimension for gaussian and grid")->capture_default_str();
  g->add_option("--seed", gen.seed, "Random seed")->capture_default_str();
  g->add_option("--out,-o", gen.out, "Output CSV")->required();
  g->add_option("--config", config_path, "JSON file with default flag values");

  FitOpts fit;
  auto* f = app.add_subcommand("fit", "Fit an IPCA model");
  f->add_option("--data", fit.data, "Training CSV")->required();
  f->add_option("--format", fit.format, "csv | usps")->capture_default_str();
  add_kernel(f, fit.kernel);
  add_cutoff(f, fit.cut);
  add_z(f, fit.z);
  add_tol(f, fit.tol);
  f->add_flag("--center", fit.center, "Center the cross-kernel factor");
  f->add_flag("--check", fit.check, "Print the matrix decomposition error");
  f->add_option("--seed", fit.seed, "Random seed for Z")->capture_default_str();
  f->add_option("--out,-o", fit.out, "Output model file")->required();
  f->add_option("--config", config_path, "JSON file with default flag values");

  EvalOpts ev;
  auto* e = app.add_subcommand("eval", "Evaluate IPCA features of points");
  e->add_option("--model", ev.model, "Model file")->required();
  e->add_option("--data", ev.data, "Points CSV")->required();
  e->add_option("--format", ev.format, "csv | usps")->capture_default_str();
  e->add_flag("--full", ev.full, "Also write every certifying feature");
  e->add_option("--out,-o", ev.out, "Output CSV")->required();
  e->add_option("--config", config_path, "JSON file with default flag values");

  ManifoldOpts man;
  auto* mf = app.add_subcommand("manifold", "Estimate the data manifold on a grid");
  mf->add_option("--data", man.data, "Training CSV")->required();
  add_kernel(mf, man.kernel);
  mf->add_option("--cutoff,-m", man.cutoff, "Retained components")->capture_default_str();
  mf->add_option("--quantile,-q", man.quantile, "Threshold is the (1 - q)-quantile of training norms")
      ->capture_default_str();
  add_z(mf, man.z);
  add_tol(mf, man.tol);
  mf->add_option("--resolution", man.resolution, "Grid points per axis (default 200 in 2-D, 60 in 3-D)");
  mf->add_option("--bounds", man.bounds, "lo1,hi1,lo2,hi2,... (default: data box widened by --margin)")
      ->delimiter(',');
  mf->add_option("--margin", man.margin, "Relative widening of the data box")->capture_default_str();
  mf->add_flag("--center", man.center, "Center the cross-kernel factor");
  mf->add_option("--seed", man.seed, "Random seed for Z")->capture_default_str();
  mf->add_option("--out,-o", man.out, "Output grid CSV")->required();
  mf->add_option("--config", config_path, "JSON file with default flag values");

  ClassifyOpts cls;
  auto* c = app.add_subcommand("classify", "Train per-class models and classify");
  c->add_option("--train", cls.train, "Labelled training data")->required();
  c->add_option("--test", cls.test, "Data to classify (default: the training data)");
  c->add_option("--format", cls.format, "csv | usps")->capture_default_str();
  add_kernel(c, cls.kernel);
  add_cutoff(c, cls.cut);
  add_z(c, cls.z);
  add_tol(c, cls.tol);
  c->add_option("--method", cls.method, "min-norm | linear")->capture_default_str();
  c->add_option("--features", cls.features, "left | right | certifying (linear method)")
      ->capture_default_str();
  c->add_flag("--center", cls.center, "Center the cross-kernel factor");
  c->add_option("--seed", cls.seed, "Random seed for Z")->capture_default_str();
  c->add_option("--out,-o", cls.out, "Predictions CSV")->required();
  c->add_option("--config", config_path, "JSON file with default flag values");

  BenchOpts bench;
  auto* b = app.add_subcommand("bench", "Time kernel PCA against IPCA");
  b->add_option("--n-values", bench.n_values, "Comma-separated N values (default 10,20,...,1000)")
      ->delimiter(',');
  b->add_option("--z-count,-M", bench.z_count, "Number of feature-generating points")->capture_default_str();
  add_kernel(b, bench.kernel);
  b->add_option("--dim", bench.dim, "Data dimension")->capture_default_str();
  b->add_option("--reps", bench.reps, "Timed repetitions per cell")->capture_default_str();
  b->add_option("--cutoff,-m", bench.cutoff, "Retained components")->capture_default_str();
  b->add_option("--kind", bench.kind, "Generator for the data")->capture_default_str();
  b->add_option("--seed", bench.seed, "Random seed")->capture_default_str();
  b->add_option("--out,-o", bench.out, "Output CSV")->required();
  b->add_option("--config", config_path, "JSON file with default flag values");

  try {
    std::vector<std::string> args = apply_config(raw_args);
    std::reverse(args.begin(), args.end());
    app.parse(args);
    apply_thread_env();
    if (g->parsed()) return cmd_gen(gen, out);
    if (f->parsed()) return cmd_fit(fit, out);
    if (e->parsed()) return cmd_eval(ev, out);
    if (mf->parsed()) return cmd_manifold(man, out);
    if (c->parsed()) return cmd_classify(cls, out);
    if (b->parsed()) return cmd_bench(bench, out);
    return 2;
  } catch (const CLI::ParseError& ex) {
    if (ex.get_exit_code() == 0) return app.exit(ex, out, err);
    err << "error: " << ex.what() << '\n';
    return 2;
  } catch (const Error& ex) {
    err << "error: " << ex.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& ex) {
    err << "error: " << ex.what() << '\n';
    return 2;
  } catch (const std::exception& ex) {
    err << "internal error: " << ex.what() << '\n';
    return 1;
  }
}

}  // namespace ipca::cli
