#include "cli.hpp"

#include "ipca/data.hpp"
#include "ipca/model_io.hpp"

#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace ipca;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result ipca_run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path tmpdir() {
  static const fs::path dir = [] {
    fs::path d = IPCA_TEST_TMPDIR;
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string path(const std::string& name) { return (tmpdir() / name).string(); }

std::string slurp(const std::string& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream is(text);
  for (std::string l; std::getline(is, l);) out.push_back(l);
  return out;
}

Index columns(const std::string& line) { return std::count(line.begin(), line.end(), ',') + 1; }

}  // namespace

TEST_CASE("gen writes the requested datasets deterministically") {
  auto r = ipca_run({"gen", "--kind", "noisy-circle", "--n", "400", "--seed", "7", "--out", path("c1.csv")});
  CHECK(r.code == 0);
  const Dataset c = load_dataset(path("c1.csv"));
  CHECK(c.rows() == 400);
  CHECK(c.dim() == 2);
  CHECK(r.out.find("400 rows x 2 columns") != std::string::npos);

  r = ipca_run({"gen", "--kind", "two-circles", "--seed", "7", "--out", path("t.csv")});
  CHECK(r.code == 0);
  const Dataset t = load_dataset(path("t.csv"));
  CHECK(t.rows() == 400);
  CHECK(t.dim() == 3);
  CHECK(t.labels.has_value());

  ipca_run({"gen", "--kind", "noisy-circle", "--n", "400", "--seed", "7", "--out", path("c2.csv")});
  CHECK(slurp(path("c1.csv")) == slurp(path("c2.csv")));

  CHECK(ipca_run({"gen", "--kind", "spiral", "--out", path("x.csv")}).code == 2);
  CHECK(ipca_run({"gen", "--kind", "noisy-circle", "--out", (tmpdir() / "no/such/dir/x.csv").string()}).code == 2);
  CHECK(ipca_run({"gen"}).code == 2);
  CHECK(ipca_run({"frobnicate"}).code == 2);
  CHECK(ipca_run({"--help"}).code == 0);
}

TEST_CASE("fit on the circle fixture") {
  REQUIRE(ipca_run({"gen", "--n", "50", "--noise", "0", "--seed", "3", "--out", path("circle.csv")}).code == 0);
  auto r = ipca_run({"fit", "--data", path("circle.csv"), "--cutoff", "5", "--check", "--out", path("circle.model")});
  REQUIRE(r.code == 0);
  const auto pos = r.out.find("decomposition error: ");
  REQUIRE(pos != std::string::npos);
  CHECK(std::stod(r.out.substr(pos + 21)) <= 1e-8);
  CHECK(r.out.find("components: 5") != std::string::npos);
  const IpcaModel m = load_model(path("circle.model"));
  CHECK(m.components() == 5);
  CHECK(m.z_size() == 12);

  r = ipca_run({"fit", "--data", path("circle.csv"), "--eps", "1e12", "--out", path("x.model")});
  CHECK(r.code == 2);
  CHECK(r.err.find("no components retained") != std::string::npos);
  CHECK_FALSE(fs::exists(path("x.model")));

  CHECK(ipca_run({"fit", "--data", path("circle.csv"), "--out", path("x.model")}).code == 2);
  CHECK(ipca_run({"fit", "--data", path("circle.csv"), "--eps", "1", "--cutoff", "2", "--out", path("x.model")}).code == 2);
  CHECK(ipca_run({"fit", "--data", path("missing.csv"), "--cutoff", "2", "--out", path("x.model")}).code == 2);
  CHECK(ipca_run({"fit", "--data", path("circle.csv"), "--cutoff", "2", "--z-mode", "file", "--out", path("x.model")}).code == 2);
}

TEST_CASE("fit with an explicit Z file") {
  Matrix Z(7, 2);
  Z << 1, 0, 0, 1, 1, 1, -1, 2, 3, -1, 0.5, 0.25, -2, -2;
  save_csv(path("z.csv"), Dataset{Z, std::nullopt});
  ipca_run({"gen", "--n", "40", "--noise", "0", "--seed", "4", "--out", path("c4.csv")});
  const auto r = ipca_run({"fit", "--data", path("c4.csv"), "--z-mode", "file", "--z", path("z.csv"),
                           "--eps", "0", "--out", path("z.model")});
  REQUIRE(r.code == 0);
  const IpcaModel m = load_model(path("z.model"));
  CHECK((m.Z.array() == Z.array()).all());
}

TEST_CASE("eval writes features") {
  ipca_run({"gen", "--n", "50", "--noise", "0", "--seed", "5", "--out", path("e.csv")});
  REQUIRE(ipca_run({"fit", "--data", path("e.csv"), "--eps", "0", "--out", path("e.model")}).code == 0);
  auto r = ipca_run({"eval", "--model", path("e.model"), "--data", path("e.csv"), "--out", path("feat.csv")});
  REQUIRE(r.code == 0);
  const auto rows = lines(slurp(path("feat.csv")));
  REQUIRE(rows.size() == 51);
  CHECK(rows[0] == "u_1,u_2,u_3,u_4,u_5,v_1,v_2,v_3,v_4,v_5,vperp_norm");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(columns(rows[i]) == 11);
    const double vperp = std::stod(rows[i].substr(rows[i].rfind(',') + 1));
    CHECK(vperp <= 1e-6);
  }

  r = ipca_run({"eval", "--model", path("e.model"), "--data", path("e.csv"), "--full", "--out", path("full.csv")});
  REQUIRE(r.code == 0);
  CHECK(columns(lines(slurp(path("full.csv")))[0]) == 11 + 12);

  {
    std::ofstream os(path("empty.csv"));
    os << "x1,x2\n";
  }
  r = ipca_run({"eval", "--model", path("e.model"), "--data", path("empty.csv"), "--out", path("none.csv")});
  CHECK(r.code == 0);
  CHECK(lines(slurp(path("none.csv"))).size() == 1);

  ipca_run({"gen", "--kind", "two-circles", "--n", "5", "--out", path("three.csv")});
  r = ipca_run({"eval", "--model", path("e.model"), "--data", path("three.csv"), "--out", path("bad.csv")});
  CHECK(r.code == 2);
  {
    std::ofstream os(path("garbage.model"));
    os << "not a model";
  }
  CHECK(ipca_run({"eval", "--model", path("garbage.model"), "--data", path("e.csv"), "--out", path("bad.csv")}).code == 2);
}

TEST_CASE("manifold subcommand") {
  ipca_run({"gen", "--n", "400", "--seed", "6", "--out", path("m.csv")});
  const auto r = ipca_run({"manifold", "--data", path("m.csv"), "--resolution", "60", "--out", path("grid.csv")});
  REQUIRE(r.code == 0);
  const auto rows = lines(slurp(path("grid.csv")));
  REQUIRE(rows.size() == 3601);
  CHECK(rows[0] == "x1,x2,norm,in_manifold");
  Index in = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) in += rows[i].back() == '1';
  CHECK(in > 0);
  CHECK(in < 3600);
  CHECK(ipca_run({"manifold", "--data", path("m.csv"), "--bounds", "0,1", "--out", path("g2.csv")}).code == 2);
  CHECK(ipca_run({"manifold", "--data", path("m.csv"), "--quantile", "0", "--out", path("g2.csv")}).code == 2);
}

TEST_CASE("classify subcommand") {
  // two separated circles with a label column, each row repeated 4 times
  Dataset d;
  const Dataset a = gen_noisy_circle(50, 10.0, 0.3, 1), b = gen_noisy_circle(50, 10.0, 0.3, 2);
  d.points.resize(400, 2);
  d.labels = std::vector<int>(400);
  for (Index i = 0; i < 400; ++i) {
    const bool second = i >= 200;
    d.points.row(i) = (second ? b : a).points.row((i % 200) % 50);
    d.points(i, 0) += second ? 25.0 : -25.0;
    (*d.labels)[static_cast<std::size_t>(i)] = second ? 1 : 0;
  }
  save_csv(path("rep.csv"), d);
  Dataset test;
  test.points.resize(400, 2);
  test.labels = std::vector<int>(400);
  const Dataset ta = gen_noisy_circle(200, 10.0, 0.3, 3), tb = gen_noisy_circle(200, 10.0, 0.3, 4);
  for (Index i = 0; i < 400; ++i) {
    const bool second = i >= 200;
    test.points.row(i) = (second ? tb : ta).points.row(i % 200);
    test.points(i, 0) += second ? 25.0 : -25.0;
    (*test.labels)[static_cast<std::size_t>(i)] = second ? 1 : 0;
  }
  save_csv(path("test.csv"), test);

  auto acc = [](const std::string& out) {
    const auto pos = out.find("accuracy: ");
    REQUIRE(pos != std::string::npos);
    return std::stod(out.substr(pos + 10));
  };
  const auto random = ipca_run({"classify", "--train", path("rep.csv"), "--test", path("test.csv"), "--cutoff", "5",
                                "--z-mode", "random", "--seed", "1", "--out", path("pr.csv")});
  const auto degen = ipca_run({"classify", "--train", path("rep.csv"), "--test", path("test.csv"), "--cutoff", "5",
                               "--z-mode", "degenerate", "--seed", "1", "--out", path("pd.csv")});
  REQUIRE(random.code == 0);
  REQUIRE(degen.code == 0);
  CHECK(acc(random.out) >= acc(degen.out));
  CHECK(acc(random.out) >= 0.9);
  const auto rows = lines(slurp(path("pr.csv")));
  CHECK(rows.size() == 401);
  CHECK(rows[0] == "predicted,label");

  const auto lin = ipca_run({"classify", "--train", path("rep.csv"), "--test", path("test.csv"), "--cutoff", "5",
                             "--method", "linear", "--features", "left", "--out", path("pl.csv")});
  CHECK(lin.code == 0);
  CHECK(ipca_run({"classify", "--train", path("rep.csv"), "--cutoff", "5", "--method", "svm", "--out", path("x.csv")}).code == 2);
  CHECK(ipca_run({"classify", "--train", path("m.csv"), "--cutoff", "5", "--out", path("x.csv")}).code == 2);
}

TEST_CASE("bench subcommand") {
  const auto r = ipca_run({"bench", "--n-values", "20,40,60", "--reps", "2", "--out", path("bench.csv")});
  REQUIRE(r.code == 0);
  const auto rows = lines(slurp(path("bench.csv")));
  REQUIRE(rows.size() == 7);
  CHECK(rows[0] == "N,algo,mean_s,q10_s,q90_s");
  CHECK(rows[1].rfind("20,kernel_pca,", 0) == 0);
  CHECK(rows[2].rfind("20,ipca,", 0) == 0);
  CHECK(ipca_run({"bench", "--reps", "0", "--n-values", "10", "--out", path("b.csv")}).code == 2);
}

TEST_CASE("config file supplies defaults that flags override") {
  ipca_run({"gen", "--n", "40", "--noise", "0", "--seed", "8", "--out", path("cfg.csv")});
  {
    std::ofstream os(path("cfg.json"));
    os << R"({"z_count": 9, "cutoff": 3, "check": true, "seed": 4})";
  }
  auto r = ipca_run({"fit", "--config", path("cfg.json"), "--data", path("cfg.csv"), "--out", path("cfg.model")});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("decomposition error") != std::string::npos);
  IpcaModel m = load_model(path("cfg.model"));
  CHECK(m.z_size() == 9);
  CHECK(m.components() == 3);

  r = ipca_run({"fit", "--config", path("cfg.json"), "--data", path("cfg.csv"), "--cutoff", "4", "--z-count", "11",
                "--out", path("cfg.model")});
  REQUIRE(r.code == 0);
  m = load_model(path("cfg.model"));
  CHECK(m.z_size() == 11);
  CHECK(m.components() == 4);

  {
    std::ofstream os(path("bad.json"));
    os << R"({"no_such_flag": 1})";
  }
  CHECK(ipca_run({"fit", "--config", path("bad.json"), "--data", path("cfg.csv"), "--cutoff", "2", "--out", path("x.model")}).code == 2);
  {
    std::ofstream os(path("broken.json"));
    os << "{";
  }
  CHECK(ipca_run({"fit", "--config", path("broken.json"), "--data", path("cfg.csv"), "--cutoff", "2", "--out", path("x.model")}).code == 2);
}

TEST_CASE("IPCA_THREADS is validated") {
  ipca_run({"gen", "--n", "30", "--seed", "9", "--out", path("th.csv")});
  setenv("IPCA_THREADS", "2", 1);
  CHECK(ipca_run({"fit", "--data", path("th.csv"), "--cutoff", "3", "--out", path("th.model")}).code == 0);
  setenv("IPCA_THREADS", "zero", 1);
  CHECK(ipca_run({"fit", "--data", path("th.csv"), "--cutoff", "3", "--out", path("th.model")}).code == 2);
  unsetenv("IPCA_THREADS");
}
