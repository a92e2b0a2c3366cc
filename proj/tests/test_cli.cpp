#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cli.hpp"
#include "doctest.h"
#include "fgl/io.hpp"
#include "fgl/simulation.hpp"
#include "helpers.hpp"

namespace fs = std::filesystem;
using namespace fgl;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name)
      : path(fs::temp_directory_path() / ("fgl_cli_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& f) const { return (path / f).string(); }
};

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "fgl");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

void write_data(const std::string& path, const Eigen::MatrixXd& x) {
  std::ofstream f(path);
  for (Index j = 0; j < x.cols(); ++j) f << (j ? "," : "") << "v" << j + 1;
  f << "\n";
  for (Index i = 0; i < x.rows(); ++i) {
    for (Index j = 0; j < x.cols(); ++j) f << (j ? "," : "") << io::format_double(x(i, j));
    f << "\n";
  }
}

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// Rows of a CSV with a header, split into fields.
std::vector<std::vector<std::string>> csv_rows(const std::string& path) {
  std::ifstream f(path);
  std::string line;
  std::getline(f, line);
  std::vector<std::vector<std::string>> rows;
  while (std::getline(f, line)) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    rows.push_back(fields);
  }
  return rows;
}

void two_group_files(const TempDir& d, Index p, Index n, std::uint64_t seed) {
  const auto truth = generate_precision({p, 0.2, seed});
  write_data(d / "g1.csv", sample_gaussian(truth.theta0[0], n, seed + 1));
  write_data(d / "g2.csv", sample_gaussian(truth.theta0[0], n, seed + 2));
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("version and help") {
  auto v = run_cli({"--version"});
  CHECK(v.code == 0);
  CHECK(v.out.find(FGL_VERSION) != std::string::npos);
  CHECK(run_cli({"--help"}).code == 0);
  CHECK(run_cli({}).code == 1);
  CHECK(run_cli({"fit", "--bogus"}).code == 1);
}

TEST_CASE("unpenalized single-group fit inverts the sample covariance") {
  TempDir d("fit1");
  const Eigen::MatrixXd x = fgl::testing::random_matrix(60, 4, 8);
  write_data(d / "g.csv", x);
  auto r = run_cli({"--out", d / "out", "fit", "-i", d / "g.csv", "--lambda", "0", "--rho", "0",
                    "--tol", "1e-9", "--max-iter", "5000"});
  REQUIRE(r.code == 0);
  const Eigen::MatrixXd theta = io::read_matrix_csv(d / "out/theta_1.csv");
  const Eigen::MatrixXd inv = inverse_pd(sample_covariance(x)).dense();
  CHECK(fgl::testing::sup_diff(theta, inv) < 1e-3);
  const auto fit = nlohmann::json::parse(slurp(d / "out/fit.json"));
  CHECK(fit["converged"] == true);
  CHECK(fs::exists(d / "out/kkt.json"));
}

TEST_CASE("identical inputs give identical theta files") {
  TempDir d("fit2");
  two_group_files(d, 8, 80, 3);
  auto r = run_cli({"--out", d / "out", "fit", "-i", d / "g1.csv", "-i", d / "g1.csv",
                    "--lambda", "0.1", "--rho", "0.2"});
  REQUIRE(r.code == 0);
  CHECK(fgl::testing::sup_diff(io::read_matrix_csv(d / "out/theta_1.csv"),
                               io::read_matrix_csv(d / "out/theta_2.csv")) < 1e-6);
}

TEST_CASE("weighted fit writes both scales consistently") {
  TempDir d("fitw");
  two_group_files(d, 8, 80, 4);
  auto r = run_cli({"--out", d / "out", "fit", "-i", d / "g1.csv", "-i", d / "g2.csv",
                    "--lambda", "0.1", "--rho", "0.1", "--weighted"});
  REQUIRE(r.code == 0);
  for (int k = 1; k <= 2; ++k) {
    const auto tr = io::read_matrix_csv(d / ("out/theta_R_" + std::to_string(k) + ".csv"));
    const auto tw = io::read_matrix_csv(d / ("out/theta_w_" + std::to_string(k) + ".csv"));
    const auto w = io::read_matrix_csv(d / ("out/scale_" + std::to_string(k) + ".csv"));
    CHECK(fgl::testing::sup_diff(w * tw * w, tr) <= 1e-12);
  }
}

TEST_CASE("non-convergence exits 2 but still writes the fit") {
  TempDir d("fitnc");
  two_group_files(d, 8, 80, 5);
  auto r = run_cli({"--out", d / "out", "fit", "-i", d / "g1.csv", "-i", d / "g2.csv",
                    "--lambda", "0.1", "--rho", "0.1", "--max-iter", "2"});
  CHECK(r.code == 2);
  CHECK(fs::exists(d / "out/fit.json"));
}

TEST_CASE("parse errors exit 1 with a location") {
  TempDir d("parse");
  {
    std::ofstream f(d / "bad.csv");
    f << "a,b\n1,2\n3,x\n";
  }
  auto r = run_cli({"--out", d / "out", "fit", "-i", d / "bad.csv", "--lambda", "0.1", "--rho", "0"});
  CHECK(r.code == 1);
  CHECK(r.err.find(":3:3:") != std::string::npos);
}

TEST_CASE("tests on identical datasets give zero statistics") {
  TempDir d("test0");
  two_group_files(d, 6, 60, 6);
  auto r = run_cli({"--out", d / "out", "test", "-i", d / "g1.csv", "-i", d / "g1.csv",
                    "--lambda", "0.1", "--rho", "0.1", "--all"});
  REQUIRE(r.code == 0);
  const auto rows = csv_rows(d / "out/tests.csv");
  CHECK(rows.size() == 21);
  for (const auto& row : rows) CHECK(std::stod(row[6]) == 0.0);
}

TEST_CASE("rejection sets are nested in alpha and p-values follow the normal CDF") {
  TempDir d("testalpha");
  two_group_files(d, 10, 120, 7);
  const std::vector<std::string> base{"test", "-i", d / "g1.csv", "-i", d / "g2.csv",
                                      "--lambda", "0.1", "--rho", "0.05", "--all"};
  auto args05 = std::vector<std::string>{"--out", d / "a05"};
  args05.insert(args05.end(), base.begin(), base.end());
  args05.insert(args05.end(), {"--alpha", "0.05"});
  auto args01 = std::vector<std::string>{"--out", d / "a01"};
  args01.insert(args01.end(), base.begin(), base.end());
  args01.insert(args01.end(), {"--alpha", "0.01"});
  REQUIRE(run_cli(args05).code == 0);
  REQUIRE(run_cli(args01).code == 0);
  const auto r05 = csv_rows(d / "a05/tests.csv");
  const auto r01 = csv_rows(d / "a01/tests.csv");
  REQUIRE(r05.size() == r01.size());
  for (std::size_t k = 0; k < r05.size(); ++k) {
    if (r01[k][10] == "1") CHECK(r05[k][10] == "1");
    const double z = std::stod(r05[k][6]);
    const double p = std::stod(r05[k][7]);
    CHECK(std::abs(p - std::erfc(std::abs(z) / std::sqrt(2.0))) < 1e-12);
  }
}

TEST_CASE("unequal sample sizes are rejected for testing") {
  TempDir d("unequal");
  const auto truth = generate_precision({5, 0.2, 9});
  write_data(d / "g1.csv", sample_gaussian(truth.theta0[0], 40, 1));
  write_data(d / "g2.csv", sample_gaussian(truth.theta0[0], 50, 2));
  auto r = run_cli({"--out", d / "out", "test", "-i", d / "g1.csv", "-i", d / "g2.csv",
                    "--lambda", "0.1", "--rho", "0.1", "--entry", "1,2"});
  CHECK(r.code == 1);
  CHECK(r.err.find("UnsupportedDesign") != std::string::npos);
}

TEST_CASE("select-tuning writes the AIC table") {
  TempDir d("select");
  two_group_files(d, 8, 100, 10);
  auto r = run_cli({"--out", d / "out", "select-tuning", "-i", d / "g1.csv", "-i", d / "g2.csv",
                    "--lambda-grid", "0.05:0.3:3", "--rho-grid", "0.05:0.3:2"});
  REQUIRE(r.code == 0);
  CHECK(csv_rows(d / "out/aic_table.csv").size() == 6);
  const auto sel = nlohmann::json::parse(slurp(d / "out/selection.json"));
  CHECK(sel.contains("lambda"));
}

TEST_CASE("simulations are byte-identical on re-run and from the manifest") {
  TempDir d("sim");
  const std::vector<std::string> common{"--p", "8", "--n", "60", "--replications", "3",
                                        "--seed", "21", "--lambda-grid", "0.1:0.3:2",
                                        "--rho-grid", "0.1:0.1:1"};
  auto cov = [&](const std::string& out, std::vector<std::string> extra) {
    std::vector<std::string> a{"--out", d / out, "simulate-coverage", "--design", "linear"};
    a.insert(a.end(), extra.begin(), extra.end());
    return run_cli(a);
  };
  REQUIRE(cov("c1", common).code == 0);
  REQUIRE(cov("c2", common).code == 0);
  CHECK(slurp(d / "c1/coverage.csv") == slurp(d / "c2/coverage.csv"));
  REQUIRE(cov("c3", {"--config", d / "c1/manifest.json"}).code == 0);
  CHECK(slurp(d / "c1/coverage.csv") == slurp(d / "c3/coverage.csv"));
  CHECK(slurp(d / "c1/summary.json") == slurp(d / "c3/summary.json"));

  // worker count does not change the outputs
  auto threaded = common;
  std::vector<std::string> a{"--threads", "3", "--out", d / "c4", "simulate-coverage", "--design",
                             "linear"};
  a.insert(a.end(), threaded.begin(), threaded.end());
  REQUIRE(run_cli(a).code == 0);
  CHECK(slurp(d / "c1/coverage.csv") == slurp(d / "c4/coverage.csv"));

  const auto summary = nlohmann::json::parse(slurp(d / "c1/summary.json"));
  for (const char* key : {"avg_cov_S", "avg_cov_Sc"}) {
    REQUIRE(summary.contains(key));
    CHECK(summary[key].get<double>() >= 0.0);
    CHECK(summary[key].get<double>() <= 1.0);
  }
  const auto manifest = nlohmann::json::parse(slurp(d / "c1/manifest.json"));
  CHECK(manifest["version"] == FGL_VERSION);
  CHECK(manifest["config"]["seed"] == 21);

  auto fl = [&](const std::string& out, std::vector<std::string> extra) {
    std::vector<std::string> b{"--out", d / out, "simulate-fluctuation", "--entry", "1,3"};
    b.insert(b.end(), extra.begin(), extra.end());
    return run_cli(b);
  };
  REQUIRE(fl("f1", common).code == 0);
  REQUIRE(fl("f2", common).code == 0);
  CHECK(slurp(d / "f1/z_samples.csv") == slurp(d / "f2/z_samples.csv"));
  CHECK(slurp(d / "f1/histogram.csv") == slurp(d / "f2/histogram.csv"));
  REQUIRE(fl("f3", {"--config", d / "f1/manifest.json"}).code == 0);
  CHECK(slurp(d / "f1/z_samples.csv") == slurp(d / "f3/z_samples.csv"));
  CHECK(csv_rows(d / "f1/z_samples.csv").size() == 3);
}

TEST_CASE("invalid design exits 1") {
  TempDir d("baddesign");
  auto r = run_cli({"--out", d / "out", "simulate-coverage", "--design", "cubic", "--p", "5",
                    "--replications", "1"});
  CHECK(r.code == 1);
}

TEST_CASE("output directory from the environment") {
  TempDir d("env");
  two_group_files(d, 5, 40, 12);
  setenv("FGL_OUTPUT_DIR", (d / "envout").c_str(), 1);
  auto r = run_cli({"fit", "-i", d / "g1.csv", "--lambda", "0.1", "--rho", "0"});
  unsetenv("FGL_OUTPUT_DIR");
  CHECK(r.code == 0);
  CHECK(fs::exists(d / "envout/fit.json"));
}

}
