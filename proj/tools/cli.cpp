#include "cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "fgl/inference.hpp"
#include "fgl/io.hpp"
#include "fgl/serialize.hpp"
#include "fgl/simulation.hpp"
#include "fgl/solver.hpp"

namespace fgl::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const char* kVersion = "fgl " FGL_VERSION;

struct GridSpec {
  double start = 0.05;
  double stop = 0.3;
  int count = 30;

  std::vector<double> values() const { return linear_grid(start, stop, count); }
  std::string str() const {
    return io::format_double(start) + ":" + io::format_double(stop) + ":" + std::to_string(count);
  }
};

GridSpec parse_grid(const std::string& text) {
  std::stringstream ss(text);
  std::string a;
  std::string b;
  std::string c;
  if (!std::getline(ss, a, ':') || !std::getline(ss, b, ':') || !std::getline(ss, c)) {
    throw InvalidInput("grid spec '" + text + "' must be start:stop:count");
  }
  try {
    GridSpec g{std::stod(a), std::stod(b), std::stoi(c)};
    if (g.count < 1) throw InvalidInput("grid count must be positive");
    return g;
  } catch (const std::logic_error&) {
    throw InvalidInput("grid spec '" + text + "' must be start:stop:count");
  }
}

Entry parse_entry(const std::string& text, Index p) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw InvalidInput("entry '" + text + "' must be i,j");
  long i = 0;
  long j = 0;
  try {
    i = std::stol(text.substr(0, comma));
    j = std::stol(text.substr(comma + 1));
  } catch (const std::logic_error&) {
    throw InvalidInput("entry '" + text + "' must be i,j");
  }
  if (i < 1 || j < 1 || i > p || j > p) {
    throw InvalidInput("entry '" + text + "' outside 1.." + std::to_string(p));
  }
  return {i - 1, j - 1};
}

std::vector<double> parse_coefficients(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string field;
  while (std::getline(ss, field, ',')) {
    try {
      out.push_back(std::stod(field));
    } catch (const std::logic_error&) {
      throw InvalidInput("cannot parse coefficient '" + field + "'");
    }
  }
  return out;
}

// Options shared by the commands that run the solver.
struct SolverOptions {
  double eta = 1.0;
  double tol = 1e-5;
  int max_iter = 500;
  bool relative = false;
  bool weight_by_n = false;
  bool no_center = false;

  void add_to(CLI::App& app) {
    app.add_option("--eta", eta, "ADMM augmented penalty")->capture_default_str();
    app.add_option("--tol", tol, "primal and dual stopping tolerance")->capture_default_str();
    app.add_option("--max-iter", max_iter, "ADMM iteration cap")->capture_default_str();
    app.add_flag("--relative", relative, "scale tolerances by p");
    app.add_flag("--weight-by-n", weight_by_n, "weight each group's loss by its sample size");
    app.add_flag("--no-center", no_center, "do not subtract column means");
  }

  AdmmSettings settings() const {
    AdmmSettings s;
    s.eta = eta;
    s.tol_primal = tol;
    s.tol_dual = tol;
    s.max_iter = max_iter;
    s.relative = relative;
    return s;
  }

  json to_json() const {
    return {{"eta", eta}, {"tol", tol}, {"max_iter", max_iter}, {"relative", relative}};
  }

  void from_json(const json& j) {
    eta = j.value("eta", eta);
    tol = j.value("tol", tol);
    max_iter = j.value("max_iter", max_iter);
    relative = j.value("relative", relative);
  }
};

struct Inputs {
  MultiGroupDataset dataset;
  std::vector<SymMatrix> sigmas;
  std::vector<long> ns;
};

Inputs load_inputs(const std::vector<std::string>& paths, bool center) {
  if (paths.empty()) throw InvalidInput("at least one --input file is required");
  Inputs in;
  for (const auto& path : paths) {
    auto table = io::read_observations_csv(path);
    if (in.dataset.variable_names.empty()) in.dataset.variable_names = table.names;
    in.dataset.groups.push_back(std::move(table.values));
    in.dataset.labels.push_back(fs::path(path).stem().string());
  }
  in.dataset.validate();
  in.ns = in.dataset.sample_sizes();
  for (const auto& g : in.dataset.groups) in.sigmas.push_back(sample_covariance(g, center));
  return in;
}

AdmmSettings with_weights(AdmmSettings s, bool weight_by_n, const std::vector<long>& ns) {
  if (weight_by_n) s.group_weights.assign(ns.begin(), ns.end());
  return s;
}

fs::path resolve_output_dir(const std::string& flag) {
  fs::path dir = flag;
  if (dir.empty()) {
    const char* env = std::getenv("FGL_OUTPUT_DIR");
    dir = env != nullptr && *env != '\0' ? fs::path(env) : fs::path("fgl-output");
  }
  fs::create_directories(dir);
  return dir;
}

void write_json(const fs::path& path, const json& j) { io::write_text(path, j.dump(2) + "\n"); }

json manifest(const std::string& command, const json& config) {
  return {{"tool", "fgl"}, {"version", FGL_VERSION}, {"command", command}, {"config", config}};
}

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw InvalidInput("config '" + path + "': " + e.what());
  }
  if (j.contains("config") && j.contains("command")) return j.at("config");
  return j;
}

// ---------------------------------------------------------------- fit

struct FitCommand {
  std::vector<std::string> inputs;
  double lambda = 0.0;
  double rho = 0.0;
  bool weighted = false;
  SolverOptions solver;

  void add_to(CLI::App& app) {
    app.add_option("-i,--input", inputs, "observation CSV, one per group")->required();
    app.add_option("--lambda", lambda, "l1 sparsity weight")->required();
    app.add_option("--rho", rho, "fusion weight")->required();
    app.add_flag("--weighted", weighted, "solve on correlation scale and map back");
    solver.add_to(app);
  }

  int run(const fs::path& out_dir, std::ostream& out) const {
    const Inputs in = load_inputs(inputs, !solver.no_center);
    const PenaltyParams params{lambda, rho, weighted};
    const AdmmSettings settings = with_weights(solver.settings(), solver.weight_by_n, in.ns);
    json doc;
    bool converged = false;
    if (weighted) {
      const WeightedFit wf = fit_fgl_weighted(in.sigmas, params, settings);
      std::vector<SymMatrix> correlations;
      for (const auto& s : in.sigmas) correlations.push_back(correlation_summary(s).correlation);
      doc = fit_to_json(wf.fit_r);
      json tw = json::array();
      for (std::size_t g = 0; g < wf.thetas_w.size(); ++g) {
        tw.push_back(io::matrix_to_json(wf.thetas_w[g].dense()));
        io::write_matrix_csv(out_dir / ("theta_R_" + std::to_string(g + 1) + ".csv"),
                             wf.fit_r.thetas[g].dense());
        io::write_matrix_csv(out_dir / ("theta_w_" + std::to_string(g + 1) + ".csv"),
                             wf.thetas_w[g].dense());
        io::write_matrix_csv(out_dir / ("scale_" + std::to_string(g + 1) + ".csv"),
                             wf.scales[g].dense());
      }
      doc["thetas_w"] = std::move(tw);
      write_json(out_dir / "kkt.json", kkt_to_json(kkt_check(wf.fit_r, correlations, params)));
      converged = wf.fit_r.converged;
    } else {
      const FglFit fit = fit_fgl(in.sigmas, params, settings);
      doc = fit_to_json(fit);
      for (std::size_t g = 0; g < fit.thetas.size(); ++g) {
        io::write_matrix_csv(out_dir / ("theta_" + std::to_string(g + 1) + ".csv"),
                             fit.thetas[g].dense());
      }
      write_json(out_dir / "kkt.json", kkt_to_json(kkt_check(fit, in.sigmas, params)));
      converged = fit.converged;
    }
    write_json(out_dir / "fit.json", doc);
    out << "fit " << (converged ? "converged" : "did not converge") << " after "
        << doc["iterations"].get<int>() << " iterations; wrote " << out_dir.string() << "\n";
    return converged ? kExitOk : kExitNotConverged;
  }
};

// ---------------------------------------------------------------- select-tuning

struct SelectCommand {
  std::vector<std::string> inputs;
  std::string lambda_grid = "0.05:0.3:30";
  std::string rho_grid = "0.05:0.3:30";
  SolverOptions solver;

  void add_to(CLI::App& app) {
    app.add_option("-i,--input", inputs, "observation CSV, one per group")->required();
    app.add_option("--lambda-grid", lambda_grid, "start:stop:count")->capture_default_str();
    app.add_option("--rho-grid", rho_grid, "start:stop:count")->capture_default_str();
    solver.add_to(app);
  }

  int run(const fs::path& out_dir, std::ostream& out) const {
    const Inputs in = load_inputs(inputs, !solver.no_center);
    const auto grid = penalty_grid(parse_grid(lambda_grid).values(), parse_grid(rho_grid).values());
    const auto settings = with_weights(solver.settings(), solver.weight_by_n, in.ns);
    const auto sel = select_tuning_aic(in.sigmas, in.ns, grid, settings);
    io::write_text(out_dir / "aic_table.csv", aic_table_csv(sel.table));
    json doc = {{"lambda", sel.best.lambda}, {"rho", sel.best.rho}, {"fit", fit_to_json(sel.best_fit)}};
    write_json(out_dir / "selection.json", doc);
    out << "selected lambda=" << io::format_double(sel.best.lambda)
        << " rho=" << io::format_double(sel.best.rho) << "\n";
    return sel.best_fit.converged ? kExitOk : kExitNotConverged;
  }
};

// ---------------------------------------------------------------- test

struct TestCommand {
  std::vector<std::string> inputs;
  std::string fit_path;
  std::optional<double> lambda;
  std::optional<double> rho;
  std::string lambda_grid = "0.05:0.3:30";
  std::string rho_grid = "0.05:0.3:30";
  std::string coefficients;
  std::vector<std::string> entries;
  bool all = false;
  bool weighted = false;
  double alpha = 0.05;
  double null_value = 0.0;
  SolverOptions solver;

  void add_to(CLI::App& app) {
    app.add_option("-i,--input", inputs, "observation CSV, one per group")->required();
    app.add_option("--fit", fit_path, "fit.json from a previous 'fgl fit'");
    app.add_option("--lambda", lambda, "fit with this lambda instead of AIC selection");
    app.add_option("--rho", rho, "fit with this rho instead of AIC selection");
    app.add_option("--lambda-grid", lambda_grid, "AIC grid when no penalty is given")
        ->capture_default_str();
    app.add_option("--rho-grid", rho_grid, "AIC grid when no penalty is given")
        ->capture_default_str();
    app.add_option("--coef", coefficients, "a_1,...,a_K (default 1,-1 for two groups)");
    app.add_option("--entry", entries, "1-based i,j; repeatable");
    app.add_flag("--all", all, "test every entry i <= j");
    app.add_flag("--weighted", weighted, "use the weighted (correlation-scale) estimator");
    app.add_option("--alpha", alpha, "significance level")->capture_default_str();
    app.add_option("--null", null_value, "hypothesized value of the combination")
        ->capture_default_str();
    solver.add_to(app);
  }

  int run(const fs::path& out_dir, std::ostream& out) const {
    const Inputs in = load_inputs(inputs, !solver.no_center);
    const std::size_t k = in.sigmas.size();
    const Index p = in.dataset.dim();
    for (long n : in.ns) {
      if (n != in.ns.front()) {
        throw UnsupportedDesign("groups must share a common sample size for testing");
      }
    }

    std::vector<double> a = coefficients.empty()
                                ? (k == 2 ? std::vector<double>{1.0, -1.0} : std::vector<double>(k, 1.0))
                                : parse_coefficients(coefficients);
    if (a.size() != k) {
      throw InvalidInput("--coef needs " + std::to_string(k) + " values, got " +
                         std::to_string(a.size()));
    }

    std::vector<SymMatrix> thetas;
    bool converged = true;
    const auto settings = with_weights(solver.settings(), solver.weight_by_n, in.ns);
    if (!fit_path.empty()) {
      json doc = load_config(fit_path);
      FglFit fit = fit_from_json(doc);
      converged = fit.converged;
      if (doc.contains("thetas_w")) {
        for (const auto& t : doc.at("thetas_w")) thetas.emplace_back(io::matrix_from_json(t));
      } else {
        thetas = fit.thetas;
      }
    } else {
      PenaltyParams params;
      if (lambda.has_value() || rho.has_value()) {
        params = {lambda.value_or(0.0), rho.value_or(0.0), weighted};
      } else {
        const auto grid =
            penalty_grid(parse_grid(lambda_grid).values(), parse_grid(rho_grid).values());
        std::vector<SymMatrix> basis = in.sigmas;
        if (weighted) {
          basis.clear();
          for (const auto& s : in.sigmas) basis.push_back(correlation_summary(s).correlation);
        }
        params = select_tuning_aic(basis, in.ns, grid, settings).best;
        params.weighted = weighted;
      }
      if (weighted) {
        auto wf = fit_fgl_weighted(in.sigmas, params, settings);
        converged = wf.fit_r.converged;
        thetas = std::move(wf.thetas_w);
      } else {
        auto fit = fit_fgl(in.sigmas, params, settings);
        converged = fit.converged;
        thetas = std::move(fit.thetas);
      }
    }
    if (thetas.size() != k || thetas.front().dim() != p) {
      throw InvalidInput("fit does not match the input datasets");
    }

    std::vector<Entry> targets;
    if (all) {
      for (Index i = 0; i < p; ++i) {
        for (Index j = i; j < p; ++j) targets.emplace_back(i, j);
      }
    }
    for (const auto& e : entries) targets.push_back(parse_entry(e, p));
    if (targets.empty()) throw InvalidInput("no entries to test; use --entry or --all");

    const DebiasedFit db = debias(thetas, in.sigmas, in.ns);
    std::string csv = test_csv_header(k);
    json records = json::array();
    for (const auto& [i, j] : targets) {
      const LinearHypothesis hyp{a, i, j};
      const TestResult r = test_linear(db, thetas, hyp, null_value, alpha);
      csv += test_csv_row(hyp, r);
      records.push_back(test_to_json(hyp, r));
    }
    io::write_text(out_dir / "tests.csv", csv);
    write_json(out_dir / "tests.json", records);
    out << "tested " << targets.size() << " entries; wrote " << (out_dir / "tests.csv").string()
        << "\n";
    return converged ? kExitOk : kExitNotConverged;
  }
};

// ---------------------------------------------------------------- simulate

struct SimulationOptions {
  Index p = 50;
  Index n = 200;
  double alpha_tilde = 0.1;
  int replications = 200;
  std::uint64_t seed = 1;
  std::string lambda_grid = "0.05:0.3:30";
  std::string rho_grid = "0.05:0.3:30";
  SolverOptions solver;
  std::string config_path;

  void add_to(CLI::App& app) {
    app.add_option("--config", config_path, "experiment config or manifest JSON");
    app.add_option("--p", p, "dimension")->capture_default_str();
    app.add_option("--n", n, "sample size per group")->capture_default_str();
    app.add_option("--alpha-tilde", alpha_tilde, "edge density of the generator")
        ->capture_default_str();
    app.add_option("--replications", replications)->capture_default_str();
    app.add_option("--seed", seed, "master seed")->capture_default_str();
    app.add_option("--lambda-grid", lambda_grid, "start:stop:count")->capture_default_str();
    app.add_option("--rho-grid", rho_grid, "start:stop:count")->capture_default_str();
    solver.add_to(app);
  }

  // Values in the config file are overridden by flags given on the command line.
  void merge_config(const json& c, const CLI::App& app) {
    auto take = [&](const char* key, const char* flag, auto& field) {
      if (c.contains(key) && app.count(flag) == 0) c.at(key).get_to(field);
    };
    take("p", "--p", p);
    take("n", "--n", n);
    take("alpha_tilde", "--alpha-tilde", alpha_tilde);
    take("replications", "--replications", replications);
    take("seed", "--seed", seed);
    take("lambda_grid", "--lambda-grid", lambda_grid);
    take("rho_grid", "--rho-grid", rho_grid);
    if (c.contains("solver")) {
      SolverOptions from_file;
      from_file.from_json(c.at("solver"));
      if (app.count("--eta") == 0) solver.eta = from_file.eta;
      if (app.count("--tol") == 0) solver.tol = from_file.tol;
      if (app.count("--max-iter") == 0) solver.max_iter = from_file.max_iter;
      if (app.count("--relative") == 0) solver.relative = from_file.relative;
    }
    if (c.contains("center") && app.count("--no-center") == 0) solver.no_center = !c.at("center").get<bool>();
  }

  json to_json() const {
    return {{"p", p},
            {"n", n},
            {"alpha_tilde", alpha_tilde},
            {"replications", replications},
            {"seed", seed},
            {"lambda_grid", parse_grid(lambda_grid).str()},
            {"rho_grid", parse_grid(rho_grid).str()},
            {"center", !solver.no_center},
            {"solver", solver.to_json()}};
  }

  ExperimentSettings experiment(int threads) const {
    ExperimentSettings s;
    s.grid = penalty_grid(parse_grid(lambda_grid).values(), parse_grid(rho_grid).values());
    s.admm = solver.settings();
    s.center = !solver.no_center;
    s.threads = threads;
    return s;
  }
};

struct FluctuationCommand {
  SimulationOptions sim;
  std::vector<std::string> entries;
  int bins = 40;

  void add_to(CLI::App& app) {
    sim.add_to(app);
    app.add_option("--entry", entries, "1-based i,j; repeatable (default 1,1 1,p*0.3 1,p*0.6 1,p*0.9)");
    app.add_option("--bins", bins, "histogram bins over [-4, 4)")->capture_default_str();
  }

  int run(const CLI::App& app, const fs::path& out_dir, int threads, std::ostream& out) {
    std::vector<std::string> entry_text = entries;
    if (!sim.config_path.empty()) {
      const json c = load_config(sim.config_path);
      sim.merge_config(c, app);
      if (c.contains("entries") && app.count("--entry") == 0) {
        entry_text = c.at("entries").get<std::vector<std::string>>();
      }
      if (c.contains("bins") && app.count("--bins") == 0) bins = c.at("bins").get<int>();
    }
    if (entry_text.empty()) {
      entry_text.push_back("1,1");
      for (double frac : {0.3, 0.6, 0.9}) {
        const auto j = std::max<Index>(2, static_cast<Index>(frac * static_cast<double>(sim.p)));
        entry_text.push_back("1," + std::to_string(j));
      }
    }
    FluctuationConfig cfg;
    cfg.p = sim.p;
    cfg.n = sim.n;
    cfg.alpha_tilde = sim.alpha_tilde;
    cfg.replications = sim.replications;
    cfg.seed = sim.seed;
    cfg.settings = sim.experiment(threads);
    for (const auto& e : entry_text) cfg.entries.push_back(parse_entry(e, sim.p));

    const FluctuationResult res = run_fluctuation(cfg);
    io::write_text(out_dir / "z_samples.csv", z_samples_csv(res.samples));

    std::ostringstream hist;
    hist << "i,j,bin_low,bin_high,count\n";
    json per_entry = json::array();
    const double low = -4.0;
    const double high = 4.0;
    for (const auto& [i, j] : cfg.entries) {
      std::vector<double> zs;
      for (const auto& s : res.samples) {
        if (s.i == i && s.j == j) zs.push_back(s.z);
      }
      const auto counts = histogram(zs, bins, low, high);
      const double width = (high - low) / bins;
      for (int b = 0; b < bins; ++b) {
        hist << i + 1 << ',' << j + 1 << ',' << io::format_double(low + b * width) << ','
             << io::format_double(low + (b + 1) * width) << ',' << counts[static_cast<std::size_t>(b)]
             << '\n';
      }
      double mean = 0.0;
      for (double z : zs) mean += z;
      mean /= static_cast<double>(zs.size());
      double var = 0.0;
      for (double z : zs) var += (z - mean) * (z - mean);
      const double sd = zs.size() > 1 ? std::sqrt(var / static_cast<double>(zs.size() - 1)) : 0.0;
      per_entry.push_back({{"i", i + 1},
                           {"j", j + 1},
                           {"mean", mean},
                           {"sd", sd},
                           {"ks", ks_statistic_normal(zs)},
                           {"ks_critical_1pct", ks_critical_value(zs.size(), 0.01)}});
    }
    io::write_text(out_dir / "histogram.csv", hist.str());

    json config = sim.to_json();
    config["entries"] = json::array();
    for (const auto& [i, j] : cfg.entries) {
      config["entries"].push_back(std::to_string(i + 1) + "," + std::to_string(j + 1));
    }
    config["bins"] = bins;
    write_json(out_dir / "summary.json", {{"design", "equal"}, {"entries", per_entry}});
    write_json(out_dir / "manifest.json", manifest("simulate-fluctuation", config));
    out << "fluctuation: " << res.samples.size() << " z samples; wrote " << out_dir.string() << "\n";
    return kExitOk;
  }
};

struct CoverageCommand {
  SimulationOptions sim;
  std::string design = "equal";
  double level = 0.95;

  void add_to(CLI::App& app) {
    sim.add_to(app);
    app.add_option("--design", design, "equal | linear | three-sample")->capture_default_str();
    app.add_option("--level", level, "confidence level")->capture_default_str();
  }

  int run(const CLI::App& app, const fs::path& out_dir, int threads, std::ostream& out) {
    if (!sim.config_path.empty()) {
      const json c = load_config(sim.config_path);
      sim.merge_config(c, app);
      if (c.contains("design") && app.count("--design") == 0) design = c.at("design").get<std::string>();
      if (c.contains("level") && app.count("--level") == 0) level = c.at("level").get<double>();
    }
    CoverageConfig cfg;
    cfg.design = design_from_string(design);
    cfg.p = sim.p;
    cfg.n = sim.n;
    cfg.alpha_tilde = sim.alpha_tilde;
    cfg.replications = sim.replications;
    cfg.seed = sim.seed;
    cfg.level = level;
    cfg.settings = sim.experiment(threads);

    const CoverageReport report = run_coverage(cfg);
    io::write_text(out_dir / "coverage.csv", coverage_csv(report));
    json summary = coverage_summary_json(report);
    summary["level"] = level;
    summary["lambda_grid"] = parse_grid(sim.lambda_grid).str();
    summary["rho_grid"] = parse_grid(sim.rho_grid).str();
    write_json(out_dir / "summary.json", summary);
    json config = sim.to_json();
    config["design"] = design;
    config["level"] = level;
    write_json(out_dir / "manifest.json", manifest("simulate-coverage", config));
    out << "coverage (" << design << "): S=" << io::format_double(report.avg_cov_s)
        << " Sc=" << io::format_double(report.avg_cov_sc) << "; wrote " << out_dir.string() << "\n";
    return kExitOk;
  }
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fused graphical lasso estimation and de-biased inference", "fgl"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  std::string out_flag;
  int threads = 1;
  app.add_option("-o,--out", out_flag, "output directory (default $FGL_OUTPUT_DIR or fgl-output)");
  app.add_option("--threads", threads, "worker threads for simulations")->capture_default_str();

  FitCommand fit;
  SelectCommand select;
  TestCommand test;
  FluctuationCommand fluct;
  CoverageCommand coverage;
  auto* fit_app = app.add_subcommand("fit", "fit the fused graphical lasso");
  auto* select_app = app.add_subcommand("select-tuning", "choose (lambda, rho) by AIC");
  auto* test_app = app.add_subcommand("test", "de-biased tests of linear combinations");
  auto* fluct_app = app.add_subcommand("simulate-fluctuation", "z-statistic fluctuation study");
  auto* cov_app = app.add_subcommand("simulate-coverage", "average CI coverage study");
  fit.add_to(*fit_app);
  select.add_to(*select_app);
  test.add_to(*test_app);
  fluct.add_to(*fluct_app);
  coverage.add_to(*cov_app);

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }

  try {
    const fs::path out_dir = resolve_output_dir(out_flag);
    if (fit_app->parsed()) return fit.run(out_dir, out);
    if (select_app->parsed()) return select.run(out_dir, out);
    if (test_app->parsed()) return test.run(out_dir, out);
    if (fluct_app->parsed()) return fluct.run(*fluct_app, out_dir, threads, out);
    if (cov_app->parsed()) return coverage.run(*cov_app, out_dir, threads, out);
  } catch (const UnsupportedDesign& e) {
    err << "error: UnsupportedDesign: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}

}  // namespace fgl::cli
