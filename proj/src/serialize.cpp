#include "fgl/serialize.hpp"

#include <sstream>

#include "fgl/io.hpp"

namespace fgl {

using io::format_double;

nlohmann::json fit_to_json(const FglFit& fit) {
  nlohmann::json thetas = nlohmann::json::array();
  for (const auto& t : fit.thetas) thetas.push_back(io::matrix_to_json(t.dense()));
  return {
      {"p", fit.dim()},
      {"K", fit.num_groups()},
      {"lambda", fit.params.lambda},
      {"rho", fit.params.rho},
      {"scale", to_string(fit.scale)},
      {"converged", fit.converged},
      {"iterations", fit.iterations},
      {"primal_residual", fit.primal_residual},
      {"dual_residual", fit.dual_residual},
      {"sparse_iterate", fit.sparse_iterate},
      {"thetas", std::move(thetas)},
  };
}

FglFit fit_from_json(const nlohmann::json& j) {
  FglFit fit;
  try {
    fit.params.lambda = j.at("lambda").get<double>();
    fit.params.rho = j.at("rho").get<double>();
    const std::string scale = j.at("scale").get<std::string>();
    if (scale != "covariance" && scale != "correlation") {
      throw InvalidInput("fit JSON: unknown scale '" + scale + "'");
    }
    fit.scale = scale == "covariance" ? FitScale::Covariance : FitScale::Correlation;
    fit.params.weighted = fit.scale == FitScale::Correlation;
    fit.converged = j.at("converged").get<bool>();
    fit.iterations = j.at("iterations").get<int>();
    for (const auto& t : j.at("thetas")) fit.thetas.emplace_back(io::matrix_from_json(t));
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("fit JSON: ") + e.what());
  }
  const auto k = j.at("K").get<std::size_t>();
  const auto p = j.at("p").get<Index>();
  if (fit.thetas.size() != k || fit.dim() != p) {
    throw InvalidInput("fit JSON: thetas do not match p and K");
  }
  return fit;
}

nlohmann::json kkt_to_json(const KktReport& report) {
  return {
      {"stationarity", report.stationarity},
      {"max_stationarity", report.max_stationarity()},
      {"dual_feasibility_excess", report.dual_feasibility_excess},
      {"complementarity_violations", report.complementarity_violations},
  };
}

nlohmann::json test_to_json(const LinearHypothesis& hyp, const TestResult& r) {
  return {
      {"i", hyp.i + 1},          {"j", hyp.j + 1},        {"a", hyp.coefficients},
      {"T", r.statistic},        {"sigma_hat", r.sigma_hat}, {"z", r.z},
      {"p_value", r.p_value},    {"ci_low", r.ci_low},    {"ci_high", r.ci_high},
      {"reject", r.reject},      {"alpha", r.alpha},
  };
}

std::string test_csv_header(std::size_t k) {
  std::string h = "i,j";
  for (std::size_t g = 1; g <= k; ++g) h += ",a" + std::to_string(g);
  return h + ",T,sigma_hat,z,p_value,ci_low,ci_high,reject\n";
}

std::string test_csv_row(const LinearHypothesis& hyp, const TestResult& r) {
  std::ostringstream ss;
  ss << hyp.i + 1 << ',' << hyp.j + 1;
  for (double a : hyp.coefficients) ss << ',' << format_double(a);
  ss << ',' << format_double(r.statistic) << ',' << format_double(r.sigma_hat) << ','
     << format_double(r.z) << ',' << format_double(r.p_value) << ',' << format_double(r.ci_low)
     << ',' << format_double(r.ci_high) << ',' << (r.reject ? 1 : 0) << '\n';
  return ss.str();
}

std::string aic_table_csv(std::span<const AicEntry> table) {
  std::ostringstream ss;
  ss << "lambda,rho,aic,converged\n";
  for (const auto& e : table) {
    ss << format_double(e.params.lambda) << ',' << format_double(e.params.rho) << ','
       << format_double(e.aic) << ',' << (e.converged ? 1 : 0) << '\n';
  }
  return ss.str();
}

std::string z_samples_csv(std::span<const ZSample> samples) {
  std::ostringstream ss;
  ss << "replication,i,j,z\n";
  for (const auto& s : samples) {
    ss << s.replication << ',' << s.i + 1 << ',' << s.j + 1 << ',' << format_double(s.z) << '\n';
  }
  return ss.str();
}

std::string coverage_csv(const CoverageReport& report) {
  std::ostringstream ss;
  ss << "i,j,hits,reps,in_S\n";
  for (Index i = 0; i < report.p; ++i) {
    for (Index j = i; j < report.p; ++j) {
      ss << i + 1 << ',' << j + 1 << ',' << report.hits(i, j) << ',' << report.replications
         << ',' << (report.in_s(i, j) ? 1 : 0) << '\n';
    }
  }
  return ss.str();
}

nlohmann::json coverage_summary_json(const CoverageReport& report) {
  return {
      {"design", to_string(report.design)},
      {"p", report.p},
      {"n", report.n},
      {"alpha_tilde", report.alpha_tilde},
      {"replications", report.replications},
      {"grid_size", report.grid_size},
      {"avg_cov_S", report.avg_cov_s},
      {"avg_cov_Sc", report.avg_cov_sc},
  };
}

}  // namespace fgl
