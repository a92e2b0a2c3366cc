#pragma once

#include <nlohmann/json.hpp>

#include <span>
#include <string>

#include "fgl/inference.hpp"
#include "fgl/simulation.hpp"
#include "fgl/solver.hpp"

namespace fgl {

/// {p, K, lambda, rho, scale, converged, iterations, thetas: [[...]]} plus
/// residual diagnostics.
nlohmann::json fit_to_json(const FglFit& fit);
FglFit fit_from_json(const nlohmann::json& j);

nlohmann::json kkt_to_json(const KktReport& report);

/// One record per test; `hyp.i`, `hyp.j` are written 1-based.
nlohmann::json test_to_json(const LinearHypothesis& hyp, const TestResult& r);

/// Header: i,j,a1..aK,T,sigma_hat,z,p_value,ci_low,ci_high,reject
std::string test_csv_header(std::size_t k);
std::string test_csv_row(const LinearHypothesis& hyp, const TestResult& r);

/// lambda,rho,aic,converged
std::string aic_table_csv(std::span<const AicEntry> table);

/// replication,i,j,z
std::string z_samples_csv(std::span<const ZSample> samples);

/// i,j,hits,reps,in_S over the upper triangle including the diagonal.
std::string coverage_csv(const CoverageReport& report);

nlohmann::json coverage_summary_json(const CoverageReport& report);

}  // namespace fgl
