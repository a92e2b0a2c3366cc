#pragma once

// Synthetic precision matrices, Gaussian sampling and the Monte-Carlo
// experiments: z-statistic fluctuation and average CI coverage.

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fgl/inference.hpp"
#include "fgl/solver.hpp"

namespace fgl {

using Entry = std::pair<Index, Index>;

/// Deterministic seed for (master, stream, index); splitmix64 finalizer.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index);

struct PrecisionGenConfig {
  Index p = 2;
  double alpha_tilde = 0.1;  // edge probability per off-diagonal pair
  std::uint64_t seed = 0;

  void validate() const;
};

struct GroundTruth {
  std::vector<SymMatrix> theta0;
  std::vector<SymMatrix> sigma0;
  std::vector<std::vector<Entry>> support;  // nonzero strictly-upper entries, i < j
  std::vector<long> sparsity;               // s_k counts ordered pairs, 2 |support_k|
  long max_degree = 0;                      // d = max_k max_j |D_j^[k]|

  std::size_t num_groups() const { return theta0.size(); }
};

/// Raw draws behind one generated matrix: the symmetric 0/1 graph and the
/// iid Uniform(0,1) matrix (not symmetric).
struct PrecisionDraws {
  Eigen::MatrixXi graph;
  Eigen::MatrixXd uniform;
  Eigen::MatrixXd theta_tilde;
};

/// Builds a ground truth from already-formed precision matrices.
GroundTruth make_ground_truth(std::vector<SymMatrix> theta0);

GroundTruth generate_precision(const PrecisionGenConfig& cfg);
GroundTruth generate_precision(const PrecisionGenConfig& cfg, PrecisionDraws* draws);

/// n iid rows from N(0, theta0^-1).
Eigen::MatrixXd sample_gaussian(const SymMatrix& theta0, Index n, std::uint64_t seed);

enum class Design { EqualNull, LinearNull, ThreeSampleLinearNull };

const char* to_string(Design d);
Design design_from_string(const std::string& s);

struct DesignTruth {
  GroundTruth truth;
  std::vector<double> coefficients;  // the null combination sum_k a_k Theta_k = 0
  /// Entries (i <= j) counted in S; the complement among i <= j is S^c.
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> in_s;
};

DesignTruth make_design_truth(Design design, Index p, double alpha_tilde, std::uint64_t seed);

struct DebiasDecomposition {
  std::vector<SymMatrix> xi;            // -Theta0 (S - Sigma0) Theta0
  std::vector<Eigen::MatrixXd> upsilon;  // remainder, not symmetric in general
  std::vector<double> rem_supnorm;      // sqrt(n) ||sum_k a_k Upsilon_k||_inf per combination
  double identity_error = 0.0;          // max_k ||Theta_d - Theta0 - Xi - Upsilon||_inf
};

DebiasDecomposition decompose_debias_error(std::span<const SymMatrix> thetas,
                                           const DebiasedFit& db, const GroundTruth& truth,
                                           std::span<const SymMatrix> sigmas,
                                           std::span<const std::vector<double>> combinations);

/// Shared knobs of the Monte-Carlo experiments.
struct ExperimentSettings {
  std::vector<PenaltyParams> grid = default_penalty_grid();
  AdmmSettings admm;
  bool warm_start = true;
  bool center = true;
  int threads = 1;
};

struct FluctuationConfig {
  Index p = 50;
  Index n = 200;
  double alpha_tilde = 0.1;
  std::vector<Entry> entries;
  int replications = 200;
  std::uint64_t seed = 0;
  ExperimentSettings settings;
};

struct ZSample {
  int replication = 0;
  Index i = 0;
  Index j = 0;
  double z = 0.0;
};

struct FluctuationResult {
  std::vector<ZSample> samples;          // replication-major, entries in input order
  std::vector<PenaltyParams> selected;   // AIC choice per replication
};

FluctuationResult run_fluctuation(const FluctuationConfig& cfg);

struct CoverageConfig {
  Design design = Design::EqualNull;
  Index p = 50;
  Index n = 200;
  double alpha_tilde = 0.1;
  int replications = 200;
  std::uint64_t seed = 0;
  double level = 0.95;
  ExperimentSettings settings;
};

struct CoverageReport {
  Design design = Design::EqualNull;
  Index p = 0;
  Index n = 0;
  double alpha_tilde = 0.0;
  int replications = 0;
  std::size_t grid_size = 0;
  double avg_cov_s = 0.0;
  double avg_cov_sc = 0.0;
  Eigen::MatrixXi hits;  // upper triangle including the diagonal
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> in_s;

  double frequency(Index i, Index j) const {
    return static_cast<double>(hits(i, j)) / static_cast<double>(replications);
  }
};

CoverageReport run_coverage(const CoverageConfig& cfg);

/// Averages per-entry hit frequencies over S and S^c.
std::pair<double, double> average_coverage(const Eigen::MatrixXi& hits,
                                           const Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>& in_s,
                                           int replications);

/// sup_x |F_n(x) - Phi(x)|.
double ks_statistic_normal(std::vector<double> samples);

/// Critical value of the one-sample KS statistic at level alpha for sample size n,
/// from the Kolmogorov limit with the Stephens small-sample correction.
double ks_critical_value(std::size_t n, double alpha);

/// Bin counts over [low, high) with `bins` equal-width bins; out-of-range samples
/// go to the edge bins.
std::vector<long> histogram(std::span<const double> samples, int bins, double low, double high);

}  // namespace fgl
