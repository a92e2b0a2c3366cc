#pragma once

// ADMM solver for the K-group fused graphical lasso
//
//   min_{Theta_k > 0}  sum_k w_k [tr(S_k Theta_k) - log det Theta_k]
//                      + lambda sum_k ||Theta_k^-||_1
//                      + rho sum_{k<k'} ||(Theta_k - Theta_k')^-||_1
//
// with w_k = 1 unless group weighting is requested. The splitting is
// Theta = Z with scaled dual U; the Theta-step is a closed-form eigenvalue
// map, the Z-step the entrywise fused-lasso prox.

#include <optional>
#include <span>
#include <vector>

#include "fgl/fused_penalty.hpp"
#include "fgl/matrix_core.hpp"

namespace fgl {

struct AdmmSettings {
  double eta = 1.0;
  double tol_primal = 1e-5;
  double tol_dual = 1e-5;
  int max_iter = 500;
  bool relative = false;  // multiply tolerances by p
  /// Per-group loss weights (e.g. n_k). Empty means unweighted.
  std::vector<double> group_weights;

  void validate() const;
};

enum class FitScale { Covariance, Correlation };

const char* to_string(FitScale s);

struct FglFit {
  std::vector<SymMatrix> thetas;  // the sparse Z iterate
  PenaltyParams params;
  int iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  std::vector<double> objective_trace;
  bool converged = false;
  FitScale scale = FitScale::Covariance;
  std::vector<double> group_weights;
  /// False when Z was not positive definite and the smooth Theta iterate
  /// was returned instead.
  bool sparse_iterate = true;

  Index dim() const { return thetas.empty() ? 0 : thetas.front().dim(); }
  std::size_t num_groups() const { return thetas.size(); }
};

/// ADMM iterates, usable as a warm start for a nearby penalty.
struct AdmmState {
  std::vector<Eigen::MatrixXd> z;
  std::vector<Eigen::MatrixXd> u;
};

struct WeightedFit {
  FglFit fit_r;                   // on the correlation scale
  std::vector<SymMatrix> thetas_w;  // W^-1 Theta_R W^-1
  std::vector<SymMatrix> scales;    // W per group
};

struct KktReport {
  std::vector<double> stationarity;  // per group, sup norm of the best-case residual
  double dual_feasibility_excess = 0.0;
  int complementarity_violations = 0;

  double max_stationarity() const;
};

struct AicEntry {
  PenaltyParams params;
  double aic = 0.0;
  bool converged = false;
};

struct TuningSelection {
  PenaltyParams best;
  std::vector<AicEntry> table;  // input grid order
  FglFit best_fit;
};

FglFit fit_fgl(std::span<const SymMatrix> sigmas, const PenaltyParams& params,
               const AdmmSettings& settings = {}, AdmmState* state = nullptr);

/// Solves on the sample correlation matrices and maps back through W.
WeightedFit fit_fgl_weighted(std::span<const SymMatrix> sigmas, const PenaltyParams& params,
                             const AdmmSettings& settings = {});

KktReport kkt_check(const FglFit& fit, std::span<const SymMatrix> sigmas,
                    const PenaltyParams& params, double violation_tol = 1e-4);

/// sum_k w_k [tr(S_k Theta_k) - log det Theta_k] + penalty
double fgl_objective(std::span<const SymMatrix> thetas, std::span<const SymMatrix> sigmas,
                     const PenaltyParams& params, std::span<const double> group_weights = {});

/// sum_k [n_k tr(S_k Theta_k) - n_k log det Theta_k + 2 E_k], E_k the number
/// of nonzero strictly-upper entries of Theta_k.
double aic_score(std::span<const SymMatrix> thetas, std::span<const SymMatrix> sigmas,
                 std::span<const long> ns);

/// count evenly spaced values from start to stop inclusive.
std::vector<double> linear_grid(double start, double stop, int count);

/// Cartesian product, lambda-major.
std::vector<PenaltyParams> penalty_grid(std::span<const double> lambdas,
                                        std::span<const double> rhos);

/// 30 x 30 grid on [0.05, 0.3]^2.
std::vector<PenaltyParams> default_penalty_grid();

/// Fits every grid point and returns the AIC minimizer. Ties go to the larger
/// lambda, then the larger rho. Warm-starting walks the grid in input order.
TuningSelection select_tuning_aic(std::span<const SymMatrix> sigmas, std::span<const long> ns,
                                  std::span<const PenaltyParams> grid,
                                  const AdmmSettings& settings = {}, bool warm_start = true);

}  // namespace fgl
