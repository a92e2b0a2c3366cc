#pragma once

#include <span>
#include <vector>

#include "fgl/matrix_core.hpp"

namespace fgl {

/// lambda weighs the l1 sparsity term, rho the pairwise fusion term.
/// `weighted` selects the correlation-scale estimator (see fit_fgl_weighted).
struct PenaltyParams {
  double lambda = 0.0;
  double rho = 0.0;
  bool weighted = false;

  void validate() const;
  friend bool operator==(const PenaltyParams&, const PenaltyParams&) = default;
};

/// One entry-tuple of the Z-subproblem:
///   min_z  sum_k (eta/2)(z_k - a_k)^2 + lambda sum_k |z_k| + rho sum_{k<k'} |z_k - z_k'|
/// Diagonal entries carry no penalty.
struct ProxProblem {
  std::vector<double> targets;
  double eta = 1.0;
  double lambda = 0.0;
  double rho = 0.0;
  bool is_diagonal = false;
};

std::vector<double> prox_fused_lasso(const ProxProblem& problem);

/// In-place variant used by the solver's inner loop. `scratch` may be reused
/// across calls to avoid allocation; its contents are unspecified on return.
void prox_fused_lasso_inplace(std::span<double> values, double eta, double lambda,
                              double rho, std::vector<double>& scratch);

/// Applies prox_fused_lasso to every (i, j) entry-tuple across the K matrices.
std::vector<SymMatrix> prox_matrix(std::span<const SymMatrix> a, double eta,
                                   const PenaltyParams& params);

/// Smallest sup-norm residual r such that
///   gradient_k + lambda g_k + rho sum_{k'} h_kk' = r_k
/// for some subgradients g_k of |z_k| and h_kk' = -h_k'k of |z_k - z_k'|,
/// evaluated at `values`. Entries closer than `tie_tol` are treated as fused
/// (and as zero when within `tie_tol` of 0).
double fused_subgradient_residual(std::span<const double> values,
                                  std::span<const double> gradient, double lambda,
                                  double rho, double tie_tol = 0.0);

/// As above, additionally writing each coordinate's residual (the residual of
/// the fused group it belongs to) into `per_coordinate`.
double fused_subgradient_residual(std::span<const double> values,
                                  std::span<const double> gradient, double lambda,
                                  double rho, double tie_tol,
                                  std::span<double> per_coordinate);

/// Penalty value lambda sum_k ||A_k^-||_1 + rho sum_{k<k'} ||(A_k - A_k')^-||_1.
double fused_penalty_value(std::span<const SymMatrix> thetas, const PenaltyParams& params);

}  // namespace fgl
