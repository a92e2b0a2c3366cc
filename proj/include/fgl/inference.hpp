#pragma once

// De-biased FGL estimators and CLT-based tests for linear combinations
// sum_k a_k Theta_k(i, j) of precision-matrix entries.

#include <span>
#include <vector>

#include "fgl/matrix_core.hpp"
#include "fgl/solver.hpp"

namespace fgl {

struct DebiasedFit {
  std::vector<SymMatrix> thetas_d;  // 2 Theta - Theta S Theta, symmetrized
  std::vector<long> sample_sizes;
};

/// a = (a_1, ..., a_K) applied to entry (i, j), 0-based.
struct LinearHypothesis {
  std::vector<double> coefficients;
  Index i = 0;
  Index j = 0;
};

struct TestResult {
  double statistic = 0.0;  // T_ij
  double sigma_hat = 0.0;  // estimated asymptotic sd of sqrt(n) T_ij
  double z = 0.0;
  double p_value = 1.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  bool reject = false;
  double alpha = 0.05;
};

DebiasedFit debias(std::span<const SymMatrix> thetas, std::span<const SymMatrix> sigmas,
                   std::span<const long> sample_sizes);
DebiasedFit debias(const FglFit& fit, std::span<const SymMatrix> sigmas,
                   std::span<const long> sample_sizes);

/// Two-sided test of H0: sum_k a_k Theta_k(i,j) = null_value. `thetas` are the
/// penalized estimates that feed the variance combiner
///   sigma^2 = sum_k a_k^2 (Theta_k(i,i) Theta_k(j,j) + Theta_k(i,j)^2).
TestResult test_linear(const DebiasedFit& db, std::span<const SymMatrix> thetas,
                       const LinearHypothesis& hyp, double null_value = 0.0,
                       double alpha = 0.05);
TestResult test_linear(const DebiasedFit& db, const FglFit& fit, const LinearHypothesis& hyp,
                       double null_value = 0.0, double alpha = 0.05);

/// H0: Theta_1(i,j) = Theta_2(i,j). Requires K = 2.
TestResult test_equal(const DebiasedFit& db, const FglFit& fit, Index i, Index j,
                      double alpha = 0.05);

/// Upper alpha/2 quantile of the standard normal.
double normal_critical_value(double alpha);

/// Two-sided p-value 2 (1 - Phi(|z|)).
double two_sided_p_value(double z);

}  // namespace fgl
