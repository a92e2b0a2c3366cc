#pragma once

// Brute-force minimizer of the per-entry fused-lasso objective, independent
// of the library's closed forms: grid search followed by a pattern search
// over the directions {-1, 0, 1}^K.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace fgl::testing {

inline double prox_objective(const std::vector<double>& z, const std::vector<double>& a,
                             double eta, double lambda, double rho) {
  double f = 0.0;
  const std::size_t k = z.size();
  for (std::size_t i = 0; i < k; ++i) {
    f += 0.5 * eta * (z[i] - a[i]) * (z[i] - a[i]) + lambda * std::abs(z[i]);
    for (std::size_t j = i + 1; j < k; ++j) f += rho * std::abs(z[i] - z[j]);
  }
  return f;
}

inline std::vector<std::vector<double>> pattern_directions(std::size_t k) {
  std::vector<std::vector<double>> dirs;
  std::size_t total = 1;
  for (std::size_t i = 0; i < k; ++i) total *= 3;
  for (std::size_t code = 0; code < total; ++code) {
    std::vector<double> d(k);
    std::size_t c = code;
    bool nonzero = false;
    for (std::size_t i = 0; i < k; ++i) {
      d[i] = static_cast<double>(c % 3) - 1.0;
      nonzero = nonzero || d[i] != 0.0;
      c /= 3;
    }
    if (nonzero) dirs.push_back(d);
  }
  return dirs;
}

inline std::vector<double> pattern_refine(std::vector<double> z, const std::vector<double>& a,
                                          double eta, double lambda, double rho, double step,
                                          double min_step = 1e-11) {
  const auto dirs = pattern_directions(z.size());
  double best = prox_objective(z, a, eta, lambda, rho);
  std::vector<double> trial(z.size());
  while (step > min_step) {
    bool improved = false;
    for (const auto& d : dirs) {
      for (std::size_t i = 0; i < z.size(); ++i) trial[i] = z[i] + step * d[i];
      const double f = prox_objective(trial, a, eta, lambda, rho);
      if (f < best) {
        best = f;
        z = trial;
        improved = true;
        break;
      }
    }
    if (!improved) step /= 2.0;
  }
  return z;
}

// Grid over [lo, hi]^K at spacing `h` (K = 2 or 3), then refinement.
inline std::vector<double> prox_grid_oracle(const std::vector<double>& a, double eta,
                                            double lambda, double rho, double lo, double hi,
                                            double h) {
  const std::size_t k = a.size();
  const long m = static_cast<long>(std::floor((hi - lo) / h)) + 1;
  std::vector<double> z(k);
  std::vector<double> best_z(k);
  double best = std::numeric_limits<double>::infinity();
  std::vector<long> idx(k, 0);
  while (true) {
    for (std::size_t i = 0; i < k; ++i) z[i] = lo + h * static_cast<double>(idx[i]);
    const double f = prox_objective(z, a, eta, lambda, rho);
    if (f < best) {
      best = f;
      best_z = z;
    }
    std::size_t pos = 0;
    while (pos < k && ++idx[pos] == m) idx[pos++] = 0;
    if (pos == k) break;
  }
  return pattern_refine(best_z, a, eta, lambda, rho, h);
}

// The minimizer lies in the box spanned by the targets and 0.
inline std::vector<double> prox_oracle(const std::vector<double>& a, double eta, double lambda,
                                       double rho, double h) {
  double lo = 0.0;
  double hi = 0.0;
  for (double v : a) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return prox_grid_oracle(a, eta, lambda, rho, lo - h, hi + h, h);
}

}  // namespace fgl::testing
