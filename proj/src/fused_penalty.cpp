#include "fgl/fused_penalty.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fgl {

namespace {

double soft_threshold(double x, double t) {
  if (x > t) return x - t;
  if (x < -t) return x + t;
  return 0.0;
}

double sign(double x) { return (x > 0.0) - (x < 0.0); }

void prox_pair(std::span<double> v, double eta, double lambda, double rho) {
  const double a1 = v[0];
  const double a2 = v[1];
  double z1;
  double z2;
  if (eta * std::abs(a1 - a2) <= 2.0 * rho) {
    z1 = z2 = 0.5 * (a1 + a2);
  } else {
    const double shift = rho / eta;
    z1 = a1 > a2 ? a1 - shift : a1 + shift;
    z2 = a1 > a2 ? a2 + shift : a2 - shift;
  }
  const double t = lambda / eta;
  v[0] = soft_threshold(z1, t);
  v[1] = soft_threshold(z2, t);
}

// General K. With the order of the targets fixed, the all-pairs fusion term
// is linear on the ordered cone, so the fusion prox is an antitone isotonic
// regression of shifted targets (pool-adjacent-violators). Soft-thresholding
// preserves order and commutes with the pooling, giving the exact joint prox.
void prox_general(std::span<double> v, double eta, double lambda, double rho,
                  std::vector<double>& scratch) {
  const std::size_t k = v.size();
  scratch.resize(4 * k);
  double* order_buf = scratch.data();
  double* shifted = scratch.data() + k;
  double* block_sum = scratch.data() + 2 * k;
  double* block_len = scratch.data() + 3 * k;

  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return v[a] > v[b]; });

  const double shift = rho / eta;
  for (std::size_t r = 0; r < k; ++r) {
    const double coef = static_cast<double>(k) - 1.0 - 2.0 * static_cast<double>(r);
    shifted[r] = v[order[r]] - shift * coef;
  }

  // Pool adjacent violators for a non-increasing fit.
  std::size_t blocks = 0;
  for (std::size_t r = 0; r < k; ++r) {
    block_sum[blocks] = shifted[r];
    block_len[blocks] = 1.0;
    ++blocks;
    while (blocks > 1 && block_sum[blocks - 2] / block_len[blocks - 2] <=
                             block_sum[blocks - 1] / block_len[blocks - 1]) {
      block_sum[blocks - 2] += block_sum[blocks - 1];
      block_len[blocks - 2] += block_len[blocks - 1];
      --blocks;
    }
  }

  const double t = lambda / eta;
  std::size_t r = 0;
  for (std::size_t b = 0; b < blocks; ++b) {
    const double value = soft_threshold(block_sum[b] / block_len[b], t);
    const auto len = static_cast<std::size_t>(block_len[b]);
    for (std::size_t i = 0; i < len; ++i, ++r) order_buf[r] = value;
  }
  for (std::size_t i = 0; i < k; ++i) v[order[i]] = order_buf[i];
}

}  // namespace

void PenaltyParams::validate() const {
  if (!(lambda >= 0.0) || !(rho >= 0.0) || !std::isfinite(lambda) || !std::isfinite(rho)) {
    throw InvalidInput("penalty parameters must be finite and non-negative");
  }
}

void prox_fused_lasso_inplace(std::span<double> values, double eta, double lambda,
                              double rho, std::vector<double>& scratch) {
  if (values.empty()) return;
  if (lambda == 0.0 && rho == 0.0) return;
  if (values.size() == 1 || rho == 0.0) {
    const double t = lambda / eta;
    for (double& x : values) x = soft_threshold(x, t);
    return;
  }
  if (values.size() == 2) {
    prox_pair(values, eta, lambda, rho);
    return;
  }
  prox_general(values, eta, lambda, rho, scratch);
}

std::vector<double> prox_fused_lasso(const ProxProblem& problem) {
  if (problem.targets.empty()) throw InvalidInput("prox_fused_lasso: K must be at least 1");
  if (!(problem.eta > 0.0)) throw InvalidInput("prox_fused_lasso: eta must be positive");
  PenaltyParams{problem.lambda, problem.rho}.validate();
  for (double a : problem.targets) {
    if (!std::isfinite(a)) throw InvalidInput("prox_fused_lasso: non-finite target");
  }
  std::vector<double> z = problem.targets;
  if (problem.is_diagonal) return z;
  std::vector<double> scratch;
  prox_fused_lasso_inplace(z, problem.eta, problem.lambda, problem.rho, scratch);
  return z;
}

std::vector<SymMatrix> prox_matrix(std::span<const SymMatrix> a, double eta,
                                   const PenaltyParams& params) {
  if (a.empty()) throw InvalidInput("prox_matrix: no matrices");
  if (!(eta > 0.0)) throw InvalidInput("prox_matrix: eta must be positive");
  params.validate();
  const Index p = a.front().dim();
  for (const auto& m : a) {
    if (m.dim() != p) throw InvalidInput("prox_matrix: dimension mismatch across groups");
  }
  const std::size_t k = a.size();
  std::vector<Eigen::MatrixXd> out;
  out.reserve(k);
  for (const auto& m : a) out.push_back(m.dense());

  std::vector<double> tuple(k);
  std::vector<double> scratch;
  for (Index j = 0; j < p; ++j) {
    for (Index i = 0; i < j; ++i) {
      for (std::size_t g = 0; g < k; ++g) tuple[g] = out[g](i, j);
      prox_fused_lasso_inplace(tuple, eta, params.lambda, params.rho, scratch);
      for (std::size_t g = 0; g < k; ++g) out[g](i, j) = tuple[g];
    }
  }
  std::vector<SymMatrix> result;
  result.reserve(k);
  for (auto& m : out) result.emplace_back(std::move(m));
  return result;
}

double fused_subgradient_residual(std::span<const double> values,
                                  std::span<const double> gradient, double lambda,
                                  double rho, double tie_tol) {
  return fused_subgradient_residual(values, gradient, lambda, rho, tie_tol, {});
}

double fused_subgradient_residual(std::span<const double> values,
                                  std::span<const double> gradient, double lambda,
                                  double rho, double tie_tol,
                                  std::span<double> per_coordinate) {
  const std::size_t k = values.size();
  if (gradient.size() != k || (!per_coordinate.empty() && per_coordinate.size() != k)) {
    throw InvalidInput("fused_subgradient_residual: size mismatch");
  }
  if (k == 0) return 0.0;

  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

  // Fused groups: chains of sorted values closer than tie_tol.
  std::vector<std::size_t> group_of(k);
  std::vector<std::vector<std::size_t>> groups;
  for (std::size_t r = 0; r < k; ++r) {
    if (r == 0 || values[order[r]] - values[order[r - 1]] > tie_tol) groups.emplace_back();
    groups.back().push_back(order[r]);
    group_of[order[r]] = groups.size() - 1;
  }

  double worst = 0.0;
  std::vector<double> reduced;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const auto& members = groups[g];
    double mean = 0.0;
    for (auto idx : members) mean += values[idx];
    mean /= static_cast<double>(members.size());
    const bool at_zero = std::abs(mean) <= tie_tol;

    reduced.clear();
    for (auto idx : members) {
      double y = gradient[idx];
      if (!at_zero) y += lambda * sign(mean);
      for (std::size_t other = 0; other < k; ++other) {
        if (group_of[other] == g) continue;
        y += rho * sign(values[idx] - values[other]);
      }
      reduced.push_back(y);
    }
    std::sort(reduced.begin(), reduced.end());

    // Flow feasibility on the complete graph with capacity rho per pair:
    // every subset A needs |sum_A y| <= rho |A| (|G| - |A|) + tau |A|.
    const std::size_t size = reduced.size();
    double tau = 0.0;
    double low = 0.0;
    double high = 0.0;
    for (std::size_t m = 1; m <= size; ++m) {
      low += reduced[m - 1];
      high += reduced[size - m];
      const double extreme = std::max(high, -low);
      const double cap = rho * static_cast<double>(m) * static_cast<double>(size - m);
      tau = std::max(tau, (extreme - cap) / static_cast<double>(m));
    }
    const double slack = at_zero ? lambda : 0.0;
    const double residual = std::max(tau - slack, 0.0);
    if (!per_coordinate.empty()) {
      for (auto idx : members) per_coordinate[idx] = residual;
    }
    worst = std::max(worst, residual);
  }
  return std::max(worst, 0.0);
}

double fused_penalty_value(std::span<const SymMatrix> thetas, const PenaltyParams& params) {
  double total = 0.0;
  const std::size_t k = thetas.size();
  if (k == 0) return 0.0;
  const Index p = thetas.front().dim();
  for (Index j = 0; j < p; ++j) {
    for (Index i = 0; i < j; ++i) {
      for (std::size_t a = 0; a < k; ++a) {
        total += 2.0 * params.lambda * std::abs(thetas[a](i, j));
        for (std::size_t b = a + 1; b < k; ++b) {
          total += 2.0 * params.rho * std::abs(thetas[a](i, j) - thetas[b](i, j));
        }
      }
    }
  }
  return total;
}

}  // namespace fgl
