#include "fgl/solver.hpp"

#include <algorithm>
#include <cmath>

namespace fgl {

namespace {

void validate_sigmas(std::span<const SymMatrix> sigmas) {
  if (sigmas.empty()) throw InvalidInput("at least one covariance matrix is required");
  const Index p = sigmas.front().dim();
  for (std::size_t k = 0; k < sigmas.size(); ++k) {
    const auto& s = sigmas[k];
    if (s.dim() != p) throw InvalidInput("covariance matrices differ in dimension");
    if (!s.all_finite()) throw InvalidInput("covariance matrix has non-finite entries");
    for (Index i = 0; i < p; ++i) {
      if (!(s(i, i) > 0.0)) {
        throw NotPositiveSemiDefinite("covariance matrix " + std::to_string(k + 1) +
                                      " has a non-positive diagonal entry");
      }
    }
    const double floor = -1e-10 * std::max(1.0, s.dense().trace());
    if (min_eigenvalue(s) < floor) {
      throw NotPositiveSemiDefinite("covariance matrix " + std::to_string(k + 1) +
                                    " is not positive semidefinite");
    }
  }
}

std::vector<double> resolve_weights(const AdmmSettings& settings, std::size_t k) {
  if (settings.group_weights.empty()) return std::vector<double>(k, 1.0);
  if (settings.group_weights.size() != k) {
    throw InvalidInput("group_weights must have one entry per group");
  }
  for (double w : settings.group_weights) {
    if (!(w > 0.0) || !std::isfinite(w)) throw InvalidInput("group weights must be positive");
  }
  return settings.group_weights;
}

double penalty_of(const std::vector<Eigen::MatrixXd>& thetas, const PenaltyParams& params) {
  const std::size_t k = thetas.size();
  const Index p = thetas.front().rows();
  double total = 0.0;
  for (Index j = 0; j < p; ++j) {
    for (Index i = 0; i < j; ++i) {
      for (std::size_t a = 0; a < k; ++a) {
        total += params.lambda * std::abs(thetas[a](i, j));
        for (std::size_t b = a + 1; b < k; ++b) {
          total += params.rho * std::abs(thetas[a](i, j) - thetas[b](i, j));
        }
      }
    }
  }
  return 2.0 * total;
}

}  // namespace

void AdmmSettings::validate() const {
  if (!(eta > 0.0)) throw InvalidInput("ADMM eta must be positive");
  if (!(tol_primal > 0.0) || !(tol_dual > 0.0)) {
    throw InvalidInput("ADMM tolerances must be positive");
  }
  if (max_iter < 1) throw InvalidInput("ADMM max_iter must be at least 1");
}

const char* to_string(FitScale s) {
  return s == FitScale::Covariance ? "covariance" : "correlation";
}

double KktReport::max_stationarity() const {
  double m = 0.0;
  for (double r : stationarity) m = std::max(m, r);
  return m;
}

FglFit fit_fgl(std::span<const SymMatrix> sigmas, const PenaltyParams& params,
               const AdmmSettings& settings, AdmmState* state) {
  params.validate();
  settings.validate();
  validate_sigmas(sigmas);

  const std::size_t k = sigmas.size();
  const Index p = sigmas.front().dim();
  const double eta = settings.eta;
  const std::vector<double> weights = resolve_weights(settings, k);
  const double scale = settings.relative ? static_cast<double>(p) : 1.0;

  std::vector<Eigen::MatrixXd> z(k, Eigen::MatrixXd::Zero(p, p));
  std::vector<Eigen::MatrixXd> u(k, Eigen::MatrixXd::Zero(p, p));
  if (state != nullptr && state->z.size() == k && state->u.size() == k &&
      state->z.front().rows() == p) {
    z = state->z;
    u = state->u;
  }
  std::vector<Eigen::MatrixXd> theta(k, Eigen::MatrixXd::Zero(p, p));
  std::vector<Eigen::MatrixXd> z_prev(k);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(p);
  Eigen::VectorXd mapped(p);
  std::vector<double> tuple(k);
  std::vector<double> scratch;

  FglFit fit;
  fit.params = params;
  fit.group_weights = settings.group_weights;

  for (int iter = 1; iter <= settings.max_iter; ++iter) {
    // Theta-step: eta*Theta - w*Theta^-1 = eta(Z - U) - w*S, solved spectrally.
    double loss = 0.0;
    for (std::size_t g = 0; g < k; ++g) {
      eig.compute(eta * (z[g] - u[g]) - weights[g] * sigmas[g].dense());
      const Eigen::VectorXd& d = eig.eigenvalues();
      double log_det = 0.0;
      for (Index j = 0; j < p; ++j) {
        mapped(j) = (d(j) + std::sqrt(d(j) * d(j) + 4.0 * eta * weights[g])) / (2.0 * eta);
        log_det += std::log(mapped(j));
      }
      const Eigen::MatrixXd& v = eig.eigenvectors();
      theta[g].noalias() = v * mapped.asDiagonal() * v.transpose();
      theta[g].triangularView<Eigen::StrictlyLower>() = theta[g].transpose();
      loss += weights[g] * (sigmas[g].dense().cwiseProduct(theta[g]).sum() - log_det);
    }
    fit.objective_trace.push_back(loss + penalty_of(theta, params));

    // Z-step on the canonical upper triangle, mirrored.
    for (std::size_t g = 0; g < k; ++g) {
      z_prev[g].swap(z[g]);
      z[g] = theta[g] + u[g];
    }
    for (Index j = 0; j < p; ++j) {
      for (Index i = 0; i < j; ++i) {
        for (std::size_t g = 0; g < k; ++g) tuple[g] = z[g](i, j);
        prox_fused_lasso_inplace(tuple, eta, params.lambda, params.rho, scratch);
        for (std::size_t g = 0; g < k; ++g) {
          z[g](i, j) = tuple[g];
          z[g](j, i) = tuple[g];
        }
      }
    }

    double primal = 0.0;
    double dual = 0.0;
    for (std::size_t g = 0; g < k; ++g) {
      u[g] += theta[g] - z[g];
      primal = std::max(primal, (theta[g] - z[g]).norm());
      dual = std::max(dual, eta * (z[g] - z_prev[g]).norm());
    }
    fit.iterations = iter;
    fit.primal_residual = primal;
    fit.dual_residual = dual;
    if (primal <= settings.tol_primal * scale && dual <= settings.tol_dual * scale) {
      fit.converged = true;
      break;
    }
  }

  fit.thetas.reserve(k);
  bool z_is_pd = true;
  for (std::size_t g = 0; g < k && z_is_pd; ++g) {
    Eigen::LLT<Eigen::MatrixXd> llt(z[g]);
    z_is_pd = llt.info() == Eigen::Success;
  }
  fit.sparse_iterate = z_is_pd;
  for (std::size_t g = 0; g < k; ++g) {
    fit.thetas.emplace_back(z_is_pd ? z[g] : theta[g]);
  }
  if (state != nullptr) {
    state->z = std::move(z);
    state->u = std::move(u);
  }
  return fit;
}

WeightedFit fit_fgl_weighted(std::span<const SymMatrix> sigmas, const PenaltyParams& params,
                             const AdmmSettings& settings) {
  if (sigmas.empty()) throw InvalidInput("at least one covariance matrix is required");
  std::vector<SymMatrix> correlations;
  std::vector<SymMatrix> scales;
  for (const auto& s : sigmas) {
    auto summary = correlation_summary(s);
    correlations.push_back(std::move(summary.correlation));
    scales.push_back(std::move(summary.scale));
  }
  WeightedFit out{fit_fgl(correlations, params, settings), {}, std::move(scales)};
  out.fit_r.scale = FitScale::Correlation;
  out.fit_r.params.weighted = true;
  for (std::size_t g = 0; g < sigmas.size(); ++g) {
    const Eigen::VectorXd w = out.scales[g].dense().diagonal();
    const Eigen::VectorXd inv_w = w.cwiseInverse();
    Eigen::MatrixXd tw = inv_w.asDiagonal() * out.fit_r.thetas[g].dense() * inv_w.asDiagonal();
    out.thetas_w.emplace_back(std::move(tw));
  }
  return out;
}

KktReport kkt_check(const FglFit& fit, std::span<const SymMatrix> sigmas,
                    const PenaltyParams& params, double violation_tol) {
  const std::size_t k = fit.thetas.size();
  if (k == 0 || sigmas.size() != k) throw InvalidInput("kkt_check: group count mismatch");
  const Index p = fit.dim();
  std::vector<double> weights(k, 1.0);
  if (!fit.group_weights.empty()) weights = fit.group_weights;

  std::vector<Eigen::MatrixXd> gradient;
  for (std::size_t g = 0; g < k; ++g) {
    if (sigmas[g].dim() != p) throw InvalidInput("kkt_check: dimension mismatch");
    const SymMatrix inv = inverse_pd(fit.thetas[g]);
    gradient.push_back(weights[g] * (sigmas[g].dense() - inv.dense()));
  }

  KktReport report;
  report.stationarity.assign(k, 0.0);
  const double bound = params.lambda + static_cast<double>(k - 1) * params.rho;
  std::vector<double> values(k);
  std::vector<double> grads(k);
  std::vector<double> per(k);
  for (Index j = 0; j < p; ++j) {
    for (std::size_t g = 0; g < k; ++g) {
      report.stationarity[g] = std::max(report.stationarity[g], std::abs(gradient[g](j, j)));
    }
    for (Index i = 0; i < j; ++i) {
      for (std::size_t g = 0; g < k; ++g) {
        values[g] = fit.thetas[g](i, j);
        grads[g] = gradient[g](i, j);
        report.dual_feasibility_excess =
            std::max(report.dual_feasibility_excess, std::abs(grads[g]) - bound);
      }
      const double worst =
          fused_subgradient_residual(values, grads, params.lambda, params.rho, 0.0, per);
      for (std::size_t g = 0; g < k; ++g) {
        report.stationarity[g] = std::max(report.stationarity[g], per[g]);
      }
      if (worst > violation_tol) ++report.complementarity_violations;
    }
  }
  return report;
}

double fgl_objective(std::span<const SymMatrix> thetas, std::span<const SymMatrix> sigmas,
                     const PenaltyParams& params, std::span<const double> group_weights) {
  if (thetas.size() != sigmas.size() || thetas.empty()) {
    throw InvalidInput("fgl_objective: group count mismatch");
  }
  double total = 0.0;
  for (std::size_t g = 0; g < thetas.size(); ++g) {
    const double w = group_weights.empty() ? 1.0 : group_weights[g];
    total += w * (sigmas[g].dense().cwiseProduct(thetas[g].dense()).sum() -
                  log_det_pd(thetas[g]));
  }
  return total + fused_penalty_value(thetas, params);
}

double aic_score(std::span<const SymMatrix> thetas, std::span<const SymMatrix> sigmas,
                 std::span<const long> ns) {
  if (thetas.size() != sigmas.size() || thetas.size() != ns.size()) {
    throw InvalidInput("aic_score: group count mismatch");
  }
  double aic = 0.0;
  for (std::size_t g = 0; g < thetas.size(); ++g) {
    const double n = static_cast<double>(ns[g]);
    const Index p = thetas[g].dim();
    long edges = 0;
    for (Index j = 0; j < p; ++j) {
      for (Index i = 0; i < j; ++i) edges += thetas[g](i, j) != 0.0;
    }
    aic += n * sigmas[g].dense().cwiseProduct(thetas[g].dense()).sum() -
           n * log_det_pd(thetas[g]) + 2.0 * static_cast<double>(edges);
  }
  return aic;
}

std::vector<double> linear_grid(double start, double stop, int count) {
  if (count < 1) throw InvalidInput("grid count must be at least 1");
  if (count == 1) return {start};
  std::vector<double> out(static_cast<std::size_t>(count));
  const double step = (stop - start) / static_cast<double>(count - 1);
  for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = start + step * i;
  out.back() = stop;
  return out;
}

std::vector<PenaltyParams> penalty_grid(std::span<const double> lambdas,
                                        std::span<const double> rhos) {
  std::vector<PenaltyParams> grid;
  grid.reserve(lambdas.size() * rhos.size());
  for (double l : lambdas) {
    for (double r : rhos) grid.push_back({l, r, false});
  }
  return grid;
}

std::vector<PenaltyParams> default_penalty_grid() {
  const auto axis = linear_grid(0.05, 0.3, 30);
  return penalty_grid(axis, axis);
}

TuningSelection select_tuning_aic(std::span<const SymMatrix> sigmas, std::span<const long> ns,
                                  std::span<const PenaltyParams> grid,
                                  const AdmmSettings& settings, bool warm_start) {
  if (grid.empty()) throw InvalidInput("select_tuning_aic: empty grid");
  if (ns.size() != sigmas.size()) throw InvalidInput("select_tuning_aic: one n per group");
  for (long n : ns) {
    if (n <= 0) throw InvalidInput("select_tuning_aic: sample sizes must be positive");
  }

  TuningSelection out;
  out.table.reserve(grid.size());
  AdmmState state;
  std::optional<std::size_t> best;
  for (std::size_t idx = 0; idx < grid.size(); ++idx) {
    FglFit fit = fit_fgl(sigmas, grid[idx], settings, warm_start ? &state : nullptr);
    const double aic = aic_score(fit.thetas, sigmas, ns);
    out.table.push_back({grid[idx], aic, fit.converged});
    bool better = !best.has_value();
    if (!better) {
      const AicEntry& cur = out.table[*best];
      if (aic < cur.aic) {
        better = true;
      } else if (aic == cur.aic) {
        better = grid[idx].lambda > cur.params.lambda ||
                 (grid[idx].lambda == cur.params.lambda && grid[idx].rho > cur.params.rho);
      }
    }
    if (better) {
      best = idx;
      out.best_fit = std::move(fit);
    }
  }
  out.best = grid[*best];
  return out;
}

}  // namespace fgl
