#include "fgl/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <random>
#include <thread>
#include <tuple>

namespace fgl {

namespace {

// Runs body(0..count-1) on up to `threads` workers. Results must be written to
// per-index slots so that output does not depend on the schedule.
template <typename Body>
void parallel_for(int count, int threads, Body&& body) {
  const int workers = std::max(1, std::min(threads, count));
  if (workers == 1) {
    for (int r = 0; r < count; ++r) body(r);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int r = next++; r < count; r = next++) {
        try {
          body(r);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = count;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

double standard_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

std::vector<SymMatrix> group_covariances(const GroundTruth& truth, Index n,
                                         std::uint64_t master, int replication, bool center) {
  std::vector<SymMatrix> sigmas;
  for (std::size_t g = 0; g < truth.num_groups(); ++g) {
    const auto seed = derive_seed(master, 1 + g, static_cast<std::uint64_t>(replication));
    sigmas.push_back(sample_covariance(sample_gaussian(truth.theta0[g], n, seed), center));
  }
  return sigmas;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(mix(master) ^ stream) ^ index);
}

void PrecisionGenConfig::validate() const {
  if (p < 2) throw InvalidInput("precision generator needs p >= 2");
  if (!(alpha_tilde >= 0.0 && alpha_tilde <= 1.0)) {
    throw InvalidInput("alpha_tilde must lie in [0, 1]");
  }
}

GroundTruth make_ground_truth(std::vector<SymMatrix> theta0) {
  GroundTruth truth;
  for (auto& t : theta0) {
    const Index p = t.dim();
    std::vector<Entry> support;
    std::vector<long> degree(static_cast<std::size_t>(p), 0);
    for (Index j = 0; j < p; ++j) {
      for (Index i = 0; i < j; ++i) {
        if (t(i, j) != 0.0) {
          support.emplace_back(i, j);
          ++degree[static_cast<std::size_t>(i)];
          ++degree[static_cast<std::size_t>(j)];
        }
      }
    }
    for (long d : degree) truth.max_degree = std::max(truth.max_degree, d);
    truth.sparsity.push_back(2 * static_cast<long>(support.size()));
    truth.support.push_back(std::move(support));
    truth.sigma0.push_back(inverse_pd(t));
    truth.theta0.push_back(std::move(t));
  }
  return truth;
}

GroundTruth generate_precision(const PrecisionGenConfig& cfg) {
  return generate_precision(cfg, nullptr);
}

GroundTruth generate_precision(const PrecisionGenConfig& cfg, PrecisionDraws* draws) {
  cfg.validate();
  const Index p = cfg.p;
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  Eigen::MatrixXd u(p, p);
  for (Index i = 0; i < p; ++i) {
    for (Index j = 0; j < p; ++j) u(i, j) = unit(rng);
  }
  Eigen::MatrixXi g = Eigen::MatrixXi::Zero(p, p);
  for (Index j = 0; j < p; ++j) {
    for (Index i = 0; i < j; ++i) {
      g(i, j) = g(j, i) = unit(rng) < cfg.alpha_tilde ? 1 : 0;
    }
  }

  // Absent edges stay exactly zero; present ones are pushed away from zero
  // by subtracting one when their average falls below 0.5.
  Eigen::MatrixXd tilde = Eigen::MatrixXd::Zero(p, p);
  for (Index j = 0; j < p; ++j) {
    for (Index i = j + 1; i < p; ++i) {
      const double avg = (g(i, j) * u(i, j) + g(j, i) * u(j, i)) / 2.0;
      if (avg > 0.0) {
        tilde(i, j) = tilde(j, i) = avg < 0.5 ? avg - 1.0 : avg;
      }
    }
  }
  const double lmin = min_eigenvalue(SymMatrix(tilde));
  Eigen::MatrixXd theta = tilde;
  theta.diagonal().array() += std::abs(lmin) + 0.1;

  if (draws != nullptr) *draws = {g, u, tilde};
  std::vector<SymMatrix> one;
  one.emplace_back(std::move(theta));
  return make_ground_truth(std::move(one));
}

Eigen::MatrixXd sample_gaussian(const SymMatrix& theta0, Index n, std::uint64_t seed) {
  if (n < 1) throw InvalidInput("sample_gaussian: n must be positive");
  const SymMatrix sigma0 = inverse_pd(theta0);
  Eigen::LLT<Eigen::MatrixXd> llt(sigma0.dense());
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefinite("sample_gaussian: covariance factorization failed");
  }
  const Index p = theta0.dim();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd z(n, p);
  for (Index r = 0; r < n; ++r) {
    for (Index c = 0; c < p; ++c) z(r, c) = normal(rng);
  }
  // Rows x = L z with Sigma0 = L L^T.
  return z * llt.matrixL().transpose().toDenseMatrix();
}

const char* to_string(Design d) {
  switch (d) {
    case Design::EqualNull:
      return "equal";
    case Design::LinearNull:
      return "linear";
    case Design::ThreeSampleLinearNull:
      return "three-sample";
  }
  return "unknown";
}

Design design_from_string(const std::string& s) {
  if (s == "equal") return Design::EqualNull;
  if (s == "linear") return Design::LinearNull;
  if (s == "three-sample") return Design::ThreeSampleLinearNull;
  throw InvalidInput("unknown design '" + s + "' (expected equal, linear or three-sample)");
}

DesignTruth make_design_truth(Design design, Index p, double alpha_tilde, std::uint64_t seed) {
  std::vector<SymMatrix> thetas;
  std::vector<double> coefficients;
  Eigen::MatrixXd support_source;
  switch (design) {
    case Design::EqualNull: {
      auto t = generate_precision({p, alpha_tilde, seed});
      thetas = {t.theta0[0], t.theta0[0]};
      coefficients = {1.0, -1.0};
      support_source = t.theta0[0].dense();
      break;
    }
    case Design::LinearNull: {
      auto t = generate_precision({p, alpha_tilde, seed});
      thetas = {t.theta0[0], SymMatrix(0.5 * t.theta0[0].dense())};
      coefficients = {0.5, -1.0};
      support_source = t.theta0[0].dense();
      break;
    }
    case Design::ThreeSampleLinearNull: {
      auto t1 = generate_precision({p, 0.01, derive_seed(seed, 0, 0)});
      auto t2 = generate_precision({p, 0.1, derive_seed(seed, 0, 1)});
      const Eigen::MatrixXd& m1 = t1.theta0[0].dense();
      const Eigen::MatrixXd& m2 = t2.theta0[0].dense();
      thetas = {t1.theta0[0], t2.theta0[0], SymMatrix(0.6 * m1 + 0.9 * m2)};
      coefficients = {0.6, 0.9, -1.0};
      // Nonzero set of Theta1 + (a2/a3) Theta2.
      support_source = m1 - 0.9 * m2;
      break;
    }
  }
  DesignTruth out{make_ground_truth(std::move(thetas)), std::move(coefficients), {}};
  out.in_s = support_source.array() != 0.0;
  return out;
}

DebiasDecomposition decompose_debias_error(std::span<const SymMatrix> thetas,
                                           const DebiasedFit& db, const GroundTruth& truth,
                                           std::span<const SymMatrix> sigmas,
                                           std::span<const std::vector<double>> combinations) {
  const std::size_t k = thetas.size();
  if (k == 0 || db.thetas_d.size() != k || truth.num_groups() != k || sigmas.size() != k) {
    throw InvalidInput("decompose_debias_error: group count mismatch");
  }
  const Index p = thetas.front().dim();
  DebiasDecomposition out;
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(p, p);
  for (std::size_t g = 0; g < k; ++g) {
    if (thetas[g].dim() != p || sigmas[g].dim() != p || truth.theta0[g].dim() != p) {
      throw InvalidInput("decompose_debias_error: dimension mismatch");
    }
    const Eigen::MatrixXd& th = thetas[g].dense();
    const Eigen::MatrixXd& t0 = truth.theta0[g].dense();
    const Eigen::MatrixXd& s = sigmas[g].dense();
    const Eigen::MatrixXd diff = th - t0;
    const Eigen::MatrixXd noise = s - truth.sigma0[g].dense();
    out.xi.emplace_back(-t0 * noise * t0);
    out.upsilon.push_back(-diff * noise * t0 - (th * s - eye) * diff);
    const Eigen::MatrixXd gap =
        db.thetas_d[g].dense() - t0 - out.xi.back().dense() - out.upsilon.back();
    out.identity_error = std::max(out.identity_error, gap.cwiseAbs().maxCoeff());
  }
  const double root_n = std::sqrt(static_cast<double>(db.sample_sizes.front()));
  for (const auto& a : combinations) {
    if (a.size() != k) throw InvalidInput("decompose_debias_error: combination length");
    Eigen::MatrixXd rem = Eigen::MatrixXd::Zero(p, p);
    for (std::size_t g = 0; g < k; ++g) rem += a[g] * out.upsilon[g];
    out.rem_supnorm.push_back(root_n * rem.cwiseAbs().maxCoeff());
  }
  return out;
}

FluctuationResult run_fluctuation(const FluctuationConfig& cfg) {
  if (cfg.replications < 1) throw InvalidInput("run_fluctuation: replications must be >= 1");
  if (cfg.entries.empty()) throw InvalidInput("run_fluctuation: no entries requested");
  for (const auto& [i, j] : cfg.entries) {
    if (i < 0 || j < 0 || i >= cfg.p || j >= cfg.p) {
      throw InvalidInput("run_fluctuation: entry outside the matrix");
    }
  }
  const auto reps = static_cast<std::size_t>(cfg.replications);
  const std::size_t m = cfg.entries.size();
  FluctuationResult out;
  out.samples.resize(reps * m);
  out.selected.resize(reps);
  const std::vector<long> ns(2, static_cast<long>(cfg.n));

  parallel_for(cfg.replications, cfg.settings.threads, [&](int r) {
    const auto truth = make_design_truth(Design::EqualNull, cfg.p, cfg.alpha_tilde,
                                         derive_seed(cfg.seed, 0, static_cast<std::uint64_t>(r)));
    const auto sigmas = group_covariances(truth.truth, cfg.n, cfg.seed, r, cfg.settings.center);
    auto sel = select_tuning_aic(sigmas, ns, cfg.settings.grid, cfg.settings.admm,
                                 cfg.settings.warm_start);
    const auto db = debias(sel.best_fit, sigmas, ns);
    const auto base = static_cast<std::size_t>(r) * m;
    for (std::size_t e = 0; e < m; ++e) {
      const auto [i, j] = cfg.entries[e];
      const auto res = test_equal(db, sel.best_fit, i, j);
      out.samples[base + e] = {r, i, j, res.z};
    }
    out.selected[static_cast<std::size_t>(r)] = sel.best;
  });
  return out;
}

std::pair<double, double> average_coverage(const Eigen::MatrixXi& hits,
                                           const Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>& in_s,
                                           int replications) {
  double sum_s = 0.0;
  double sum_sc = 0.0;
  long count_s = 0;
  long count_sc = 0;
  const Index p = hits.rows();
  for (Index j = 0; j < p; ++j) {
    for (Index i = 0; i <= j; ++i) {
      const double f = static_cast<double>(hits(i, j)) / static_cast<double>(replications);
      if (in_s(i, j)) {
        sum_s += f;
        ++count_s;
      } else {
        sum_sc += f;
        ++count_sc;
      }
    }
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  return {count_s > 0 ? sum_s / static_cast<double>(count_s) : nan,
          count_sc > 0 ? sum_sc / static_cast<double>(count_sc) : nan};
}

CoverageReport run_coverage(const CoverageConfig& cfg) {
  if (cfg.replications < 1) throw InvalidInput("run_coverage: replications must be >= 1");
  if (!(cfg.level > 0.0 && cfg.level < 1.0)) throw InvalidInput("run_coverage: level in (0,1)");
  const auto truth = make_design_truth(cfg.design, cfg.p, cfg.alpha_tilde,
                                       derive_seed(cfg.seed, 0, 0));
  const std::size_t k = truth.truth.num_groups();
  const std::vector<long> ns(k, static_cast<long>(cfg.n));
  const Index p = cfg.p;
  const double alpha = 1.0 - cfg.level;

  Eigen::MatrixXd null_values = Eigen::MatrixXd::Zero(p, p);
  for (std::size_t g = 0; g < k; ++g) {
    null_values += truth.coefficients[g] * truth.truth.theta0[g].dense();
  }

  std::vector<Eigen::MatrixXi> per_rep(static_cast<std::size_t>(cfg.replications));
  parallel_for(cfg.replications, cfg.settings.threads, [&](int r) {
    const auto sigmas = group_covariances(truth.truth, cfg.n, cfg.seed, r, cfg.settings.center);
    auto sel = select_tuning_aic(sigmas, ns, cfg.settings.grid, cfg.settings.admm,
                                 cfg.settings.warm_start);
    const auto db = debias(sel.best_fit, sigmas, ns);
    Eigen::MatrixXi hit = Eigen::MatrixXi::Zero(p, p);
    for (Index j = 0; j < p; ++j) {
      for (Index i = 0; i <= j; ++i) {
        const auto res = test_linear(db, sel.best_fit, {truth.coefficients, i, j},
                                     null_values(i, j), alpha);
        hit(i, j) = res.reject ? 0 : 1;
      }
    }
    per_rep[static_cast<std::size_t>(r)] = std::move(hit);
  });

  CoverageReport report;
  report.design = cfg.design;
  report.p = p;
  report.n = cfg.n;
  report.alpha_tilde = cfg.alpha_tilde;
  report.replications = cfg.replications;
  report.grid_size = cfg.settings.grid.size();
  report.hits = Eigen::MatrixXi::Zero(p, p);
  for (const auto& h : per_rep) report.hits += h;
  report.in_s = truth.in_s;
  std::tie(report.avg_cov_s, report.avg_cov_sc) =
      average_coverage(report.hits, report.in_s, cfg.replications);
  return report;
}

double ks_statistic_normal(std::vector<double> samples) {
  if (samples.empty()) throw InvalidInput("ks_statistic_normal: no samples");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t r = 0; r < samples.size(); ++r) {
    const double f = standard_normal_cdf(samples[r]);
    d = std::max({d, static_cast<double>(r + 1) / n - f, f - static_cast<double>(r) / n});
  }
  return d;
}

double ks_critical_value(std::size_t n, double alpha) {
  if (n == 0 || !(alpha > 0.0 && alpha < 1.0)) throw InvalidInput("ks_critical_value");
  // P(K > x) = 2 sum_{m>=1} (-1)^(m-1) exp(-2 m^2 x^2), decreasing in x.
  auto tail = [](double x) {
    double s = 0.0;
    for (int m = 1; m <= 100; ++m) {
      s += (m % 2 == 1 ? 2.0 : -2.0) * std::exp(-2.0 * m * m * x * x);
    }
    return s;
  };
  double lo = 0.2;
  double hi = 5.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (tail(mid) > alpha ? lo : hi) = mid;
  }
  const double root = std::sqrt(static_cast<double>(n));
  return 0.5 * (lo + hi) / (root + 0.12 + 0.11 / root);
}

std::vector<long> histogram(std::span<const double> samples, int bins, double low, double high) {
  if (bins < 1 || !(high > low)) throw InvalidInput("histogram: invalid binning");
  std::vector<long> counts(static_cast<std::size_t>(bins), 0);
  const double width = (high - low) / bins;
  for (double x : samples) {
    auto b = static_cast<long>(std::floor((x - low) / width));
    b = std::clamp(b, 0L, static_cast<long>(bins) - 1);
    ++counts[static_cast<std::size_t>(b)];
  }
  return counts;
}

}  // namespace fgl
