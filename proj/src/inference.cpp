#include "fgl/inference.hpp"

#include <boost/math/distributions/normal.hpp>

#include <cmath>

namespace fgl {

DebiasedFit debias(std::span<const SymMatrix> thetas, std::span<const SymMatrix> sigmas,
                   std::span<const long> sample_sizes) {
  if (thetas.empty() || thetas.size() != sigmas.size() ||
      thetas.size() != sample_sizes.size()) {
    throw InvalidInput("debias: need one theta, sigma and sample size per group");
  }
  DebiasedFit out;
  out.sample_sizes.assign(sample_sizes.begin(), sample_sizes.end());
  for (std::size_t g = 0; g < thetas.size(); ++g) {
    if (thetas[g].dim() != sigmas[g].dim() || thetas[g].dim() != thetas.front().dim()) {
      throw InvalidInput("debias: dimension mismatch");
    }
    const Eigen::MatrixXd& t = thetas[g].dense();
    Eigen::MatrixXd d = 2.0 * t - t * sigmas[g].dense() * t;
    Eigen::MatrixXd sym = 0.5 * (d + d.transpose());
    out.thetas_d.emplace_back(std::move(sym));
  }
  return out;
}

DebiasedFit debias(const FglFit& fit, std::span<const SymMatrix> sigmas,
                   std::span<const long> sample_sizes) {
  return debias(fit.thetas, sigmas, sample_sizes);
}

double normal_critical_value(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidInput("alpha must lie in (0, 1)");
  static const boost::math::normal_distribution<double> standard;
  return boost::math::quantile(boost::math::complement(standard, alpha / 2.0));
}

double two_sided_p_value(double z) { return std::erfc(std::abs(z) / std::sqrt(2.0)); }

TestResult test_linear(const DebiasedFit& db, std::span<const SymMatrix> thetas,
                       const LinearHypothesis& hyp, double null_value, double alpha) {
  const std::size_t k = db.thetas_d.size();
  if (k == 0 || thetas.size() != k || hyp.coefficients.size() != k) {
    throw InvalidInput("test_linear: coefficient vector must have one entry per group");
  }
  bool any_nonzero = false;
  for (double a : hyp.coefficients) any_nonzero = any_nonzero || a != 0.0;
  if (!any_nonzero) throw InvalidInput("test_linear: all coefficients are zero");
  const Index p = db.thetas_d.front().dim();
  if (hyp.i < 0 || hyp.j < 0 || hyp.i >= p || hyp.j >= p) {
    throw InvalidInput("test_linear: entry index out of range");
  }
  for (long n : db.sample_sizes) {
    if (n != db.sample_sizes.front()) {
      throw UnsupportedDesign("test_linear: groups must share a common sample size");
    }
  }
  const double xi = normal_critical_value(alpha);
  const double n = static_cast<double>(db.sample_sizes.front());

  double statistic = 0.0;
  double variance = 0.0;
  for (std::size_t g = 0; g < k; ++g) {
    const double a = hyp.coefficients[g];
    const SymMatrix& t = thetas[g];
    statistic += a * db.thetas_d[g](hyp.i, hyp.j);
    variance += a * a * (t(hyp.i, hyp.i) * t(hyp.j, hyp.j) + t(hyp.i, hyp.j) * t(hyp.i, hyp.j));
  }
  if (!(variance > 0.0)) throw DegenerateVariance("test_linear: estimated variance is zero");

  TestResult r;
  r.alpha = alpha;
  r.statistic = statistic;
  r.sigma_hat = std::sqrt(variance);
  r.z = std::sqrt(n) * (statistic - null_value) / r.sigma_hat;
  r.p_value = two_sided_p_value(r.z);
  const double half_width = xi * r.sigma_hat / std::sqrt(n);
  r.ci_low = statistic - half_width;
  r.ci_high = statistic + half_width;
  r.reject = std::abs(r.z) > xi;
  return r;
}

TestResult test_linear(const DebiasedFit& db, const FglFit& fit, const LinearHypothesis& hyp,
                       double null_value, double alpha) {
  return test_linear(db, fit.thetas, hyp, null_value, alpha);
}

TestResult test_equal(const DebiasedFit& db, const FglFit& fit, Index i, Index j,
                      double alpha) {
  if (db.thetas_d.size() != 2 || fit.thetas.size() != 2) {
    throw InvalidInput("test_equal: requires exactly two groups");
  }
  return test_linear(db, fit, LinearHypothesis{{1.0, -1.0}, i, j}, 0.0, alpha);
}

}  // namespace fgl
