#include "fgl/matrix_core.hpp"

#include <cmath>

namespace fgl {

SymMatrix::SymMatrix(Eigen::MatrixXd m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols()) {
    throw InvalidInput("SymMatrix: matrix is " + std::to_string(m_.rows()) + "x" +
                       std::to_string(m_.cols()) + ", expected square");
  }
  if (m_.rows() < 1) throw InvalidInput("SymMatrix: dimension must be at least 1");
  m_.triangularView<Eigen::StrictlyLower>() = m_.transpose();
}

SymMatrix SymMatrix::identity(Index p) {
  return SymMatrix(Eigen::MatrixXd::Identity(p, p));
}

SymMatrix SymMatrix::diagonal(const Eigen::VectorXd& d) {
  return SymMatrix(Eigen::MatrixXd(d.asDiagonal()));
}

SymMatrix SymMatrix::zero(Index p) { return SymMatrix(Eigen::MatrixXd::Zero(p, p)); }

std::vector<long> MultiGroupDataset::sample_sizes() const {
  std::vector<long> ns;
  ns.reserve(groups.size());
  for (const auto& g : groups) ns.push_back(static_cast<long>(g.rows()));
  return ns;
}

void MultiGroupDataset::validate() const {
  if (groups.empty()) throw InvalidInput("dataset has no groups");
  const Index p = groups.front().cols();
  if (p < 1) throw InvalidInput("dataset has no variables");
  for (std::size_t k = 0; k < groups.size(); ++k) {
    if (groups[k].cols() != p) {
      throw InvalidInput("group " + std::to_string(k + 1) + " has " +
                         std::to_string(groups[k].cols()) + " variables, expected " +
                         std::to_string(p));
    }
    if (groups[k].rows() < 2) {
      throw InsufficientData("group " + std::to_string(k + 1) +
                             " needs at least 2 observations");
    }
  }
}

SpectralDecomp sym_eigen(const SymMatrix& m) {
  if (!m.all_finite()) throw InvalidInput("sym_eigen: non-finite entries");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m.dense());
  if (solver.info() != Eigen::Success) throw InvalidInput("sym_eigen: solver failed");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

double log_det_pd(const SymMatrix& m) {
  Eigen::LLT<Eigen::MatrixXd> llt(m.dense());
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefinite("log_det_pd: Cholesky factorization failed");
  }
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

SymMatrix inverse_pd(const SymMatrix& m) {
  Eigen::LLT<Eigen::MatrixXd> llt(m.dense());
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefinite("inverse_pd: Cholesky factorization failed");
  }
  return SymMatrix(llt.solve(Eigen::MatrixXd::Identity(m.dim(), m.dim())));
}

SymMatrix sample_covariance(const Eigen::MatrixXd& x, bool center) {
  const Index n = x.rows();
  if (n < 2) throw InsufficientData("sample_covariance: need at least 2 observations");
  if (!x.allFinite()) throw InvalidInput("sample_covariance: non-finite observations");
  Eigen::MatrixXd centered = x;
  if (center) centered.rowwise() -= x.colwise().mean();
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(x.cols(), x.cols());
  s.selfadjointView<Eigen::Upper>().rankUpdate(centered.transpose(), 1.0 / static_cast<double>(n));
  return SymMatrix(std::move(s));
}

CorrelationSummary correlation_summary(const SymMatrix& sigma) {
  const Index p = sigma.dim();
  Eigen::VectorXd w(p);
  for (Index i = 0; i < p; ++i) {
    const double v = sigma(i, i);
    if (!(v > 0.0)) {
      throw DegenerateVariance("correlation_summary: variable " + std::to_string(i + 1) +
                               " has non-positive variance");
    }
    w(i) = std::sqrt(v);
  }
  Eigen::MatrixXd r(p, p);
  for (Index j = 0; j < p; ++j) {
    for (Index i = 0; i < j; ++i) r(i, j) = sigma(i, j) / (w(i) * w(j));
    r(j, j) = 1.0;
  }
  return {SymMatrix::diagonal(w), SymMatrix(std::move(r))};
}

CovarianceSummary summarize_group(const Eigen::MatrixXd& x, bool center) {
  SymMatrix sigma = sample_covariance(x, center);
  auto corr = correlation_summary(sigma);
  return {std::move(sigma), std::move(corr.scale), std::move(corr.correlation)};
}

MatrixNorms norms(const Eigen::MatrixXd& m) {
  if (!m.allFinite()) throw InvalidInput("norms: non-finite entries");
  const Eigen::ArrayXXd a = m.array().abs();
  return {m.norm(), a.maxCoeff(), a.sum(), a.colwise().sum().maxCoeff()};
}

double min_eigenvalue(const SymMatrix& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m.dense(), Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(0);
}

}  // namespace fgl
