#pragma once

// Dense symmetric-matrix kernels and sample moments shared by the solver,
// the inference routines and the simulation harness.

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "fgl/errors.hpp"

namespace fgl {

using Index = Eigen::Index;

/// A dense p x p symmetric matrix. The upper triangle is canonical: on
/// construction it is mirrored into the lower triangle, so entries are
/// bit-identical across the diagonal.
class SymMatrix {
 public:
  explicit SymMatrix(Eigen::MatrixXd m);

  static SymMatrix identity(Index p);
  static SymMatrix diagonal(const Eigen::VectorXd& d);
  static SymMatrix zero(Index p);

  Index dim() const noexcept { return m_.rows(); }
  double operator()(Index i, Index j) const { return m_(i, j); }
  const Eigen::MatrixXd& dense() const noexcept { return m_; }

  bool all_finite() const { return m_.allFinite(); }

 private:
  Eigen::MatrixXd m_;
};

struct SpectralDecomp {
  Eigen::VectorXd eigenvalues;   // ascending
  Eigen::MatrixXd eigenvectors;  // orthonormal columns
};

/// K groups of n_k x p observation matrices, rows are observations.
struct MultiGroupDataset {
  std::vector<Eigen::MatrixXd> groups;
  std::vector<std::string> labels;
  std::vector<std::string> variable_names;

  Index dim() const { return groups.empty() ? 0 : groups.front().cols(); }
  std::size_t num_groups() const { return groups.size(); }
  std::vector<long> sample_sizes() const;

  /// Throws InvalidInput on mismatched p, InsufficientData when some n_k < 2.
  void validate() const;
};

struct CorrelationSummary {
  SymMatrix scale;        // W = diag(sigma)^(1/2)
  SymMatrix correlation;  // R = W^-1 sigma W^-1, unit diagonal
};

struct CovarianceSummary {
  SymMatrix sigma;
  SymMatrix scale;
  SymMatrix correlation;
};

struct MatrixNorms {
  double frobenius;
  double sup;           // max |m_ij|
  double l1_entrywise;  // sum |m_ij|
  double l1_operator;   // max column absolute sum
};

SpectralDecomp sym_eigen(const SymMatrix& m);

/// log det via Cholesky; throws NotPositiveDefinite when the factorization fails.
double log_det_pd(const SymMatrix& m);

/// Inverse of a positive definite matrix via Cholesky.
SymMatrix inverse_pd(const SymMatrix& m);

/// (1/n) sum_i (x_i - m)(x_i - m)^T with m the column mean when `center` is set.
SymMatrix sample_covariance(const Eigen::MatrixXd& x, bool center = true);

CorrelationSummary correlation_summary(const SymMatrix& sigma);

CovarianceSummary summarize_group(const Eigen::MatrixXd& x, bool center = true);

MatrixNorms norms(const Eigen::MatrixXd& m);
inline MatrixNorms norms(const SymMatrix& m) { return norms(m.dense()); }

/// Smallest eigenvalue, used for PD / PSD diagnostics.
double min_eigenvalue(const SymMatrix& m);

}  // namespace fgl
