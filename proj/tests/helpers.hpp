#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>

#include "fgl/matrix_core.hpp"

namespace fgl::testing {

inline Eigen::MatrixXd random_matrix(Eigen::Index r, Eigen::Index c, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index j = 0; j < c; ++j) {
    for (Eigen::Index i = 0; i < r; ++i) m(i, j) = nd(rng);
  }
  return m;
}

inline SymMatrix random_symmetric(Eigen::Index p, std::uint64_t seed) {
  Eigen::MatrixXd a = random_matrix(p, p, seed);
  return SymMatrix((a + a.transpose()) / 2.0);
}

inline SymMatrix random_pd(Eigen::Index p, std::uint64_t seed) {
  Eigen::MatrixXd a = random_matrix(p, p, seed);
  return SymMatrix(a * a.transpose() / static_cast<double>(p) +
                   Eigen::MatrixXd::Identity(p, p));
}

inline double sup_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

// Plain triple loop, kept free of Eigen expression templates.
inline Eigen::MatrixXd loop_product(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(a.rows(), b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < b.cols(); ++j) {
      double s = 0.0;
      for (Eigen::Index k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
      c(i, j) = s;
    }
  }
  return c;
}

}  // namespace fgl::testing
