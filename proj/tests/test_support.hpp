#ifndef MISSVAR_TEST_SUPPORT_HPP
#define MISSVAR_TEST_SUPPORT_HPP

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "missvar/rng.hpp"
#include "missvar/var_core.hpp"

namespace missvar::test {

// Independent oracle: Gamma(0) = sum_{t >= 0} B^t Sigma (B')^t truncated when
// the term norm drops below tol. Kept separate from the doubling solver.
inline Matrix stationary_covariance_series(const Matrix& B, const Matrix& sigma,
                                           double tol = 1e-14,
                                           int max_terms = 100000) {
  Matrix gamma = sigma;
  Matrix term = sigma;
  for (int t = 0; t < max_terms; ++t) {
    term = B * term * B.transpose();
    gamma += term;
    if (term.cwiseAbs().maxCoeff() < tol) break;
  }
  return gamma;
}

// Independent oracle for the spectral radius of the emitted matrices.
inline double spectral_radius_oracle(const Matrix& B) {
  Eigen::EigenSolver<Matrix> es(B, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

// Standard error of the mean estimated from batch means.
inline double batch_standard_error(const std::vector<double>& samples,
                                   int batches) {
  const int per = static_cast<int>(samples.size()) / batches;
  std::vector<double> means(batches, 0.0);
  for (int b = 0; b < batches; ++b) {
    for (int i = 0; i < per; ++i) means[b] += samples[b * per + i];
    means[b] /= per;
  }
  double mu = 0.0;
  for (double m : means) mu += m;
  mu /= batches;
  double var = 0.0;
  for (double m : means) var += (m - mu) * (m - mu);
  var /= (batches - 1);
  return std::sqrt(var / batches);
}

// Dense random matrix with standard normal entries.
inline Matrix random_gaussian(int rows, int cols, Rng& rng) {
  Matrix m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = rng.normal();
  return m;
}

inline double op_norm(const Eigen::MatrixXd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
}

inline double op_norm(const Eigen::MatrixXcd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  return svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
}

}  // namespace missvar::test

#endif
