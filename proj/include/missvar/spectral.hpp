#ifndef MISSVAR_SPECTRAL_HPP
#define MISSVAR_SPECTRAL_HPP

#include <string>
#include <vector>

#include "missvar/var_core.hpp"

namespace missvar {

struct GridConfig {
  int grid_points = 512;        // uniform angles on the unit circle, >= 64
  double refine_tol = 1e-8;     // golden-section stop width (radians)
};

// Transfer-function extrema over |z| = 1:
//   vartheta0 = max ||I - Bz||_2
//   vartheta1 = max ||(I - Bz)^{-1}||_2
//   vartheta2 = max ||(I - Bz)^{-1}||_{1->2}   (max column l2 norm)
// computed on the principal submatrix spanned by the nonzero rows/columns,
// which leaves all three values unchanged under zero-embedding.
struct SpectralDiagnostics {
  double rho = 0.0;
  double vartheta0 = 1.0;
  double vartheta1 = 1.0;
  double vartheta2 = 1.0;
  double theta0 = 1.0;          // vartheta2^2 / vartheta1^2
  double kappa0 = 1.0;          // vartheta0^2 * vartheta1^2
  int grid_points = 0;
  double refine_tol = 0.0;
  std::vector<int> support;     // J = nonzero rows union nonzero columns
};

// J and B[J, J]; empty J for the zero matrix.
std::pair<Matrix, std::vector<int>> support_reduce(const Matrix& B);

// which: 0, 1 or 2 selecting the norm above. which in {1,2} requires rho(B) < 1.
double vartheta(const Matrix& B, int which, const GridConfig& cfg = {});

SpectralDiagnostics diagnostics(const Matrix& B, const GridConfig& cfg = {});

struct BoundRow {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  bool applicable = true;
  bool satisfied = true;
};

struct BoundReport {
  std::vector<BoundRow> rows;
  bool diagonalizable = false;
  double eigvec_cond = 0.0;     // condition number of the eigenvector matrix
  bool all_satisfied() const;
};

// Checks the computed vartheta values against the closed-form bounds
//   vartheta0 <= 1 + ||B||_2 <= 1 + (||B||_1 + ||B||_inf)/2
//   vartheta1 <= cond2(R) / (1 - rho)              (diagonalizable only)
//   vartheta2 >= (1 + ||B||_{1->2})^{-1}
// plus the derived sqrt(theta0) lower and sqrt(kappa0) upper bounds.
BoundReport basu_bounds(const Matrix& B, const GridConfig& cfg = {});

// Lower block-triangular block-Toeplitz matrix with (i, j) block B^{i-j};
// maps stacked innovations to the stacked trajectory. Guarded to n*p <= 4000.
Matrix build_psi(const Matrix& B, int n);

}  // namespace missvar

#endif
