#pragma once

#include <Eigen/Dense>

namespace lrmm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Leading r singular triplets with canonical signs.
///
/// Each left singular vector has its largest-magnitude entry positive (lowest
/// index wins ties); the matching right vector is flipped with it, so
/// left * diag(singular_values) * right^T is unaffected.
struct TruncatedSvd {
  Matrix left;             // d1 x r, orthonormal columns
  Vector singular_values;  // r, descending
  Matrix right;            // d2 x r, orthonormal columns

  Matrix reconstruct() const;
};

struct EigenPair {
  Vector vector;
  double value = 0.0;
};

struct Norms {
  double frobenius = 0.0;
  double op = 0.0;
};

/// Relative threshold below which sigma_r counts as numerically zero.
inline constexpr double kRankTolerance = 1e-12;
inline constexpr double kSymmetryTolerance = 1e-8;
inline constexpr double kEigenGapTolerance = 1e-10;

/// Throws DimensionError on invalid r and DegenerateSpectrum if
/// sigma_r <= 1e-12 * max(sigma_1, 1).
TruncatedSvd top_r_svd(const Matrix& a, int r);

/// Best rank-r approximation; same errors as top_r_svd.
Matrix rank_r_approx(const Matrix& a, int r);

/// Best approximation of rank at most r. Never throws on rank deficiency;
/// used by iterative procedures that may pass through the zero matrix.
Matrix project_rank(const Matrix& a, int r);

/// Unit eigenvector of the algebraically largest eigenvalue, canonical sign.
/// With `strict`, a relative gap below 1e-10 to the runner-up is an error.
EigenPair leading_eigvec_sym(const Matrix& a, bool strict = false);

Norms norms(const Matrix& a);

/// Flip `v` so its largest-magnitude entry (lowest index on ties) is positive.
/// Returns true if a flip happened.
bool canonicalize_sign(Eigen::Ref<Vector> v);

/// Largest principal angle (radians) between the column spans of two
/// matrices with orthonormal columns.
double max_principal_angle(const Matrix& a, const Matrix& b);

void require_finite(const Matrix& a, const char* what);

}  // namespace lrmm
