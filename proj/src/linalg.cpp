#include "lrmm/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lrmm/error.hpp"

namespace lrmm {

namespace {

void check_rank(const Matrix& a, int r) {
  if (a.rows() < 1 || a.cols() < 1)
    throw DimensionError("matrix must be non-empty");
  if (r < 1 || r > std::min(a.rows(), a.cols()))
    throw DimensionError("rank " + std::to_string(r) +
                         " outside [1, " +
                         std::to_string(std::min(a.rows(), a.cols())) + "]");
}

Eigen::Index largest_abs_index(const Eigen::Ref<const Vector>& v) {
  Eigen::Index best = 0;
  double best_abs = -1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double x = std::abs(v[i]);
    if (x > best_abs) {
      best_abs = x;
      best = i;
    }
  }
  return best;
}

TruncatedSvd svd_unchecked(const Matrix& a, int r) {
  Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  TruncatedSvd out;
  out.left = svd.matrixU().leftCols(r);
  out.singular_values = svd.singularValues().head(r);
  out.right = svd.matrixV().leftCols(r);
  for (int k = 0; k < r; ++k) {
    if (out.left(largest_abs_index(out.left.col(k)), k) < 0.0) {
      out.left.col(k) *= -1.0;
      out.right.col(k) *= -1.0;
    }
  }
  return out;
}

}  // namespace

Matrix TruncatedSvd::reconstruct() const {
  return left * singular_values.asDiagonal() * right.transpose();
}

void require_finite(const Matrix& a, const char* what) {
  if (!a.allFinite())
    throw NonFinite(std::string(what) + " has non-finite entries");
}

bool canonicalize_sign(Eigen::Ref<Vector> v) {
  if (v.size() == 0) return false;
  if (v[largest_abs_index(v)] < 0.0) {
    v *= -1.0;
    return true;
  }
  return false;
}

TruncatedSvd top_r_svd(const Matrix& a, int r) {
  check_rank(a, r);
  require_finite(a, "top_r_svd input");
  TruncatedSvd out = svd_unchecked(a, r);
  const double s1 = out.singular_values[0];
  const double sr = out.singular_values[r - 1];
  if (sr <= kRankTolerance * std::max(s1, 1.0))
    throw DegenerateSpectrum("requested rank " + std::to_string(r) +
                             " exceeds numerical rank (sigma_r = " +
                             std::to_string(sr) + ")");
  return out;
}

Matrix rank_r_approx(const Matrix& a, int r) {
  return top_r_svd(a, r).reconstruct();
}

Matrix project_rank(const Matrix& a, int r) {
  check_rank(a, r);
  require_finite(a, "project_rank input");
  if (r == std::min(a.rows(), a.cols())) return a;
  return svd_unchecked(a, r).reconstruct();
}

EigenPair leading_eigvec_sym(const Matrix& a, bool strict) {
  if (a.rows() != a.cols() || a.rows() == 0)
    throw DimensionError("leading_eigvec_sym needs a non-empty square matrix");
  require_finite(a, "leading_eigvec_sym input");
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > kSymmetryTolerance * scale)
    throw DimensionError("leading_eigvec_sym input is not symmetric");

  Eigen::SelfAdjointEigenSolver<Matrix> eig(a);
  const Eigen::Index n = a.rows();
  EigenPair out;
  out.value = eig.eigenvalues()[n - 1];
  out.vector = eig.eigenvectors().col(n - 1);
  if (strict && n > 1) {
    const double gap = out.value - eig.eigenvalues()[n - 2];
    if (gap <= kEigenGapTolerance * std::max(std::abs(out.value), 1e-300))
      throw DegenerateSpectrum("top eigenvalue is not simple");
  }
  canonicalize_sign(out.vector);
  return out;
}

Norms norms(const Matrix& a) {
  Norms out;
  out.frobenius = a.norm();
  if (a.size() == 0 || out.frobenius == 0.0) return out;
  Eigen::BDCSVD<Matrix> svd(a);
  out.op = svd.singularValues()[0];
  return out;
}

double max_principal_angle(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows())
    throw DimensionError("principal angles need matching row counts");
  // sin of the largest angle is the spectral norm of b's residual off span(a).
  const Matrix residual = b - a * (a.transpose() * b);
  const double sine = norms(residual).op;
  return std::asin(std::min(1.0, sine));
}

}  // namespace lrmm
