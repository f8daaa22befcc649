#include "tpb/linalg.hpp"

#include <cmath>
#include <cstdlib>

#include "tpb/error.hpp"

namespace tpb {

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
  require(a.rows == b.rows && a.cols == b.cols, ErrorCode::dimension_mismatch,
          "matrix addition shape mismatch");
  Matrix out = a;
  for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] += b.data[i];
  return out;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
  require(a.rows == b.rows && a.cols == b.cols, ErrorCode::dimension_mismatch,
          "matrix subtraction shape mismatch");
  Matrix out = a;
  for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] -= b.data[i];
  return out;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  require(a.cols == b.rows, ErrorCode::dimension_mismatch, "matrix product shape mismatch");
  Matrix out(a.rows, b.cols);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t k = 0; k < a.cols; ++k) {
      double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols; ++j) out(i, j) += aik * b(k, j);
    }
  return out;
}

Matrix scale(const Matrix& a, double s) {
  Matrix out = a;
  for (double& x : out.data) x *= s;
  return out;
}

Matrix transpose(const Matrix& a) {
  Matrix out(a.cols, a.rows);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t j = 0; j < a.cols; ++j) out(j, i) = a(i, j);
  return out;
}

namespace {

// LU with partial pivoting; factors in place, returns the pivot row order.
std::vector<std::size_t> lu_factor(Matrix& a) {
  require(a.rows == a.cols, ErrorCode::dimension_mismatch, "LU requires a square matrix");
  std::size_t n = a.rows;
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;

  double scale_norm = 0.0;
  for (double x : a.data) scale_norm = std::max(scale_norm, std::abs(x));
  double tiny = scale_norm * 1e-13 + 1e-300;

  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    double best = std::abs(a(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      double v = std::abs(a(i, k));
      if (v > best) {
        best = v;
        piv = i;
      }
    }
    if (best <= tiny) fail(ErrorCode::singular_moment, "singular matrix in LU solve");
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
      std::swap(perm[k], perm[piv]);
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      a(i, k) /= a(k, k);
      double lik = a(i, k);
      if (lik == 0.0) continue;
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= lik * a(k, j);
    }
  }
  return perm;
}

std::vector<double> lu_solve(const Matrix& lu, const std::vector<std::size_t>& perm,
                             const std::vector<double>& b) {
  std::size_t n = lu.rows;
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[perm[i]];
  for (std::size_t i = 1; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) x[i] -= lu(i, j) * x[j];
  for (std::size_t ii = n; ii-- > 0;) {
    for (std::size_t j = ii + 1; j < n; ++j) x[ii] -= lu(ii, j) * x[j];
    x[ii] /= lu(ii, ii);
  }
  return x;
}

}  // namespace

std::vector<double> solve(const Matrix& a, const std::vector<double>& b) {
  require(a.rows == b.size(), ErrorCode::dimension_mismatch, "solve rhs size mismatch");
  Matrix lu = a;
  auto perm = lu_factor(lu);
  return lu_solve(lu, perm, b);
}

Matrix solve(const Matrix& a, const Matrix& b) {
  require(a.rows == b.rows, ErrorCode::dimension_mismatch, "solve rhs shape mismatch");
  Matrix lu = a;
  auto perm = lu_factor(lu);
  Matrix out(b.rows, b.cols);
  std::vector<double> col(b.rows);
  for (std::size_t j = 0; j < b.cols; ++j) {
    for (std::size_t i = 0; i < b.rows; ++i) col[i] = b(i, j);
    auto x = lu_solve(lu, perm, col);
    for (std::size_t i = 0; i < b.rows; ++i) out(i, j) = x[i];
  }
  return out;
}

Matrix inverse(const Matrix& a) { return solve(a, Matrix::identity(a.rows)); }

bool cholesky(const Matrix& a, Matrix& lower, double shift) {
  if (a.rows != a.cols) return false;
  std::size_t n = a.rows;
  lower = Matrix(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= lower(i, k) * lower(j, k);
      if (i == j) {
        s += shift;
        if (s <= 0.0) return false;
        lower(i, i) = std::sqrt(s);
      } else {
        lower(i, j) = s / lower(j, j);
      }
    }
  }
  return true;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) {
    if (std::isnan(x)) return x;  // propagate, never mask
    m = std::max(m, std::abs(x));
  }
  return m;
}

}  // namespace tpb
