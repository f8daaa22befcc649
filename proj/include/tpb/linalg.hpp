#pragma once

#include <cstddef>
#include <vector>

namespace tpb {

// Small dense row-major matrix. Everything in this project is tiny
// (calibration coefficients, Cox information), so a partial-pivot LU
// is all the linear algebra we need.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

  static Matrix identity(std::size_t n);
};

Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(const Matrix& a, const Matrix& b);
Matrix scale(const Matrix& a, double s);
Matrix transpose(const Matrix& a);

// Solve a x = b for a single right-hand side. Throws SingularMoment when the
// pivot falls below a relative threshold.
std::vector<double> solve(const Matrix& a, const std::vector<double>& b);

// Solve a X = B column by column.
Matrix solve(const Matrix& a, const Matrix& b);

Matrix inverse(const Matrix& a);

// Cholesky factorization of a symmetric matrix; returns false when the matrix
// is not positive definite beyond `shift` on the diagonal.
bool cholesky(const Matrix& a, Matrix& lower, double shift = 0.0);

double max_abs(const std::vector<double>& v);

// Running compensated (Kahan) sum.
struct KahanSum {
  double sum = 0.0;
  double carry = 0.0;

  void add(double x) {
    double y = x - carry;
    double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
  double value() const { return sum; }
};

}  // namespace tpb
