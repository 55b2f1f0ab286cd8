#pragma once

// Independent reference computations used only by the tests. Nothing here
// calls into the library's numeric paths.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace oracle {

using Matrix = std::vector<std::vector<double>>;

/// Pearson correlation of two equal-length columns, straight from the textbook formula.
inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  long double mx = 0, my = 0;
  for (std::size_t t = 0; t < n; ++t) {
    mx += x[t];
    my += y[t];
  }
  mx /= n;
  my /= n;
  long double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t t = 0; t < n; ++t) {
    sxy += (x[t] - mx) * (y[t] - my);
    sxx += (x[t] - mx) * (x[t] - mx);
    syy += (y[t] - my) * (y[t] - my);
  }
  return static_cast<double>(sxy / std::sqrt(sxx * syy));
}

/// Pairwise Pearson matrix of the columns of `data` (rows = time).
inline Matrix pearson_matrix(const Matrix& data) {
  const std::size_t n = data.empty() ? 0 : data[0].size();
  std::vector<std::vector<double>> cols(n);
  for (const auto& row : data) {
    for (std::size_t j = 0; j < n; ++j) cols[j].push_back(row[j]);
  }
  Matrix c(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) c[i][j] = i == j ? 1.0 : pearson(cols[i], cols[j]);
  }
  return c;
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations in long double, sorted descending.
inline std::vector<double> jacobi_eigenvalues(const Matrix& m) {
  const std::size_t n = m.size();
  std::vector<std::vector<long double>> a(n, std::vector<long double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) a[i][j] = m[i][j];
  }
  for (int sweep = 0; sweep < 100; ++sweep) {
    long double off = 0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) off += a[i][j] * a[i][j];
    }
    if (off < 1e-40L) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::fabs(a[p][q]) < 1e-300L) continue;
        const long double theta = (a[q][q] - a[p][p]) / (2 * a[p][q]);
        const long double t = (theta >= 0 ? 1 : -1) / (std::fabs(theta) + std::sqrt(theta * theta + 1));
        const long double c = 1 / std::sqrt(t * t + 1);
        const long double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const long double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const long double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = static_cast<double>(a[i][i]);
  std::sort(ev.begin(), ev.end(), std::greater<>());
  return ev;
}

/// det(M - x I) by Gaussian elimination with partial pivoting, in long double.
inline long double characteristic(const Matrix& m, long double x) {
  const std::size_t n = m.size();
  std::vector<std::vector<long double>> a(n, std::vector<long double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) a[i][j] = m[i][j] - (i == j ? x : 0);
  }
  long double det = 1;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) piv = r;
    }
    if (a[piv][col] == 0) return 0;
    if (piv != col) {
      std::swap(a[piv], a[col]);
      det = -det;
    }
    det *= a[col][col];
    for (std::size_t r = col + 1; r < n; ++r) {
      const long double f = a[r][col] / a[col][col];
      for (std::size_t k = col; k < n; ++k) a[r][k] -= f * a[col][k];
    }
  }
  return det;
}

/**
 * Roots of the characteristic polynomial on [lo, hi]: sign changes on a fine
 * grid, refined by bisection. Only valid for simple roots; throws if it does
 * not find exactly n of them.
 */
inline std::vector<double> charpoly_eigenvalues(const Matrix& m, double lo, double hi, std::size_t grid = 200000) {
  std::vector<double> roots;
  const long double step = (static_cast<long double>(hi) - lo) / grid;
  long double x0 = lo;
  long double f0 = characteristic(m, x0);
  for (std::size_t g = 1; g <= grid; ++g) {
    const long double x1 = lo + step * g;
    const long double f1 = characteristic(m, x1);
    if ((f0 < 0) != (f1 < 0)) {
      long double a = x0, b = x1, fa = f0;
      for (int it = 0; it < 200 && b - a > 1e-18L; ++it) {
        const long double mid = (a + b) / 2;
        const long double fm = characteristic(m, mid);
        if ((fm < 0) == (fa < 0)) {
          a = mid;
          fa = fm;
        } else {
          b = mid;
        }
      }
      roots.push_back(static_cast<double>((a + b) / 2));
    }
    x0 = x1;
    f0 = f1;
  }
  if (roots.size() != m.size()) throw std::runtime_error("characteristic polynomial oracle missed a root");
  std::sort(roots.begin(), roots.end(), std::greater<>());
  return roots;
}

}  // namespace oracle
