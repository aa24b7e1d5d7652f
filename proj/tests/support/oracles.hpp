#pragma once

// Naive reference implementations, written independently of the library so
// tests compare two derivations of the same quantity.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace oracle {

// <a_t b_{t+lag}> over all valid t.
inline double lagged_mean(const std::vector<double>& a, const std::vector<double>& b,
                          std::size_t lag) {
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t t = 0; t < a.size(); ++t) {
    for (std::size_t s = 0; s < b.size(); ++s) {
      if (s == t + lag) {
        sum += a[t] * b[s];
        ++n;
      }
    }
  }
  return n ? sum / static_cast<double>(n) : 0.0;
}

inline std::vector<double> autocorr(const std::vector<double>& eps, std::size_t max_lag) {
  std::vector<double> out;
  for (std::size_t l = 0; l <= max_lag; ++l) out.push_back(lagged_mean(eps, eps, l));
  return out;
}

// <(m_{t+lag} - m_t) eps_t>, optionally restricted to trades with mask[t].
inline std::vector<double> response(const std::vector<double>& eps, const std::vector<double>& m,
                                    std::size_t max_lag, const std::vector<int>* mask = nullptr) {
  std::vector<double> out;
  for (std::size_t l = 0; l <= max_lag; ++l) {
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t t = 0; t + l < eps.size(); ++t) {
      if (mask && !(*mask)[t]) continue;
      sum += (m[t + l] - m[t]) * eps[t];
      ++n;
    }
    out.push_back(n ? sum / static_cast<double>(n) : 0.0);
  }
  return out;
}

// <xi^rho_{t+lag} xi^pi_t> over n - lag pairs, xi^c_t = eps_t [cat_t == c].
inline double cross(const std::vector<double>& eps, const std::vector<std::size_t>& cat,
                    std::size_t rho, std::size_t pi, std::size_t lag) {
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t t = 0; t + lag < eps.size(); ++t) {
    const double a = cat[t + lag] == rho ? eps[t + lag] : 0.0;
    const double b = cat[t] == pi ? eps[t] : 0.0;
    sum += a * b;
    ++n;
  }
  return sum / static_cast<double>(n);
}

// Dense matrix in row-major order.
struct Matrix {
  std::size_t rows = 0, cols = 0;
  std::vector<double> v;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), v(r * c, 0.0) {}
  double& operator()(std::size_t i, std::size_t j) { return v[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return v[i * cols + j]; }
};

// Solves M x = y by Gauss-Jordan elimination with partial pivoting.
inline std::vector<double> gauss_jordan(Matrix m, std::vector<double> y) {
  const std::size_t n = m.rows;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(m(r, col)) > std::abs(m(piv, col))) piv = r;
    }
    if (m(piv, col) == 0.0) throw std::runtime_error("singular");
    for (std::size_t j = 0; j < n; ++j) std::swap(m(col, j), m(piv, j));
    std::swap(y[col], y[piv]);
    const double d = m(col, col);
    for (std::size_t j = 0; j < n; ++j) m(col, j) /= d;
    y[col] /= d;
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = m(r, col);
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) m(r, j) -= f * m(col, j);
      y[r] -= f * y[col];
    }
  }
  return y;
}

// Least squares min ||A x - b|| through A^T A x = A^T b.
inline std::vector<double> least_squares(const Matrix& a, const std::vector<double>& b) {
  Matrix ata(a.cols, a.cols);
  std::vector<double> atb(a.cols, 0.0);
  for (std::size_t i = 0; i < a.cols; ++i) {
    for (std::size_t j = 0; j < a.cols; ++j) {
      double s = 0.0;
      for (std::size_t r = 0; r < a.rows; ++r) s += a(r, i) * a(r, j);
      ata(i, j) = s;
    }
    double s = 0.0;
    for (std::size_t r = 0; r < a.rows; ++r) s += a(r, i) * b[r];
    atb[i] = s;
  }
  return gauss_jordan(ata, atb);
}

// Single-category deconvolution: rows l = 0..L-1, columns k = 1..K,
// A(l, k) = C(|l - k + 1|), b(l) = R(l+1) - R(l). Returns g(1..K).
inline std::vector<double> propagator_increments(const std::vector<double>& c,
                                                 const std::vector<double>& r, std::size_t K) {
  const std::size_t L = r.size() - 1;
  Matrix a(L, K);
  std::vector<double> b(L);
  for (std::size_t l = 0; l < L; ++l) {
    for (std::size_t k = 1; k <= K; ++k) {
      const long d = std::labs(static_cast<long>(l) - static_cast<long>(k) + 1);
      a(l, k - 1) = static_cast<std::size_t>(d) < c.size() ? c[static_cast<std::size_t>(d)] : 0.0;
    }
    b[l] = r[l + 1] - r[l];
  }
  return least_squares(a, b);
}

// Standard error of the mean of a per-block statistic.
inline double batch_sigma(const std::vector<double>& per_block) {
  const double n = static_cast<double>(per_block.size());
  double mean = 0.0;
  for (double x : per_block) mean += x;
  mean /= n;
  double ss = 0.0;
  for (double x : per_block) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / (n - 1.0) / n);
}

inline double rel_err(double got, double want) {
  const double scale = std::max(std::abs(want), 1e-300);
  return std::abs(got - want) / scale;
}

}  // namespace oracle
