#pragma once

// Reference computations that avoid the library's lattice code: naive
// matrix products, rational Gaussian elimination and box enumeration.

#include "ppstar/lattice.hpp"

#include <functional>
#include <optional>
#include <random>
#include <span>
#include <vector>

namespace ppstar::testing {

inline IntMatrix naive_product(const IntMatrix& a, const IntMatrix& b) {
  IntMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      Integer acc = 0;
      for (std::size_t k = 0; k < a.cols(); ++k) acc += a(i, k) * b(k, j);
      c(i, j) = acc;
    }
  return c;
}

// Determinant by rational elimination.
inline Rational rational_determinant(const IntMatrix& m) {
  const std::size_t n = m.rows();
  std::vector<std::vector<Rational>> a(n, std::vector<Rational>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a[i][j] = Rational(m(i, j));
  Rational det = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && a[p][c] == 0) ++p;
    if (p == n) return 0;
    if (p != c) {
      std::swap(a[p], a[c]);
      det = -det;
    }
    det *= a[c][c];
    for (std::size_t r = c + 1; r < n; ++r) {
      Rational f = a[r][c] / a[c][c];
      for (std::size_t j = c; j < n; ++j) a[r][j] -= f * a[c][j];
    }
  }
  return det;
}

// Rational coefficients c with c * rows = v, for linearly independent rows;
// nullopt when v is outside their rational span.
inline std::optional<std::vector<Rational>> rational_coordinates(const IntMatrix& rows, std::span<const Integer> v) {
  const std::size_t k = rows.rows(), n = rows.cols();
  // Columns of the augmented system rows^T c = v.
  std::vector<std::vector<Rational>> a(n, std::vector<Rational>(k + 1));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < k; ++j) a[i][j] = Rational(rows(j, i));
    a[i][k] = Rational(v[i]);
  }
  std::vector<std::size_t> pivot_col;
  std::size_t r = 0;
  for (std::size_t c = 0; c < k && r < n; ++c) {
    std::size_t p = r;
    while (p < n && a[p][c] == 0) ++p;
    if (p == n) continue;
    std::swap(a[p], a[r]);
    for (std::size_t i = 0; i < n; ++i) {
      if (i == r || a[i][c] == 0) continue;
      Rational f = a[i][c] / a[r][c];
      for (std::size_t j = c; j <= k; ++j) a[i][j] -= f * a[r][j];
    }
    pivot_col.push_back(c);
    ++r;
  }
  for (std::size_t i = r; i < n; ++i)
    if (a[i][k] != 0) return std::nullopt;
  std::vector<Rational> out(k);
  for (std::size_t i = 0; i < r; ++i) out[pivot_col[i]] = a[i][k] / a[i][pivot_col[i]];
  return out;
}

// Membership in the row span of independent rows: the rational solution is integral.
inline bool in_span(const IntMatrix& rows, std::span<const Integer> v) {
  auto c = rational_coordinates(rows, v);
  if (!c) return false;
  for (const auto& x : *c)
    if (boost::multiprecision::denominator(x) != 1) return false;
  return true;
}

// Every integer vector in [-r, r]^n.
inline void for_each_in_box(std::size_t n, long r, const std::function<void(const IntVector&)>& visit) {
  IntVector v(n, -r);
  if (n == 0) {
    visit(v);
    return;
  }
  while (true) {
    visit(v);
    std::size_t i = 0;
    while (i < n && v[i] == r) v[i++] = -r;
    if (i == n) return;
    ++v[i];
  }
}

inline IntMatrix random_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols, long bound) {
  std::uniform_int_distribution<long> d(-bound, bound);
  IntMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = d(rng);
  return m;
}

}  // namespace ppstar::testing
