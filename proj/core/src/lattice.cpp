#include "ppstar/lattice.hpp"

#include "ppstar/error.hpp"

#include <algorithm>
#include <utility>

namespace ppstar {

// ---------------------------------------------------------------------------
// IntMatrix

IntMatrix::IntMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols) {}

IntMatrix IntMatrix::identity(std::size_t n) {
  IntMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

IntMatrix IntMatrix::from_rows(const std::vector<IntVector>& rows, std::size_t cols) {
  IntMatrix m(0, cols);
  for (const auto& r : rows) m.append_row(r);
  return m;
}

IntVector IntMatrix::row_vector(std::size_t r) const {
  auto s = row(r);
  return IntVector(s.begin(), s.end());
}

void IntMatrix::append_row(std::span<const Integer> values) {
  if (values.size() != cols_) throw Error(ErrorKind::Dimension, "append_row: width mismatch");
  data_.insert(data_.end(), values.begin(), values.end());
  ++rows_;
}

void IntMatrix::swap_rows(std::size_t a, std::size_t b) {
  if (a == b) return;
  for (std::size_t c = 0; c < cols_; ++c) std::swap((*this)(a, c), (*this)(b, c));
}

void IntMatrix::swap_cols(std::size_t a, std::size_t b) {
  if (a == b) return;
  for (std::size_t r = 0; r < rows_; ++r) std::swap((*this)(r, a), (*this)(r, b));
}

void IntMatrix::add_row_multiple(std::size_t dst, std::size_t src, const Integer& factor) {
  if (factor == 0) return;
  for (std::size_t c = 0; c < cols_; ++c) {
    const Integer& s = (*this)(src, c);
    if (s != 0) (*this)(dst, c) += factor * s;
  }
}

void IntMatrix::add_col_multiple(std::size_t dst, std::size_t src, const Integer& factor) {
  if (factor == 0) return;
  for (std::size_t r = 0; r < rows_; ++r) {
    const Integer& s = (*this)(r, src);
    if (s != 0) (*this)(r, dst) += factor * s;
  }
}

void IntMatrix::negate_row(std::size_t r) {
  for (auto& x : row(r)) x = -x;
}

void IntMatrix::negate_col(std::size_t c) {
  for (std::size_t r = 0; r < rows_; ++r) (*this)(r, c) = -(*this)(r, c);
}

IntMatrix IntMatrix::transpose() const {
  IntMatrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

IntMatrix IntMatrix::row_block(std::size_t first, std::size_t count) const {
  IntMatrix m(count, cols_);
  for (std::size_t r = 0; r < count; ++r)
    for (std::size_t c = 0; c < cols_; ++c) m(r, c) = (*this)(first + r, c);
  return m;
}

IntMatrix IntMatrix::col_block(std::size_t first, std::size_t count) const {
  IntMatrix m(rows_, count);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < count; ++c) m(r, c) = (*this)(r, first + c);
  return m;
}

bool IntMatrix::is_zero() const {
  return std::all_of(data_.begin(), data_.end(), [](const Integer& x) { return x == 0; });
}

IntMatrix operator*(const IntMatrix& a, const IntMatrix& b) {
  if (a.cols() != b.rows()) throw Error(ErrorKind::Dimension, "matrix product: inner dimension mismatch");
  IntMatrix p(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const Integer& x = a(i, k);
      if (x == 0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) {
        const Integer& y = b(k, j);
        if (y != 0) p(i, j) += x * y;
      }
    }
  return p;
}

IntVector apply(const IntMatrix& m, std::span<const Integer> v) {
  if (m.cols() != v.size()) throw Error(ErrorKind::Dimension, "apply: width mismatch");
  IntVector out(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      if (v[j] != 0 && m(i, j) != 0) out[i] += m(i, j) * v[j];
  return out;
}

IntVector apply_row(std::span<const Integer> v, const IntMatrix& m) {
  if (m.rows() != v.size()) throw Error(ErrorKind::Dimension, "apply_row: height mismatch");
  IntVector out(m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    if (v[i] == 0) continue;
    for (std::size_t j = 0; j < m.cols(); ++j)
      if (m(i, j) != 0) out[j] += v[i] * m(i, j);
  }
  return out;
}

Integer determinant(const IntMatrix& input) {
  if (input.rows() != input.cols()) throw Error(ErrorKind::Dimension, "determinant of non-square matrix");
  const std::size_t n = input.rows();
  if (n == 0) return 1;
  IntMatrix m = input;
  Integer sign = 1;
  Integer prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m(k, k) == 0) {
      std::size_t swap = k + 1;
      while (swap < n && m(swap, k) == 0) ++swap;
      if (swap == n) return 0;
      m.swap_rows(k, swap);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j)
        m(i, j) = (m(i, j) * m(k, k) - m(i, k) * m(k, j)) / prev;
    prev = m(k, k);
  }
  return sign * m(n - 1, n - 1);
}

IntMatrix block_diagonal(const IntMatrix& m, std::size_t copies) {
  IntMatrix out(m.rows() * copies, m.cols() * copies);
  for (std::size_t b = 0; b < copies; ++b)
    for (std::size_t r = 0; r < m.rows(); ++r)
      for (std::size_t c = 0; c < m.cols(); ++c) out(b * m.rows() + r, b * m.cols() + c) = m(r, c);
  return out;
}

IntMatrix kron_identity(const IntMatrix& m, std::size_t n) {
  IntMatrix out(m.rows() * n, m.cols() * n);
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (m(r, c) == 0) continue;
      for (std::size_t k = 0; k < n; ++k) out(r * n + k, c * n + k) = m(r, c);
    }
  return out;
}

// ---------------------------------------------------------------------------
// Hermite normal form

namespace {

Integer abs_value(const Integer& x) { return x < 0 ? Integer(-x) : x; }

}  // namespace

Echelon hermite_with_transform(const IntMatrix& m) {
  Echelon e{m, IntMatrix::identity(m.rows()), 0};
  IntMatrix& h = e.form;
  IntMatrix& t = e.transform;
  const std::size_t rows = h.rows();
  std::size_t r = 0;
  for (std::size_t c = 0; c < h.cols() && r < rows; ++c) {
    // Euclid on column c among rows r.. until a single nonzero remains.
    while (true) {
      std::size_t best = rows;
      for (std::size_t i = r; i < rows; ++i) {
        if (h(i, c) == 0) continue;
        if (best == rows || abs_value(h(i, c)) < abs_value(h(best, c))) best = i;
      }
      if (best == rows) break;
      h.swap_rows(r, best);
      t.swap_rows(r, best);
      bool clean = true;
      for (std::size_t i = r + 1; i < rows; ++i) {
        if (h(i, c) == 0) continue;
        Integer q = h(i, c) / h(r, c);
        h.add_row_multiple(i, r, -q);
        t.add_row_multiple(i, r, -q);
        if (h(i, c) != 0) clean = false;
      }
      if (clean) break;
    }
    if (h(r, c) == 0) continue;
    if (h(r, c) < 0) {
      h.negate_row(r);
      t.negate_row(r);
    }
    for (std::size_t i = 0; i < r; ++i) {
      if (h(i, c) == 0) continue;
      Integer q = floor_div(h(i, c), h(r, c));
      h.add_row_multiple(i, r, -q);
      t.add_row_multiple(i, r, -q);
    }
    ++r;
  }
  e.rank = r;
  return e;
}

// ---------------------------------------------------------------------------
// Lattice

Lattice::Lattice(std::size_t ambient_dim) : basis_(0, ambient_dim) {}

Lattice Lattice::full(std::size_t n) { return hnf(IntMatrix::identity(n)); }

Lattice Lattice::scaled(std::size_t n, const Integer& factor) {
  IntMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = factor;
  return hnf(m);
}

Lattice hnf(const IntMatrix& m) {
  Echelon e = hermite_with_transform(m);
  Lattice l(m.cols());
  l.basis_ = e.form.row_block(0, e.rank);
  for (std::size_t r = 0; r < e.rank; ++r) {
    std::size_t c = 0;
    while (l.basis_(r, c) == 0) ++c;
    l.pivots_.push_back(c);
  }
  return l;
}

std::optional<IntVector> Lattice::coordinates(std::span<const Integer> v) const {
  if (v.size() != ambient_dim()) throw Error(ErrorKind::Dimension, "lattice membership: dimension mismatch");
  IntVector rest(v.begin(), v.end());
  IntVector coords(rank());
  std::size_t next = 0;
  for (std::size_t c = 0; c < rest.size(); ++c) {
    if (next < rank() && pivots_[next] == c) {
      const Integer& p = basis_(next, c);
      if (rest[c] % p != 0) return std::nullopt;
      Integer q = rest[c] / p;
      if (q != 0) {
        auto row = basis_.row(next);
        for (std::size_t j = c; j < rest.size(); ++j)
          if (row[j] != 0) rest[j] -= q * row[j];
      }
      coords[next] = std::move(q);
      ++next;
    } else if (rest[c] != 0) {
      return std::nullopt;
    }
  }
  return coords;
}

bool Lattice::contains(std::span<const Integer> v) const { return coordinates(v).has_value(); }

IntVector Lattice::reduce(std::span<const Integer> v) const {
  if (v.size() != ambient_dim()) throw Error(ErrorKind::Dimension, "lattice reduce: dimension mismatch");
  IntVector out(v.begin(), v.end());
  for (std::size_t r = 0; r < rank(); ++r) {
    std::size_t c = pivots_[r];
    Integer q = floor_div(out[c], basis_(r, c));
    if (q == 0) continue;
    auto row = basis_.row(r);
    for (std::size_t j = c; j < out.size(); ++j)
      if (row[j] != 0) out[j] -= q * row[j];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Smith normal form

SmithForm snf(const IntMatrix& m) {
  SmithForm s{IntMatrix::identity(m.rows()), m, IntMatrix::identity(m.cols())};
  IntMatrix& d = s.d;
  const std::size_t rows = d.rows(), cols = d.cols();
  for (std::size_t t = 0; t < std::min(rows, cols); ++t) {
    while (true) {
      // Smallest nonzero entry of the trailing block becomes the pivot.
      std::size_t pr = rows, pc = cols;
      for (std::size_t i = t; i < rows; ++i)
        for (std::size_t j = t; j < cols; ++j)
          if (d(i, j) != 0 && (pr == rows || abs_value(d(i, j)) < abs_value(d(pr, pc)))) {
            pr = i;
            pc = j;
          }
      if (pr == rows) return s;
      d.swap_rows(t, pr);
      s.u.swap_rows(t, pr);
      d.swap_cols(t, pc);
      s.v.swap_cols(t, pc);

      bool clean = true;
      for (std::size_t i = t + 1; i < rows; ++i) {
        if (d(i, t) == 0) continue;
        Integer q = d(i, t) / d(t, t);
        d.add_row_multiple(i, t, -q);
        s.u.add_row_multiple(i, t, -q);
        if (d(i, t) != 0) clean = false;
      }
      for (std::size_t j = t + 1; j < cols; ++j) {
        if (d(t, j) == 0) continue;
        Integer q = d(t, j) / d(t, t);
        d.add_col_multiple(j, t, -q);
        s.v.add_col_multiple(j, t, -q);
        if (d(t, j) != 0) clean = false;
      }
      if (!clean) continue;

      // Enforce d(t,t) | every entry of the trailing block.
      std::size_t bad = rows;
      for (std::size_t i = t + 1; i < rows && bad == rows; ++i)
        for (std::size_t j = t + 1; j < cols; ++j)
          if (d(i, j) % d(t, t) != 0) {
            bad = i;
            break;
          }
      if (bad == rows) break;
      d.add_row_multiple(t, bad, 1);
      s.u.add_row_multiple(t, bad, 1);
    }
    if (d(t, t) < 0) {
      d.negate_row(t);
      s.u.negate_row(t);
    }
  }
  return s;
}

// ---------------------------------------------------------------------------
// Lattice operations

namespace {

void require_same_dim(const Lattice& a, const Lattice& b, const char* what) {
  if (a.ambient_dim() != b.ambient_dim())
    throw Error(ErrorKind::Dimension, std::string(what) + ": ambient dimension mismatch");
}

IntMatrix stack(const IntMatrix& a, const IntMatrix& b) {
  IntMatrix m = a;
  for (std::size_t r = 0; r < b.rows(); ++r) m.append_row(b.row(r));
  return m;
}

}  // namespace

Lattice intersect(const Lattice& a, const Lattice& b) {
  require_same_dim(a, b, "intersect");
  // x*Ba = -y*Bb  <=>  (x, y) in the left kernel of [Ba; Bb].
  Echelon e = hermite_with_transform(stack(a.basis(), b.basis()));
  IntMatrix gens(0, a.ambient_dim());
  for (std::size_t r = e.rank; r < e.transform.rows(); ++r) {
    auto x = e.transform.row(r).first(a.rank());
    gens.append_row(apply_row(x, a.basis()));
  }
  return hnf(gens);
}

Lattice sum(const Lattice& a, const Lattice& b) {
  require_same_dim(a, b, "sum");
  return hnf(stack(a.basis(), b.basis()));
}

Lattice direct_sum(const Lattice& a, const Lattice& b) {
  const std::size_t na = a.ambient_dim(), nb = b.ambient_dim();
  IntMatrix m(0, na + nb);
  IntVector row(na + nb);
  for (std::size_t r = 0; r < a.rank(); ++r) {
    std::fill(row.begin(), row.end(), Integer(0));
    std::copy(a.basis().row(r).begin(), a.basis().row(r).end(), row.begin());
    m.append_row(row);
  }
  for (std::size_t r = 0; r < b.rank(); ++r) {
    std::fill(row.begin(), row.end(), Integer(0));
    std::copy(b.basis().row(r).begin(), b.basis().row(r).end(), row.begin() + na);
    m.append_row(row);
  }
  return hnf(m);
}

Lattice image(const Lattice& l, const IntMatrix& map) {
  if (map.cols() != l.ambient_dim()) throw Error(ErrorKind::Dimension, "image: map width mismatch");
  return hnf(l.basis() * map.transpose());
}

Lattice project(const Lattice& l, std::size_t first, std::size_t count) {
  if (first + count > l.ambient_dim()) throw Error(ErrorKind::Dimension, "project: range out of bounds");
  return hnf(l.basis().col_block(first, count));
}

ProjectionWithLifts project_with_lifts(const Lattice& l, std::size_t first, std::size_t count) {
  if (first + count > l.ambient_dim()) throw Error(ErrorKind::Dimension, "project: range out of bounds");
  Echelon e = hermite_with_transform(l.basis().col_block(first, count));
  ProjectionWithLifts p{hnf(e.form.row_block(0, e.rank)), IntMatrix(0, l.ambient_dim()), Lattice()};
  IntMatrix kernel(0, l.ambient_dim());
  for (std::size_t r = 0; r < e.transform.rows(); ++r) {
    IntVector v = apply_row(e.transform.row(r), l.basis());
    if (r < e.rank) p.lifts.append_row(v);
    else kernel.append_row(v);
  }
  p.kernel = hnf(kernel);
  return p;
}

IndexValue index_of(const Lattice& sub, const Lattice& sup) {
  require_same_dim(sub, sup, "index_of");
  IntMatrix coords(0, sup.rank());
  for (std::size_t r = 0; r < sub.rank(); ++r) {
    auto c = sup.coordinates(sub.basis().row(r));
    if (!c) throw Error(ErrorKind::Precondition, "index_of: sublattice is not contained in the superlattice");
    coords.append_row(*c);
  }
  if (sub.rank() < sup.rank()) return IndexValue::infinite();
  Integer det = determinant(coords);
  return IndexValue::finite(det < 0 ? Integer(-det) : det);
}

// ---------------------------------------------------------------------------
// Affine solving

bool AffineLattice::contains(std::span<const Integer> v) const {
  if (v.size() != rep.size()) throw Error(ErrorKind::Dimension, "coset membership: dimension mismatch");
  IntVector diff(v.begin(), v.end());
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] -= rep[i];
  return group.contains(diff);
}

AffineLattice AffineLattice::canonical() const { return {group.reduce(rep), group}; }

std::optional<AffineLattice> solve(const IntMatrix& map, const Lattice& target,
                                   std::span<const Integer> shift) {
  const std::size_t p = map.rows(), n = map.cols(), r = target.rank();
  if (target.ambient_dim() != p || shift.size() != p)
    throw Error(ErrorKind::Dimension, "solve: map, target and shift disagree");
  // Unknowns z = (v, w): map*v - B^T*w = shift.  With T*A^T = H (echelon),
  // A*z = shift has solutions z = T^T*t where H^T*t = shift.
  IntMatrix combined(p, n + r);
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < n; ++j) combined(i, j) = map(i, j);
    for (std::size_t k = 0; k < r; ++k) combined(i, n + k) = -target.basis()(k, i);
  }
  Echelon e = hermite_with_transform(combined.transpose());
  Lattice columns = hnf(e.form.row_block(0, e.rank));
  auto t = columns.coordinates(shift);
  if (!t) return std::nullopt;
  IntVector z(n + r);
  for (std::size_t i = 0; i < e.rank; ++i) {
    const Integer& ti = (*t)[i];
    if (ti == 0) continue;
    auto row = e.transform.row(i);
    for (std::size_t j = 0; j < n + r; ++j) z[j] += ti * row[j];
  }
  IntMatrix kernel(0, n);
  for (std::size_t i = e.rank; i < e.transform.rows(); ++i) kernel.append_row(e.transform.row(i).first(n));
  AffineLattice out{IntVector(z.begin(), z.begin() + static_cast<std::ptrdiff_t>(n)), hnf(kernel)};
  return out.canonical();
}

std::optional<AffineLattice> intersect(const AffineLattice& a, const AffineLattice& b) {
  if (a.rep.size() != b.rep.size()) throw Error(ErrorKind::Dimension, "coset intersect: dimension mismatch");
  // x = a.rep + w*Ba with w*Ba - (b.rep - a.rep) in b.group.
  IntVector shift(a.rep.size());
  for (std::size_t i = 0; i < shift.size(); ++i) shift[i] = b.rep[i] - a.rep[i];
  auto w = solve(a.group.basis().transpose(), b.group, shift);
  if (!w) return std::nullopt;
  IntVector rep = apply_row(w->rep, a.group.basis());
  for (std::size_t i = 0; i < rep.size(); ++i) rep[i] += a.rep[i];
  return AffineLattice{std::move(rep), intersect(a.group, b.group)}.canonical();
}

}  // namespace ppstar
