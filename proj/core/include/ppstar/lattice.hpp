#pragma once

// Exact integer-matrix and lattice algebra. A lattice is an integer row span
// inside Z^N, stored by its canonical Hermite normal form: rows in echelon
// order, pivots positive, entries above each pivot reduced into [0, pivot).
// Two lattices are equal iff their canonical bases are identical.

#include "ppstar/integer.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace ppstar {

class IntMatrix {
 public:
  IntMatrix() = default;
  IntMatrix(std::size_t rows, std::size_t cols);

  static IntMatrix identity(std::size_t n);
  // `cols` is required so that an empty row list keeps its width.
  static IntMatrix from_rows(const std::vector<IntVector>& rows, std::size_t cols);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  Integer& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const Integer& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<Integer> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const Integer> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  IntVector row_vector(std::size_t r) const;

  void append_row(std::span<const Integer> values);
  void swap_rows(std::size_t a, std::size_t b);
  void swap_cols(std::size_t a, std::size_t b);
  // row[dst] += factor * row[src]
  void add_row_multiple(std::size_t dst, std::size_t src, const Integer& factor);
  void add_col_multiple(std::size_t dst, std::size_t src, const Integer& factor);
  void negate_row(std::size_t r);
  void negate_col(std::size_t c);

  IntMatrix transpose() const;
  // Rows [first, first + count) / columns [first, first + count).
  IntMatrix row_block(std::size_t first, std::size_t count) const;
  IntMatrix col_block(std::size_t first, std::size_t count) const;

  bool is_zero() const;

  friend IntMatrix operator*(const IntMatrix& a, const IntMatrix& b);
  friend bool operator==(const IntMatrix& a, const IntMatrix& b) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Integer> data_;
};

// m * v with v a column vector.
IntVector apply(const IntMatrix& m, std::span<const Integer> v);
// v * m with v a row vector.
IntVector apply_row(std::span<const Integer> v, const IntMatrix& m);

// Exact determinant (fraction-free Bareiss elimination).
Integer determinant(const IntMatrix& m);

// Block diagonal matrix with `copies` copies of m.
IntMatrix block_diagonal(const IntMatrix& m, std::size_t copies);
// m (x) I_n: every entry becomes entry * I_n.
IntMatrix kron_identity(const IntMatrix& m, std::size_t n);

struct Echelon {
  IntMatrix form;       // canonical HNF rows first, then zero rows
  IntMatrix transform;  // unimodular, transform * input == form
  std::size_t rank = 0;
};

Echelon hermite_with_transform(const IntMatrix& m);

class Lattice {
 public:
  // Zero lattice in Z^ambient_dim.
  explicit Lattice(std::size_t ambient_dim = 0);

  static Lattice full(std::size_t n);
  static Lattice scaled(std::size_t n, const Integer& factor);  // factor * Z^n

  std::size_t ambient_dim() const noexcept { return basis_.cols(); }
  std::size_t rank() const noexcept { return basis_.rows(); }
  const IntMatrix& basis() const noexcept { return basis_; }
  const std::vector<std::size_t>& pivots() const noexcept { return pivots_; }

  bool contains(std::span<const Integer> v) const;
  // Coefficients of v over the basis rows, or nullopt when v is not in the span.
  std::optional<IntVector> coordinates(std::span<const Integer> v) const;
  // Canonical representative of v modulo the lattice.
  IntVector reduce(std::span<const Integer> v) const;

  bool is_full_rank() const noexcept { return rank() == ambient_dim(); }

  friend bool operator==(const Lattice& a, const Lattice& b) { return a.basis_ == b.basis_; }

 private:
  friend Lattice hnf(const IntMatrix& m);
  IntMatrix basis_;
  std::vector<std::size_t> pivots_;
};

Lattice hnf(const IntMatrix& m);

struct SmithForm {
  IntMatrix u;  // rows x rows, unimodular
  IntMatrix d;  // same shape as input, diagonal, d_1 | d_2 | ...
  IntMatrix v;  // cols x cols, unimodular
};

SmithForm snf(const IntMatrix& m);

Lattice intersect(const Lattice& a, const Lattice& b);
Lattice sum(const Lattice& a, const Lattice& b);
Lattice direct_sum(const Lattice& a, const Lattice& b);
// {map * v : v in l}; map is p x ambient_dim.
Lattice image(const Lattice& l, const IntMatrix& map);
// Coordinates [first, first + count) of every lattice vector.
Lattice project(const Lattice& l, std::size_t first, std::size_t count);

// Projection together with a section: lifts.row(i) lies in the source
// lattice and projects onto image.basis().row(i).
struct ProjectionWithLifts {
  Lattice image;
  IntMatrix lifts;
  Lattice kernel;  // vectors of the source lattice that project to zero
};

ProjectionWithLifts project_with_lifts(const Lattice& l, std::size_t first, std::size_t count);

class IndexValue {
 public:
  static IndexValue infinite() { return IndexValue(); }
  static IndexValue finite(Integer n) { return IndexValue(std::move(n)); }

  bool is_infinite() const noexcept { return !value_.has_value(); }
  const Integer& value() const { return *value_; }

  friend bool operator==(const IndexValue&, const IndexValue&) = default;

 private:
  IndexValue() = default;
  explicit IndexValue(Integer n) : value_(std::move(n)) {}
  std::optional<Integer> value_;
};

// [sup : sub]; throws Precondition when sub is not contained in sup.
IndexValue index_of(const Lattice& sub, const Lattice& sup);

// rep + group, a coset of a lattice.
struct AffineLattice {
  IntVector rep;
  Lattice group;

  bool contains(std::span<const Integer> v) const;
  // Same coset with rep reduced canonically modulo group.
  AffineLattice canonical() const;

  friend bool operator==(const AffineLattice&, const AffineLattice&) = default;
};

// {v : map * v - shift in target}, or nullopt when empty.
std::optional<AffineLattice> solve(const IntMatrix& map, const Lattice& target,
                                   std::span<const Integer> shift);

std::optional<AffineLattice> intersect(const AffineLattice& a, const AffineLattice& b);

}  // namespace ppstar
