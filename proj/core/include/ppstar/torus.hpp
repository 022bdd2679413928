#pragma once

// Rational points of the torus T^m = R^m / Z^m and its closed subgroups.
// A closed subgroup is stored only through its annihilator lattice
// {chi in Z^m : chi . x in Z for all x in the subgroup}; the subgroup is
// recovered as {x : chi . x in Z for every annihilator row chi}.

#include "ppstar/integer.hpp"
#include "ppstar/lattice.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace ppstar {

class TorusPoint {
 public:
  TorusPoint() = default;
  // Coordinates are reduced into [0, 1).
  explicit TorusPoint(std::vector<Rational> coords);

  static TorusPoint zero(std::size_t dim) { return TorusPoint(std::vector<Rational>(dim)); }

  std::size_t dim() const noexcept { return coords_.size(); }
  const std::vector<Rational>& coords() const noexcept { return coords_; }
  const Rational& operator[](std::size_t i) const { return coords_[i]; }

  // Concatenation, used to build points of T^(m*d) from per-variable values.
  TorusPoint concat(const TorusPoint& other) const;
  TorusPoint slice(std::size_t first, std::size_t count) const;

  friend TorusPoint operator+(const TorusPoint& a, const TorusPoint& b);
  friend TorusPoint operator-(const TorusPoint& a, const TorusPoint& b);
  friend TorusPoint operator-(const TorusPoint& a);
  friend bool operator==(const TorusPoint&, const TorusPoint&) = default;
  friend bool operator<(const TorusPoint& a, const TorusPoint& b) { return a.coords_ < b.coords_; }

  // "p/q" for one coordinate, "(p/q, r/s)" otherwise, "()" for T^0.
  std::string to_string() const;

 private:
  std::vector<Rational> coords_;
};

class ClosedTorusSubgroup {
 public:
  // The subgroup annihilated by `annihilator` (a lattice in Z^dim).
  explicit ClosedTorusSubgroup(Lattice annihilator);

  static ClosedTorusSubgroup trivial(std::size_t dim) { return ClosedTorusSubgroup(Lattice::full(dim)); }
  static ClosedTorusSubgroup whole(std::size_t dim) { return ClosedTorusSubgroup(Lattice(dim)); }

  std::size_t dim() const noexcept { return annihilator_.ambient_dim(); }
  const Lattice& annihilator() const noexcept { return annihilator_; }

  bool contains(const TorusPoint& x) const;
  bool is_finite() const noexcept { return annihilator_.is_full_rank(); }
  // Cardinality: the index of the annihilator in Z^dim.
  IndexValue order() const;
  // All elements, sorted; only for finite subgroups.
  std::vector<TorusPoint> elements() const;

  // Annihilator values of x mod 1; they identify the coset x + G.
  std::vector<Rational> coset_key(const TorusPoint& x) const;
  // Deterministic representative of x + G (depends only on the coset).
  TorusPoint canonical_rep(const TorusPoint& x) const;

  friend bool operator==(const ClosedTorusSubgroup& a, const ClosedTorusSubgroup& b) {
    return a.annihilator_ == b.annihilator_;
  }

 private:
  Lattice annihilator_;
  std::shared_ptr<const SmithForm> smith_;
};

class TorusCoset {
 public:
  static TorusCoset empty(std::size_t dim);
  // rep is replaced by the canonical representative of rep + group.
  TorusCoset(const TorusPoint& rep, ClosedTorusSubgroup group);

  bool is_empty() const noexcept { return empty_; }
  std::size_t dim() const noexcept { return group_.dim(); }
  const TorusPoint& rep() const { return rep_; }
  const ClosedTorusSubgroup& group() const { return group_; }

  friend bool operator==(const TorusCoset& a, const TorusCoset& b);

 private:
  TorusCoset(std::size_t dim);
  bool empty_ = false;
  TorusPoint rep_;
  ClosedTorusSubgroup group_;
};

// Smallest closed subgroup containing all generators.
ClosedTorusSubgroup closure_of(const std::vector<TorusPoint>& gens, std::size_t dim);

bool member(const TorusPoint& x, const TorusCoset& c);
TorusCoset coset_intersect(const TorusCoset& a, const TorusCoset& b);

// max_i min(frac(a_i - b_i), 1 - frac(a_i - b_i))
Rational circle_distance(const TorusPoint& a, const TorusPoint& b);
// True iff some point of c lies within circle distance eps of x.
bool approx_member(const TorusPoint& x, const TorusCoset& c, const Rational& eps);

// Some x in T^cols with rows * x == targets (mod Z^rows), or nullopt.
std::optional<TorusPoint> solve_congruence(const IntMatrix& rows, const std::vector<Rational>& targets);

}  // namespace ppstar
