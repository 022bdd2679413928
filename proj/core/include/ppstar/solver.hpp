#pragma once

// Semantics of pp and pp* formulas over a Structure: solution cosets, their
// images in the torus, coset coverage, and the kernel/fibres of f.

#include "ppstar/formula.hpp"
#include "ppstar/lattice.hpp"
#include "ppstar/structure.hpp"
#include "ppstar/torus.hpp"

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ppstar {

// A coset of a subgroup of A^arity, or EMPTY. The group always contains
// relations^arity, so rep + group is closed under changing representatives.
class DefinableCoset {
 public:
  static DefinableCoset empty(std::size_t arity, std::size_t ambient_rank);
  DefinableCoset(std::size_t arity, AffineLattice coset);

  bool is_empty() const noexcept { return !coset_.has_value(); }
  std::size_t arity() const noexcept { return arity_; }
  std::size_t width() const noexcept { return width_; }  // arity * N
  const IntVector& rep() const { return coset_->rep; }
  const Lattice& group() const { return coset_->group; }
  const AffineLattice& affine() const { return *coset_; }

  bool contains(std::span<const Integer> tuple) const;
  // Number of elements of A^arity in the coset; infinite when unbounded.
  IndexValue size(const Structure& s) const;

  friend bool operator==(const DefinableCoset&, const DefinableCoset&) = default;

 private:
  DefinableCoset(std::size_t arity, std::size_t width) : arity_(arity), width_(width) {}
  std::size_t arity_ = 0;
  std::size_t width_ = 0;
  std::optional<AffineLattice> coset_;
};

// Parameter values overriding the structure's own table.
using ParameterAssignment = std::map<std::string, IntVector>;

// Precompiled matrix form of phi(x, y): evaluates the witness set
// {y : phi(a, y)} for many tuples a without re-solving.
class WitnessMap {
 public:
  WitnessMap(const Structure& s, const PpFormula& phi, const ParameterAssignment& args = {});

  std::size_t free_arity() const noexcept { return free_arity_; }
  std::size_t bound_arity() const noexcept { return bound_arity_; }

  // {x : exists y phi(x, y)}
  DefinableCoset solutions() const;
  // {y : phi(tuple, y)}; tuple has free_arity * N entries.
  DefinableCoset witnesses(std::span<const Integer> tuple) const;
  // Some y with phi(tuple, y), not canonicalized; nullopt when there is none.
  std::optional<IntVector> witness(std::span<const Integer> tuple) const;
  // Witness set for parameters all zero: the group every nonempty witness set is a coset of.
  const Lattice& witness_group() const noexcept { return witness_group_; }
  // Solution coset of the quantifier-free matrix over (x, y); nullopt when empty.
  const std::optional<AffineLattice>& matrix_solutions() const noexcept { return matrix_; }

 private:
  std::size_t n_ = 0;  // ambient rank
  std::size_t free_arity_ = 0;
  std::size_t bound_arity_ = 0;
  std::optional<AffineLattice> matrix_;
  Lattice projection_;     // x-part of the matrix group
  IntMatrix lifts_;        // lifts_.row(i) projects onto projection_.basis().row(i)
  Lattice witness_group_;  // y-part of the matrix group's kernel of projection
};

DefinableCoset eval_pp(const Structure& s, const PpFormula& phi, const ParameterAssignment& args = {});

// Closure of f applied to the coset; EMPTY maps to EMPTY.
TorusCoset torus_image(const Structure& s, const DefinableCoset& c);

bool satisfies_ppstar(const Structure& s, const PpStarFormula& psi, std::span<const Integer> tuple,
                      const ParameterAssignment& args = {});

// Quantifier-free pp* formulas only: f-value constraints are checked up to
// circle distance eps; atoms are checked exactly.
bool satisfies_ppstar_approx(const Structure& s, const PpStarFormula& psi, std::span<const Integer> tuple,
                             const Rational& eps, const ParameterAssignment& args = {});

struct CoverAnalysis {
  bool covered = false;
  std::vector<std::size_t> survivors;  // indices kept by the finite-index filter
  Integer base_index = 0;              // [H : K0]
  Integer signed_sum = 0;              // sum over subsets, including the empty one
};

// Decides X subset of the union of the Xi.
CoverAnalysis cover_analysis(const DefinableCoset& x, const std::vector<DefinableCoset>& covers);
bool cover_decide(const DefinableCoset& x, const std::vector<DefinableCoset>& covers);

// Ker f when value is empty, otherwise the fibre f^-1(value).
DefinableCoset kernel_and_fiber(const Structure& s, const std::optional<TorusPoint>& value);

}  // namespace ppstar
