#pragma once

// Finite structures as small integer codes: A = Z/d_1 + ... + Z/d_r via the
// Smith form of the relations, with addition tables, element orders, f-value
// classes and the distinguished subgroups as sets of coded tuples.

#include "ppstar/structure.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace ppstar {

inline constexpr std::size_t kDefaultMaxOrbitOrder = 64;

// Canonical representatives of every element of a finite structure, in
// mixed-radix order of their Smith coordinates.
std::vector<IntVector> finite_elements(const Structure& s);

// Bound on |A| for exhaustive searches: PPSTAR_MAX_ORBIT or the default.
std::size_t max_orbit_order();

class FiniteGroup {
 public:
  using Code = std::uint32_t;

  // Throws Precondition for infinite structures, SizeLimit when |A| > limit.
  FiniteGroup(const Structure& s, std::size_t limit);

  const Structure& structure() const noexcept { return *s_; }
  std::size_t order() const noexcept { return elements_.size(); }

  // Canonical representative in Z^N of each code, in code order.
  const std::vector<IntVector>& elements() const noexcept { return elements_; }
  const IntVector& element(Code c) const { return elements_[c]; }
  Code code(std::span<const Integer> element) const;
  std::vector<Code> codes(std::span<const Integer> tuple) const;
  IntVector tuple(std::span<const Code> codes) const;

  Code add(Code a, Code b) const { return add_[a * order() + b]; }
  Code neg(Code a) const { return neg_[a]; }
  Code multiple(Code a, std::uint64_t k) const;
  std::uint32_t element_order(Code a) const { return orders_[a]; }
  // Elements share an f-class iff they have the same f-value.
  std::uint32_t f_class(Code a) const { return f_classes_[a]; }

  struct Relation {
    std::size_t arity;
    std::vector<std::vector<Code>> generators;  // generating tuples
    std::vector<bool> members;                  // indexed by mixed-radix tuple code
  };
  const std::vector<Relation>& relations() const noexcept { return predicates_; }
  std::size_t tuple_index(std::span<const Code> tuple) const;

  // Codes are mixed-radix numbers over these Smith moduli; the code with a
  // single digit 1 generates the corresponding cyclic factor.
  const std::vector<std::size_t>& moduli() const noexcept { return radix_; }
  std::size_t digit(Code a, std::size_t i) const { return (a / strides_[i]) % radix_[i]; }
  Code unit(std::size_t i) const { return static_cast<Code>(strides_[i]); }

 private:
  const Structure* s_;
  std::vector<Integer> moduli_;
  std::vector<std::size_t> radix_, strides_;
  IntMatrix v_;
  std::vector<IntVector> elements_;
  std::vector<Code> add_, neg_;
  std::vector<std::uint32_t> orders_, f_classes_;
  std::vector<Relation> predicates_;
};

// A map A -> A as the image of every code.
using Endomorphism = std::vector<FiniteGroup::Code>;
using Automorphism = Endomorphism;

// Some automorphism sigma of (A, subgroups, f) with sigma(a) = b, if any.
std::optional<Automorphism> find_automorphism(const FiniteGroup& g, std::span<const FiniteGroup::Code> a,
                                              std::span<const FiniteGroup::Code> b);

// Every endomorphism h of (A, subgroups, f): h maps each distinguished
// subgroup into itself and f(h(x)) = f(x). nullopt when the search would try
// more than `limit` assignments of generator images.
std::optional<std::vector<Endomorphism>> endomorphisms(const FiniteGroup& g, std::uint64_t limit);

bool is_bijective(const Endomorphism& h);

}  // namespace ppstar
