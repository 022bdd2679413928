#pragma once

// An abelian structure A = Z^N / relations with distinguished subgroups of
// its powers and a rational character f : A -> T^d.

#include "ppstar/formula.hpp"
#include "ppstar/integer.hpp"
#include "ppstar/lattice.hpp"
#include "ppstar/torus.hpp"

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ppstar {

// A subgroup of A^arity, as a lattice in Z^(arity*N) containing relations^arity.
struct Subgroup {
  std::size_t arity = 1;
  Lattice lattice;
};

// Rational d x N matrix acting mod Z^d, stored as integer numerators over a
// common denominator.
class Character {
 public:
  Character() = default;
  Character(std::size_t ambient_rank, std::vector<std::vector<Rational>> rows);

  std::size_t torus_dim() const noexcept { return rows_.size(); }
  std::size_t ambient_rank() const noexcept { return ambient_rank_; }
  const std::vector<std::vector<Rational>>& rows() const noexcept { return rows_; }
  const IntMatrix& numerators() const noexcept { return numerators_; }
  const Integer& denominator() const noexcept { return denominator_; }

  // Exact value F*v in Q^d before reduction mod 1.
  std::vector<Rational> apply_exact(std::span<const Integer> v) const;
  TorusPoint apply(std::span<const Integer> v) const;
  // Blockwise on a tuple of elements: T^(m*d).
  TorusPoint apply_tuple(std::span<const Integer> tuple) const;
  bool is_trivial() const;

 private:
  std::size_t ambient_rank_ = 0;
  std::vector<std::vector<Rational>> rows_;
  IntMatrix numerators_;
  Integer denominator_ = 1;
};

struct StructureSpec {
  std::string name;
  std::size_t ambient_rank = 0;
  std::vector<IntVector> relations;
  struct SubgroupSpec {
    std::size_t arity = 1;
    std::vector<IntVector> generators;
  };
  std::map<std::string, SubgroupSpec> subgroups;
  std::size_t torus_dim = 0;
  std::vector<std::vector<Rational>> character;
  std::map<std::string, IntVector> parameters;
};

class Structure {
 public:
  // Validates every invariant; throws SchemaError naming the offending path.
  static Structure build(const StructureSpec& spec);

  const std::string& name() const noexcept { return name_; }
  std::size_t ambient_rank() const noexcept { return ambient_rank_; }
  const Lattice& relations() const noexcept { return relations_; }
  const std::map<std::string, Subgroup>& subgroups() const noexcept { return subgroups_; }
  const Character& character() const noexcept { return character_; }
  std::size_t torus_dim() const noexcept { return character_.torus_dim(); }
  const std::map<std::string, IntVector>& parameters() const noexcept { return parameters_; }
  bool is_finite() const noexcept { return relations_.is_full_rank(); }

  // Subgroup lattice of a predicate, including the built-in Eq.
  const Subgroup& predicate(const std::string& name) const;
  // relations^(copies) inside Z^(copies*N).
  Lattice relations_power(std::size_t copies) const;

  // Formula signature over this structure. "one" is the unit parameter when declared.
  Signature signature(std::vector<std::string> free_vars) const;

  IntVector reduce(std::span<const Integer> element) const;
  IntVector reduce_tuple(std::span<const Integer> tuple) const;
  TorusPoint f(std::span<const Integer> element) const { return character_.apply(element); }
  TorusPoint f_tuple(std::span<const Integer> tuple) const { return character_.apply_tuple(tuple); }

  // Torsion invariant factors (> 1) and free rank of A.
  std::vector<Integer> invariant_factors() const;
  std::size_t free_rank() const noexcept { return ambient_rank_ - relations_.rank(); }
  // |A| for finite structures.
  std::optional<Integer> order() const;

  StructureSpec spec() const { return spec_; }

 private:
  std::string name_;
  std::size_t ambient_rank_ = 0;
  Lattice relations_;
  std::map<std::string, Subgroup> subgroups_;
  Subgroup equality_;
  Character character_;
  std::map<std::string, IntVector> parameters_;
  StructureSpec spec_;
};

inline constexpr const char* kUnitParameter = "one";

// JSON structure files.
Structure structure_from_json(std::string_view text);
Structure load_structure(const std::string& path);
std::string structure_to_json(const Structure& s);

}  // namespace ppstar
