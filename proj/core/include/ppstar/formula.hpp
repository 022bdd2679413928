#pragma once

// Concrete syntax and ASTs for pp, pp* and negated-pp formulas.
//
//   formula := ['!'] ('E' varlist '.')* conj
//   conj    := atom ('&' atom)*
//   atom    := NAME '(' term (',' term)* ')'
//            | 'f' '(' VAR ')' '=' tpoint
//            | term '=' term                 (sugar for Eq(lhs - rhs))
//   term    := mono (('+' | '-') mono)*
//   mono    := ['-'] (INT ['*'] NAME | INT | NAME)
//   tpoint  := rational | '(' rational (',' rational)* ')'
//
// Eq is the built-in unary predicate "equals zero".

#include "ppstar/integer.hpp"
#include "ppstar/lattice.hpp"
#include "ppstar/torus.hpp"

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace ppstar {

inline constexpr const char* kEqPredicate = "Eq";

struct Signature {
  std::map<std::string, std::size_t> predicates{{kEqPredicate, 1}};
  std::vector<std::string> free_vars;
  std::vector<std::string> params;  // sorted
  // Bare integer constants are multiples of this parameter; rejected if unset.
  std::optional<std::string> unit_param;
  std::size_t torus_dim = 0;
};

// An integer linear form over free variables, bound variables, parameters
// and the unit constant.
struct Term {
  IntVector free;
  IntVector bound;
  std::map<std::string, Integer> params;  // nonzero coefficients only
  Integer constant = 0;

  bool is_zero() const;
  friend bool operator==(const Term&, const Term&) = default;
};

struct Atom {
  std::string predicate;
  std::vector<Term> args;
  friend bool operator==(const Atom&, const Atom&) = default;
};

struct PpFormula {
  std::vector<std::string> free_names;
  std::vector<std::string> bound_names;
  // Sizes of the successive quantifier blocks; they sum to bound_names.size().
  std::vector<std::size_t> blocks;
  std::vector<Atom> atoms;

  std::size_t free_arity() const noexcept { return free_names.size(); }
  std::size_t bound_arity() const noexcept { return bound_names.size(); }
  friend bool operator==(const PpFormula&, const PpFormula&) = default;
};

struct PpStarFormula {
  PpFormula core;
  // Variable index (free variables first, then bound) -> prescribed f-value.
  std::map<std::size_t, TorusPoint> f_constraints;
  friend bool operator==(const PpStarFormula&, const PpStarFormula&) = default;
};

struct NegPpFormula {
  PpFormula inner;
  friend bool operator==(const NegPpFormula&, const NegPpFormula&) = default;
};

using Formula = std::variant<PpFormula, PpStarFormula, NegPpFormula>;

// Result has alternative PpStarFormula only when an f-constraint occurs.
Formula parse(std::string_view text, const Signature& sig);
// Convenience wrappers; they throw ParseError if the text has the wrong shape.
PpFormula parse_pp(std::string_view text, const Signature& sig);
PpStarFormula parse_ppstar(std::string_view text, const Signature& sig);

std::string render(const Term& t, const PpFormula& context);
std::string render(const PpFormula& f);
std::string render(const PpStarFormula& f);
std::string render(const NegPpFormula& f);
std::string render(const Formula& f);

// Free-variable names in order of first occurrence, skipping bound
// variables, predicate names, 'f', 'E' and the given parameters.
std::vector<std::string> scan_free_variables(std::string_view text, const std::vector<std::string>& params);

struct NormalizedFormula {
  Formula ast;
  std::vector<std::string> param_slots;
  // One matrix per atom: rows = predicate arity, columns = free + bound +
  // param_slots + constant.
  std::vector<IntMatrix> atom_matrices;
};

// Merges quantifier blocks, drops unused bound variables, removes duplicate
// atoms, and extracts coefficient matrices.
NormalizedFormula normalize(const Formula& f);
PpFormula normalize_pp(const PpFormula& f);

const PpFormula& core_of(const Formula& f);

}  // namespace ppstar
