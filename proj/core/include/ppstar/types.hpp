#pragma once

// pp*-types: a finite basis of pp formulas, fingerprints over it, type
// equality, one-step back-and-forth extension, and the automorphism-orbit
// oracle used to cross-check type equality on finite structures.

#include "ppstar/finite.hpp"
#include "ppstar/formula.hpp"
#include "ppstar/solver.hpp"
#include "ppstar/structure.hpp"
#include "ppstar/torus.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ppstar {

// Enumeration bounds: bound variables, atoms per conjunction, |coefficient|.
// With `saturate`, bases over small finite structures are completed by one
// endomorphism formula per class of tuples (see basis_generate).
struct Caps {
  std::size_t k_max = 1;
  std::size_t max_atoms = 2;
  std::size_t max_coeff = 2;
  bool saturate = true;
  friend bool operator==(const Caps&, const Caps&) = default;
};

// "k,atoms,coeff"; throws Precondition on malformed text.
Caps parse_caps(const std::string& text);

// A basis formula with its solution subgroup and the data needed to read
// off fingerprint entries quickly.
struct BasisFormula {
  PpFormula formula;
  std::string text;
  Lattice subgroup;  // solutions of the matrix, inside Z^((m+k)*N)
  std::shared_ptr<const WitnessMap> witnesses;
  ClosedTorusSubgroup image_group{Lattice()};  // closure of f over the witness group
};

struct FormulaBasis {
  std::size_t arity = 0;
  Caps caps;
  std::vector<BasisFormula> formulas;
  // Number of distinct solution subgroups found for each bound-variable count.
  std::vector<std::size_t> subgroups_per_k;
  // Whether the endomorphism formulas were added, and how many.
  bool saturated = false;
  std::size_t endomorphism_formulas = 0;
};

inline constexpr std::uint64_t kSaturationSearchLimit = 1u << 20;
inline constexpr std::size_t kSaturationTupleLimit = 1u << 16;

// Enumerated formulas within the caps, then, if caps.saturate and s is finite
// with |A| <= max_orbit_order(), |A|^arity <= kSaturationTupleLimit and an
// endomorphism search within kSaturationSearchLimit, for representatives c of
// the orbits of invertible endomorphisms on A^arity the formula
//   E h. "h codes an endomorphism preserving the subgroups" & x = h(c)
// whose witnesses are the images h of the standard generators of Z^N. Over
// such a basis equal fingerprints mean mutual reachability by endomorphisms
// commuting with f, i.e. equal pp*-types.
FormulaBasis basis_generate(const Structure& s, std::size_t arity, const Caps& caps);

struct Fingerprint {
  TorusPoint f_values;
  std::vector<std::optional<TorusCoset>> entries;  // nullopt is bottom
  friend bool operator==(const Fingerprint&, const Fingerprint&) = default;
};

Fingerprint fingerprint(const Structure& s, std::span<const Integer> tuple, const FormulaBasis& basis);

// Compact equivalent of a fingerprint: per formula the coset key of the
// torus image (annihilator values), or nullopt for bottom.
struct FingerprintKey {
  TorusPoint f_values;
  std::vector<std::optional<std::vector<Rational>>> entries;
  friend bool operator==(const FingerprintKey&, const FingerprintKey&) = default;
  friend bool operator<(const FingerprintKey& a, const FingerprintKey& b) {
    if (a.f_values == b.f_values) return a.entries < b.entries;
    return a.f_values < b.f_values;
  }
};

FingerprintKey fingerprint_key(const Structure& s, std::span<const Integer> tuple, const FormulaBasis& basis);

struct TypeComparison {
  bool equal = true;
  std::string witness;  // empty when equal
};

TypeComparison compare_types(const Structure& s, std::span<const Integer> a, std::span<const Integer> b,
                             const FormulaBasis& basis);
bool eq_ppstar_type(const Structure& s, std::span<const Integer> a, std::span<const Integer> b,
                    const FormulaBasis& basis);

// d with (a, c) and (b, d) of equal type over `extended` (a basis of arity m+1).
// Throws TypeMismatch if a and b differ over `basis`, BasisIncomplete if no d exists.
IntVector extend(const Structure& s, std::span<const Integer> a, std::span<const Integer> b,
                 std::span<const Integer> c, const FormulaBasis& basis, const FormulaBasis& extended);
IntVector extend(const Structure& s, std::span<const Integer> a, std::span<const Integer> b,
                 std::span<const Integer> c, const Caps& caps);

// True iff an automorphism of (A, subgroups, f) maps a onto b.
// Throws SizeLimit when |A| exceeds max_orbit_order().
bool orbit_oracle(const Structure& s, std::span<const Integer> a, std::span<const Integer> b);

struct TheoremMismatch {
  IntVector a, b;
  bool fingerprint_equal = false;
  bool orbit_equal = false;
};

struct TheoremReport {
  std::string structure;
  std::size_t arity = 0;
  Caps caps;
  std::uint64_t seed = 0;
  std::size_t trials = 0;
  bool exhaustive = false;
  std::uint64_t pairs_checked = 0;
  std::vector<TheoremMismatch> mismatches;
  std::string verdict;  // PASS, FAIL or BASIS_INCOMPLETE
  std::string suggestion;
};

inline constexpr std::size_t kExhaustiveTupleLimit = 4096;

// Compares type equality with the orbit oracle on `trials` random pairs and,
// when |A|^arity <= 4096, on every pair.
TheoremReport check_theorem(const Structure& s, std::size_t arity, const Caps& caps, std::size_t trials,
                            std::uint64_t seed);
std::string report_to_json(const TheoremReport& r);

}  // namespace ppstar
