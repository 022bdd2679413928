#include "ppstar/structure.hpp"

#include "ppstar/error.hpp"

#include <algorithm>
#include <cctype>

namespace ppstar {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Dimension: return "DIMENSION";
    case ErrorKind::Precondition: return "PRECONDITION";
    case ErrorKind::Parse: return "PARSE";
    case ErrorKind::Schema: return "SCHEMA";
    case ErrorKind::TypeMismatch: return "TYPE_MISMATCH";
    case ErrorKind::BasisIncomplete: return "BASIS_INCOMPLETE";
    case ErrorKind::SizeLimit: return "SIZE_LIMIT";
  }
  return "UNKNOWN";
}

// ---------------------------------------------------------------------------
// Character

Character::Character(std::size_t ambient_rank, std::vector<std::vector<Rational>> rows)
    : ambient_rank_(ambient_rank), rows_(std::move(rows)), numerators_(rows_.size(), ambient_rank) {
  for (const auto& row : rows_)
    for (const auto& q : row) denominator_ = lcm(denominator_, boost::multiprecision::denominator(q));
  for (std::size_t i = 0; i < rows_.size(); ++i)
    for (std::size_t j = 0; j < ambient_rank; ++j)
      numerators_(i, j) = boost::multiprecision::numerator(rows_[i][j]) * (denominator_ / boost::multiprecision::denominator(rows_[i][j]));
}

std::vector<Rational> Character::apply_exact(std::span<const Integer> v) const {
  if (v.size() != ambient_rank_) throw Error(ErrorKind::Dimension, "character: element dimension mismatch");
  IntVector num = ppstar::apply(numerators_, v);
  std::vector<Rational> out;
  out.reserve(num.size());
  for (auto& x : num) out.emplace_back(x, denominator_);
  return out;
}

TorusPoint Character::apply(std::span<const Integer> v) const { return TorusPoint(apply_exact(v)); }

TorusPoint Character::apply_tuple(std::span<const Integer> tuple) const {
  if (ambient_rank_ == 0 || tuple.size() % ambient_rank_ != 0) {
    if (ambient_rank_ == 0 && tuple.empty()) return TorusPoint();
    throw Error(ErrorKind::Dimension, "character: tuple length is not a multiple of the ambient rank");
  }
  std::vector<Rational> coords;
  for (std::size_t b = 0; b < tuple.size() / ambient_rank_; ++b) {
    auto part = apply_exact(tuple.subspan(b * ambient_rank_, ambient_rank_));
    coords.insert(coords.end(), part.begin(), part.end());
  }
  return TorusPoint(std::move(coords));
}

bool Character::is_trivial() const {
  for (const auto& row : rows_)
    for (const auto& q : row)
      if (frac(q) != 0) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Structure

namespace {

bool is_identifier(const std::string& s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  return std::all_of(s.begin(), s.end(),
                     [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

std::string render_row(const IntVector& row) {
  std::string s = "(";
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) s += ", ";
    s += row[i].str();
  }
  return s + ")";
}

std::string render_values(const std::vector<Rational>& v) {
  std::string s = v.size() == 1 ? "" : "(";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    const Rational& q = v[i];
    s += denominator(q) == 1 ? numerator(q).str() : to_string(q);
  }
  return v.size() == 1 ? s : s + ")";
}

}  // namespace

Structure Structure::build(const StructureSpec& spec) {
  Structure s;
  s.spec_ = spec;
  s.name_ = spec.name;
  s.ambient_rank_ = spec.ambient_rank;
  const std::size_t n = spec.ambient_rank;

  for (std::size_t r = 0; r < spec.relations.size(); ++r)
    if (spec.relations[r].size() != n)
      throw SchemaError("/relations/" + std::to_string(r),
                        "relation has " + std::to_string(spec.relations[r].size()) + " entries, expected " +
                            std::to_string(n));
  s.relations_ = hnf(IntMatrix::from_rows(spec.relations, n));
  s.equality_ = Subgroup{1, s.relations_};

  for (const auto& [name, sub] : spec.subgroups) {
    const std::string path = "/subgroups/" + name;
    if (!is_identifier(name) || name == "E" || name == "f" || name == kEqPredicate)
      throw SchemaError(path, "invalid or reserved subgroup name '" + name + "'");
    if (sub.arity == 0) throw SchemaError(path + "/arity", "arity must be positive");
    IntMatrix gens = s.relations_power(sub.arity).basis();
    for (std::size_t g = 0; g < sub.generators.size(); ++g) {
      if (sub.generators[g].size() != sub.arity * n)
        throw SchemaError(path + "/generators/" + std::to_string(g),
                          "generator has " + std::to_string(sub.generators[g].size()) + " entries, expected " +
                              std::to_string(sub.arity * n) + " (arity * ambient_rank)");
      gens.append_row(sub.generators[g]);
    }
    s.subgroups_.emplace(name, Subgroup{sub.arity, hnf(gens)});
  }

  if (spec.character.size() != spec.torus_dim)
    throw SchemaError("/character/matrix", "matrix has " + std::to_string(spec.character.size()) +
                                               " rows, expected torus_dim = " + std::to_string(spec.torus_dim));
  for (std::size_t r = 0; r < spec.character.size(); ++r)
    if (spec.character[r].size() != n)
      throw SchemaError("/character/matrix/" + std::to_string(r),
                        "row has " + std::to_string(spec.character[r].size()) + " entries, expected " +
                            std::to_string(n));
  s.character_ = Character(n, spec.character);
  // f must vanish on every relation for it to be well defined on A.
  for (std::size_t r = 0; r < spec.relations.size(); ++r) {
    auto value = s.character_.apply_exact(spec.relations[r]);
    for (const auto& q : value)
      if (denominator(q) != 1)
        throw SchemaError("/character/matrix", "character is not a homomorphism on A: F*" +
                                                   render_row(spec.relations[r]) + " = " + render_values(value) +
                                                   " is not integral");
  }

  for (const auto& [name, value] : spec.parameters) {
    const std::string path = "/parameters/" + name;
    if (!is_identifier(name) || name == "E" || name == "f")
      throw SchemaError(path, "invalid or reserved parameter name '" + name + "'");
    if (name == kEqPredicate || spec.subgroups.count(name))
      throw SchemaError(path, "parameter name collides with a predicate");
    if (value.size() != n)
      throw SchemaError(path, "parameter has " + std::to_string(value.size()) + " entries, expected " +
                                  std::to_string(n));
    s.parameters_.emplace(name, s.relations_.reduce(value));
  }
  return s;
}

const Subgroup& Structure::predicate(const std::string& name) const {
  if (name == kEqPredicate) return equality_;
  auto it = subgroups_.find(name);
  if (it == subgroups_.end()) throw Error(ErrorKind::Precondition, "unknown predicate: " + name);
  return it->second;
}

Lattice Structure::relations_power(std::size_t copies) const {
  return hnf(block_diagonal(relations_.basis(), copies));
}

Signature Structure::signature(std::vector<std::string> free_vars) const {
  Signature sig;
  for (const auto& [name, sub] : subgroups_) sig.predicates[name] = sub.arity;
  sig.free_vars = std::move(free_vars);
  for (const auto& [name, value] : parameters_) sig.params.push_back(name);
  if (parameters_.count(kUnitParameter)) sig.unit_param = kUnitParameter;
  sig.torus_dim = torus_dim();
  return sig;
}

IntVector Structure::reduce(std::span<const Integer> element) const { return relations_.reduce(element); }

IntVector Structure::reduce_tuple(std::span<const Integer> tuple) const {
  if (ambient_rank_ == 0) return {};
  if (tuple.size() % ambient_rank_ != 0)
    throw Error(ErrorKind::Dimension, "tuple length is not a multiple of the ambient rank");
  IntVector out;
  for (std::size_t b = 0; b < tuple.size() / ambient_rank_; ++b) {
    auto part = relations_.reduce(tuple.subspan(b * ambient_rank_, ambient_rank_));
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

std::vector<Integer> Structure::invariant_factors() const {
  SmithForm sf = snf(relations_.basis());
  std::vector<Integer> out;
  for (std::size_t i = 0; i < std::min(sf.d.rows(), sf.d.cols()); ++i)
    if (sf.d(i, i) > 1) out.push_back(sf.d(i, i));
  return out;
}

std::optional<Integer> Structure::order() const {
  if (!is_finite()) return std::nullopt;
  return index_of(relations_, Lattice::full(ambient_rank_)).value();
}

}  // namespace ppstar
