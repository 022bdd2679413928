#include "ppstar/types.hpp"

#include "ppstar/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

namespace ppstar {

Caps parse_caps(const std::string& text) {
  Caps caps;
  std::size_t values[3];
  std::size_t count = 0, pos = 0;
  while (count < 3) {
    std::size_t end = text.find(',', pos);
    std::string part = text.substr(pos, end == std::string::npos ? std::string::npos : end - pos);
    if (part.empty() || !std::all_of(part.begin(), part.end(), [](char c) { return c >= '0' && c <= '9'; }) ||
        part.size() > 6)
      throw Error(ErrorKind::Precondition, "caps must be three non-negative integers \"k,atoms,coeff\": " + text);
    values[count++] = std::stoul(part);
    if (end == std::string::npos) break;
    pos = end + 1;
  }
  if (count != 3 || text.find(',', pos) != std::string::npos)
    throw Error(ErrorKind::Precondition, "caps must be three non-negative integers \"k,atoms,coeff\": " + text);
  caps.k_max = values[0];
  caps.max_atoms = values[1];
  caps.max_coeff = values[2];
  if (caps.max_atoms == 0 || caps.max_coeff == 0)
    throw Error(ErrorKind::Precondition, "caps: atoms and coeff must be positive");
  return caps;
}

// ---------------------------------------------------------------------------
// Basis generation

namespace {

std::vector<std::string> variable_names(const char* stem, std::size_t count) {
  if (count == 1) return {stem};
  std::vector<std::string> out;
  for (std::size_t i = 1; i <= count; ++i) out.push_back(stem + std::to_string(i));
  return out;
}

// All vectors in [-c, c]^n in lexicographic order.
std::vector<IntVector> coefficient_vectors(std::size_t n, long c) {
  std::vector<IntVector> out;
  IntVector v(n, -c);
  if (n == 0) return {IntVector{}};
  while (true) {
    out.push_back(v);
    std::size_t i = n;
    while (i > 0 && v[i - 1] == c) v[--i] = -c;
    if (i == 0) break;
    ++v[i - 1];
  }
  return out;
}

Term make_term(const IntVector& coeffs, std::size_t free) {
  Term t;
  t.free.assign(coeffs.begin(), coeffs.begin() + static_cast<std::ptrdiff_t>(free));
  t.bound.assign(coeffs.begin() + static_cast<std::ptrdiff_t>(free), coeffs.end());
  return t;
}

// First nonzero coefficient of the atom, scanning terms in order.
int leading_sign(const std::vector<IntVector>& terms) {
  for (const auto& t : terms)
    for (const auto& x : t)
      if (x != 0) return x > 0 ? 1 : -1;
  return 0;
}

struct Candidate {
  std::vector<std::size_t> atoms;  // indices into the atom list
  Lattice subgroup;
};

struct LatticeKeyLess {
  bool operator()(const Lattice& a, const Lattice& b) const {
    if (a.rank() != b.rank()) return a.rank() < b.rank();
    for (std::size_t r = 0; r < a.rank(); ++r) {
      auto ra = a.basis().row(r), rb = b.basis().row(r);
      for (std::size_t c = 0; c < ra.size(); ++c)
        if (ra[c] != rb[c]) return ra[c] < rb[c];
    }
    return false;
  }
};

// x = h(c) for the endomorphism h whose images of the standard generators
// of Z^N are the bound variables.
PpFormula endomorphism_formula(const Structure& s, const FiniteGroup& g, std::span<const FiniteGroup::Code> c,
                               const std::vector<std::string>& free_names) {
  const std::size_t n = s.ambient_rank(), m = c.size();
  PpFormula f;
  f.free_names = free_names;
  f.bound_names = variable_names("h", n);
  f.blocks = {n};
  auto bound_term = [&](std::span<const Integer> coeffs) {
    Term t;
    t.free.assign(m, 0);
    t.bound.assign(coeffs.begin(), coeffs.end());
    return t;
  };
  const IntMatrix& rel = s.relations().basis();
  for (std::size_t r = 0; r < rel.rows(); ++r) f.atoms.push_back({kEqPredicate, {bound_term(rel.row(r))}});
  for (const auto& [name, sub] : s.subgroups()) {
    const IntMatrix& gens = sub.lattice.basis();
    for (std::size_t r = 0; r < gens.rows(); ++r) {
      auto row = gens.row(r);
      IntVector reduced = s.reduce_tuple(row);
      if (std::all_of(reduced.begin(), reduced.end(), [](const Integer& x) { return x == 0; })) continue;
      Atom atom{name, {}};
      for (std::size_t b = 0; b < sub.arity; ++b) atom.args.push_back(bound_term(row.subspan(b * n, n)));
      f.atoms.push_back(std::move(atom));
    }
  }
  for (std::size_t i = 0; i < m; ++i) {
    IntVector coeffs = g.element(c[i]);
    for (auto& x : coeffs) x = -x;
    Term t = bound_term(coeffs);
    t.free[i] = 1;
    f.atoms.push_back({kEqPredicate, {std::move(t)}});
  }
  return f;
}

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

// Endomorphism formulas for one representative per orbit of the invertible
// endomorphisms on A^arity; nullopt when a limit is exceeded.
std::optional<std::vector<PpFormula>> endomorphism_formulas(const Structure& s, std::size_t arity,
                                                            const std::vector<std::string>& free_names) {
  if (!s.is_finite() || s.ambient_rank() == 0 || *s.order() > max_orbit_order()) return std::nullopt;
  FiniteGroup g(s, max_orbit_order());
  const std::size_t size = g.order();
  std::size_t total = 1;
  for (std::size_t j = 0; j < arity; ++j) {
    total *= size;
    if (total > kSaturationTupleLimit) return std::nullopt;
  }
  auto endos = endomorphisms(g, kSaturationSearchLimit);
  if (!endos) return std::nullopt;

  UnionFind orbits(total);
  for (const auto& h : *endos) {
    if (!is_bijective(h)) continue;
    for (std::size_t t = 0; t < total; ++t) {
      std::size_t rest = t, image = 0, stride = 1;
      for (std::size_t j = 0; j < arity; ++j) {
        image += h[rest % size] * stride;
        rest /= size;
        stride *= size;
      }
      orbits.unite(t, image);
    }
  }
  std::vector<PpFormula> out;
  for (std::size_t t = 0; t < total; ++t) {
    if (orbits.find(t) != t) continue;
    std::vector<FiniteGroup::Code> c(arity);
    std::size_t rest = t;
    for (auto& x : c) {
      x = static_cast<FiniteGroup::Code>(rest % size);
      rest /= size;
    }
    out.push_back(endomorphism_formula(s, g, c, free_names));
  }
  return out;
}

}  // namespace

FormulaBasis basis_generate(const Structure& s, std::size_t arity, const Caps& caps) {
  if (caps.max_atoms == 0 || caps.max_coeff == 0) throw Error(ErrorKind::Precondition, "caps must be positive");
  const std::size_t n_amb = s.ambient_rank();
  FormulaBasis basis;
  basis.arity = arity;
  basis.caps = caps;

  // Coefficients only matter modulo the exponent of a finite A.
  long coeff = static_cast<long>(caps.max_coeff);
  if (s.is_finite()) {
    auto factors = s.invariant_factors();
    long exponent = factors.empty() ? 1 : static_cast<long>(factors.back());
    coeff = std::min(coeff, exponent / 2);
  }

  const auto free_names = variable_names("x", arity);
  std::vector<BasisFormula> out;
  for (std::size_t k = 0; k <= caps.k_max; ++k) {
    const std::size_t vars = arity + k;
    if (vars == 0) {
      basis.subgroups_per_k.push_back(0);
      continue;
    }
    const auto bound_names = variable_names("y", k);
    const Lattice whole = Lattice::full(vars * n_amb);

    // Atoms: arity-1 predicates take arbitrary linear forms, wider ones take
    // one monomial per argument.
    std::vector<Atom> atoms;
    std::vector<Lattice> atom_groups;
    std::set<Lattice, LatticeKeyLess> seen;
    const auto forms = coefficient_vectors(vars, coeff);
    std::vector<IntVector> monomials{IntVector(vars)};
    for (std::size_t v = 0; v < vars; ++v)
      for (long c = -coeff; c <= coeff; ++c)
        if (c != 0) {
          IntVector m(vars);
          m[v] = c;
          monomials.push_back(m);
        }
    std::vector<std::pair<std::string, std::size_t>> predicates{{kEqPredicate, 1}};
    for (const auto& [name, sub] : s.subgroups()) predicates.emplace_back(name, sub.arity);

    for (const auto& [name, p] : predicates) {
      const auto& choices = p == 1 ? forms : monomials;
      std::vector<std::size_t> pick(p, 0);
      while (true) {
        std::vector<IntVector> terms;
        for (std::size_t i = 0; i < p; ++i) terms.push_back(choices[pick[i]]);
        if (leading_sign(terms) > 0) {
          IntMatrix coeffs(0, vars);
          for (const auto& t : terms) coeffs.append_row(t);
          const Subgroup& pred = s.predicate(name);
          auto sol = solve(kron_identity(coeffs, n_amb), pred.lattice, IntVector(p * n_amb));
          if (sol && !(sol->group == whole) && seen.insert(sol->group).second) {
            Atom atom{name, {}};
            for (const auto& t : terms) atom.args.push_back(make_term(t, arity));
            atoms.push_back(std::move(atom));
            atom_groups.push_back(sol->group);
          }
        }
        std::size_t i = p;
        while (i > 0 && pick[i - 1] + 1 == choices.size()) pick[--i] = 0;
        if (i == 0) break;
        ++pick[i - 1];
      }
    }

    // Conjunctions, level by level, keeping only new solution subgroups.
    std::vector<Candidate> all;
    std::vector<Candidate> level;
    for (std::size_t i = 0; i < atoms.size(); ++i) level.push_back({{i}, atom_groups[i]});
    all = level;
    for (std::size_t size = 2; size <= caps.max_atoms && !level.empty(); ++size) {
      std::vector<Candidate> next;
      for (const auto& cand : level)
        for (std::size_t j = cand.atoms.back() + 1; j < atoms.size(); ++j) {
          Lattice meet = intersect(cand.subgroup, atom_groups[j]);
          if (!seen.insert(meet).second) continue;
          Candidate c{cand.atoms, meet};
          c.atoms.push_back(j);
          next.push_back(std::move(c));
        }
      all.insert(all.end(), next.begin(), next.end());
      level = std::move(next);
    }
    basis.subgroups_per_k.push_back(seen.size());

    for (const auto& cand : all) {
      PpFormula f;
      f.free_names = free_names;
      f.bound_names = bound_names;
      if (k > 0) f.blocks = {k};
      for (std::size_t i : cand.atoms) f.atoms.push_back(atoms[i]);
      // Every bound variable must occur.
      std::vector<bool> used(k, false);
      for (const auto& atom : f.atoms)
        for (const auto& t : atom.args)
          for (std::size_t v = 0; v < k; ++v) used[v] = used[v] || t.bound[v] != 0;
      if (std::find(used.begin(), used.end(), false) != used.end()) continue;
      BasisFormula bf;
      bf.text = render(f);
      bf.formula = std::move(f);
      bf.subgroup = cand.subgroup;
      out.push_back(std::move(bf));
    }
  }

  std::stable_sort(out.begin(), out.end(), [](const BasisFormula& a, const BasisFormula& b) {
    if (a.formula.bound_arity() != b.formula.bound_arity()) return a.formula.bound_arity() < b.formula.bound_arity();
    return a.text < b.text;
  });
  if (caps.saturate) {
    if (auto extra = endomorphism_formulas(s, arity, free_names)) {
      basis.saturated = true;
      basis.endomorphism_formulas = extra->size();
      for (auto& f : *extra) {
        BasisFormula bf;
        bf.text = render(f);
        bf.formula = std::move(f);
        out.push_back(std::move(bf));
      }
    }
  }
  for (auto& bf : out) {
    auto wm = std::make_shared<WitnessMap>(s, bf.formula);
    if (bf.subgroup.ambient_dim() == 0 && wm->matrix_solutions()) bf.subgroup = wm->matrix_solutions()->group;
    std::vector<TorusPoint> gens;
    const Lattice& w0 = wm->witness_group();
    for (std::size_t r = 0; r < w0.rank(); ++r) gens.push_back(s.f_tuple(w0.basis().row(r)));
    bf.image_group = closure_of(gens, bf.formula.bound_arity() * s.torus_dim());
    bf.witnesses = std::move(wm);
  }
  basis.formulas = std::move(out);
  return basis;
}

// ---------------------------------------------------------------------------
// Fingerprints

namespace {

void check_arity(const Structure& s, std::span<const Integer> tuple, const FormulaBasis& basis) {
  if (tuple.size() != basis.arity * s.ambient_rank())
    throw Error(ErrorKind::Dimension, "tuple has " + std::to_string(tuple.size()) + " coordinates, basis expects " +
                                          std::to_string(basis.arity * s.ambient_rank()));
}

std::optional<std::vector<Rational>> entry_key(const Structure& s, std::span<const Integer> tuple,
                                               const BasisFormula& bf) {
  auto y = bf.witnesses->witness(tuple);
  if (!y) return std::nullopt;
  return bf.image_group.coset_key(s.f_tuple(*y));
}

}  // namespace

Fingerprint fingerprint(const Structure& s, std::span<const Integer> tuple, const FormulaBasis& basis) {
  check_arity(s, tuple, basis);
  Fingerprint fp{s.f_tuple(tuple), {}};
  for (const auto& bf : basis.formulas) {
    auto y = bf.witnesses->witness(tuple);
    if (!y) fp.entries.emplace_back(std::nullopt);
    else fp.entries.emplace_back(TorusCoset(s.f_tuple(*y), bf.image_group));
  }
  return fp;
}

FingerprintKey fingerprint_key(const Structure& s, std::span<const Integer> tuple, const FormulaBasis& basis) {
  check_arity(s, tuple, basis);
  FingerprintKey key{s.f_tuple(tuple), {}};
  key.entries.reserve(basis.formulas.size());
  for (const auto& bf : basis.formulas) key.entries.push_back(entry_key(s, tuple, bf));
  return key;
}

TypeComparison compare_types(const Structure& s, std::span<const Integer> a, std::span<const Integer> b,
                             const FormulaBasis& basis) {
  check_arity(s, a, basis);
  check_arity(s, b, basis);
  if (s.f_tuple(a) != s.f_tuple(b)) return {false, "f-values differ"};
  for (const auto& bf : basis.formulas) {
    auto ka = entry_key(s, a, bf), kb = entry_key(s, b, bf);
    if (ka.has_value() != kb.has_value()) return {false, "only one tuple satisfies " + bf.text};
    if (ka && *ka != *kb) return {false, "torus images differ for " + bf.text};
  }
  return {true, ""};
}

bool eq_ppstar_type(const Structure& s, std::span<const Integer> a, std::span<const Integer> b,
                    const FormulaBasis& basis) {
  return compare_types(s, a, b, basis).equal;
}

// ---------------------------------------------------------------------------
// Extension

IntVector extend(const Structure& s, std::span<const Integer> a, std::span<const Integer> b,
                 std::span<const Integer> c, const FormulaBasis& basis, const FormulaBasis& extended) {
  if (!s.is_finite()) throw Error(ErrorKind::Precondition, "extend requires a finite structure");
  if (extended.arity != basis.arity + 1)
    throw Error(ErrorKind::Precondition, "extension basis must have arity one more than the tuples");
  if (c.size() != s.ambient_rank()) throw Error(ErrorKind::Dimension, "c must be a single element");
  TypeComparison cmp = compare_types(s, a, b, basis);
  if (!cmp.equal) throw Error(ErrorKind::TypeMismatch, "tuples have different pp*-types: " + cmp.witness);

  IntVector ac(a.begin(), a.end());
  ac.insert(ac.end(), c.begin(), c.end());
  const FingerprintKey target = fingerprint_key(s, ac, extended);
  const TorusPoint fc = s.f(c);

  auto matches = [&](const IntVector& d) {
    if (s.f(d) != fc) return false;
    IntVector bd(b.begin(), b.end());
    bd.insert(bd.end(), d.begin(), d.end());
    for (std::size_t i = 0; i < extended.formulas.size(); ++i)
      if (entry_key(s, bd, extended.formulas[i]) != target.entries[i]) return false;
    return true;
  };
  IntVector first = s.reduce(c);
  if (matches(first)) return first;
  for (const auto& d : finite_elements(s))
    if (d != first && matches(d)) return d;
  throw Error(ErrorKind::BasisIncomplete,
              "no extension found; the basis is too small to certify equal types (raise the caps)");
}

IntVector extend(const Structure& s, std::span<const Integer> a, std::span<const Integer> b,
                 std::span<const Integer> c, const Caps& caps) {
  const std::size_t n = s.ambient_rank();
  const std::size_t m = n == 0 ? 0 : a.size() / n;
  return extend(s, a, b, c, basis_generate(s, m, caps), basis_generate(s, m + 1, caps));
}

// ---------------------------------------------------------------------------
// Orbit oracle and the theorem harness

bool orbit_oracle(const Structure& s, std::span<const Integer> a, std::span<const Integer> b) {
  if (a.size() != b.size()) throw Error(ErrorKind::Dimension, "tuples have different lengths");
  FiniteGroup g(s, max_orbit_order());
  if (s.ambient_rank() == 0) return true;
  auto ca = g.codes(a), cb = g.codes(b);
  return find_automorphism(g, ca, cb).has_value();
}

namespace {

using Code = FiniteGroup::Code;

// Orders and f-classes of the entries: preserved by every automorphism.
std::vector<std::uint32_t> orbit_invariant(const FiniteGroup& g, std::span<const Code> t) {
  std::vector<std::uint32_t> out;
  for (Code c : t) {
    out.push_back(g.element_order(c));
    out.push_back(g.f_class(c));
  }
  return out;
}

std::vector<Code> decode(std::size_t index, std::size_t arity, std::size_t size) {
  std::vector<Code> t(arity);
  for (std::size_t j = 0; j < arity; ++j) {
    t[j] = static_cast<Code>(index % size);
    index /= size;
  }
  return t;
}

}  // namespace

TheoremReport check_theorem(const Structure& s, std::size_t arity, const Caps& caps, std::size_t trials,
                            std::uint64_t seed) {
  FiniteGroup g(s, max_orbit_order());
  TheoremReport report;
  report.structure = s.name();
  report.arity = arity;
  report.caps = caps;
  report.seed = seed;
  report.trials = trials;
  const FormulaBasis basis = basis_generate(s, arity, caps);
  const std::size_t size = g.order();

  std::size_t total = 1;
  bool small = true;
  for (std::size_t j = 0; j < arity && small; ++j) {
    total *= size;
    small = total <= kExhaustiveTupleLimit;
  }
  report.exhaustive = small;

  std::map<std::size_t, FingerprintKey> keys;
  auto key_of = [&](std::size_t index, const std::vector<Code>& t) -> const FingerprintKey& {
    auto it = keys.find(index);
    if (it == keys.end()) it = keys.emplace(index, fingerprint_key(s, g.tuple(t), basis)).first;
    return it->second;
  };

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, size - 1);
  for (std::size_t trial = 0; trial < trials; ++trial) {
    std::vector<Code> a(arity), b(arity);
    for (auto& c : a) c = static_cast<Code>(pick(rng));
    for (auto& c : b) c = static_cast<Code>(pick(rng));
    // Every other trial looks for a b sharing the cheap invariants of a.
    if (trial % 2 == 1)
      for (int attempt = 0; attempt < 64 && orbit_invariant(g, a) != orbit_invariant(g, b); ++attempt)
        for (auto& c : b) c = static_cast<Code>(pick(rng));
    const bool fp = key_of(g.tuple_index(a), a) == key_of(g.tuple_index(b), b);
    const bool orbit = find_automorphism(g, a, b).has_value();
    ++report.pairs_checked;
    if (fp != orbit) report.mismatches.push_back({g.tuple(a), g.tuple(b), fp, orbit});
  }

  if (small) {
    // Fingerprint classes.
    std::vector<std::size_t> fp_class(total);
    std::map<FingerprintKey, std::size_t> class_ids;
    std::vector<std::vector<Code>> tuples(total);
    for (std::size_t i = 0; i < total; ++i) {
      tuples[i] = decode(i, arity, size);
      auto [it, fresh] = class_ids.emplace(key_of(i, tuples[i]), class_ids.size());
      fp_class[i] = it->second;
    }
    // Orbits, found by the oracle against one representative per orbit; only
    // tuples with equal cheap invariants can share an orbit.
    std::vector<std::size_t> orbit(total);
    std::map<std::vector<std::uint32_t>, std::vector<std::size_t>> reps;
    for (std::size_t i = 0; i < total; ++i) {
      auto& bucket = reps[orbit_invariant(g, tuples[i])];
      std::vector<std::size_t> order;
      for (std::size_t r : bucket)
        if (fp_class[r] == fp_class[i]) order.push_back(r);
      for (std::size_t r : bucket)
        if (fp_class[r] != fp_class[i]) order.push_back(r);
      bool found = false;
      for (std::size_t r : order)
        if (find_automorphism(g, tuples[r], tuples[i])) {
          orbit[i] = orbit[r];
          found = true;
          break;
        }
      if (!found) {
        orbit[i] = i;
        bucket.push_back(i);
      }
    }
    std::map<std::size_t, std::size_t> first_of_class;
    std::set<std::pair<std::size_t, std::size_t>> reported;
    for (std::size_t i = 0; i < total; ++i) {
      const std::size_t rep = orbit[i];
      if (fp_class[i] != fp_class[rep]) report.mismatches.push_back({g.tuple(tuples[rep]), g.tuple(tuples[i]), false, true});
      auto [it, fresh] = first_of_class.emplace(fp_class[i], i);
      const std::size_t head = it->second;
      if (orbit[head] != orbit[i] && reported.insert({fp_class[i], orbit[i]}).second)
        report.mismatches.push_back({g.tuple(tuples[head]), g.tuple(tuples[i]), true, false});
    }
    report.pairs_checked += static_cast<std::uint64_t>(total) * (total - 1) / 2;
  }

  bool unsound = false;
  for (const auto& m : report.mismatches) unsound = unsound || (m.orbit_equal && !m.fingerprint_equal);
  if (unsound) {
    report.verdict = "FAIL";
  } else if (!report.mismatches.empty()) {
    report.verdict = "BASIS_INCOMPLETE";
    std::ostringstream hint;
    hint << "raise the caps, e.g. --caps " << caps.k_max + 1 << "," << caps.max_atoms + 1 << "," << caps.max_coeff;
    report.suggestion = hint.str();
  } else {
    report.verdict = "PASS";
  }
  return report;
}

std::string report_to_json(const TheoremReport& r) {
  using nlohmann::ordered_json;
  auto ints = [](const IntVector& v) {
    ordered_json a = ordered_json::array();
    for (const auto& x : v) a.push_back(to_int64(x));
    return a;
  };
  ordered_json j;
  j["structure"] = r.structure;
  j["arity"] = r.arity;
  j["caps"] = {{"k_max", r.caps.k_max}, {"max_atoms", r.caps.max_atoms}, {"max_coeff", r.caps.max_coeff}, {"saturate", r.caps.saturate}};
  j["seed"] = r.seed;
  j["trials"] = r.trials;
  j["exhaustive"] = r.exhaustive;
  j["pairs_checked"] = r.pairs_checked;
  j["mismatches"] = ordered_json::array();
  for (const auto& m : r.mismatches)
    j["mismatches"].push_back({{"a", ints(m.a)},
                               {"b", ints(m.b)},
                               {"fingerprint_equal", m.fingerprint_equal},
                               {"orbit_equal", m.orbit_equal}});
  j["verdict"] = r.verdict;
  if (!r.suggestion.empty()) j["suggestion"] = r.suggestion;
  return j.dump(2);
}

}  // namespace ppstar
