#include "criteria.hpp"

#include "oracles.hpp"
#include "random_structures.hpp"

#include "ppstar/error.hpp"
#include "ppstar/finite.hpp"
#include "ppstar/solver.hpp"
#include "ppstar/types.hpp"

#include <array>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <set>
#include <sstream>

#include <sys/wait.h>

namespace ppstar::acceptance {

using testing::BruteModel;
using testing::RandomFormulaOptions;
using testing::RandomStructureOptions;

namespace {

long draw(std::mt19937_64& rng, long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng); }

std::vector<std::string> names(const std::string& stem, std::size_t count) {
  if (count == 1) return {stem};
  std::vector<std::string> out;
  for (std::size_t i = 1; i <= count; ++i) out.push_back(stem + std::to_string(i));
  return out;
}

std::size_t power(std::size_t base, std::size_t exp) {
  std::size_t r = 1;
  while (exp--) r *= base;
  return r;
}

PpStarFormula as_ppstar(const Formula& f) {
  if (const auto* star = std::get_if<PpStarFormula>(&f)) return *star;
  return PpStarFormula{std::get<PpFormula>(f), {}};
}

BruteModel::Tuple concat(BruteModel::Tuple a, const BruteModel::Tuple& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

std::string note(const char* fmt, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

// A random finite structure together with its brute-force model.
struct Instance {
  StructureSpec spec;
  Structure s;
  BruteModel model;
  explicit Instance(StructureSpec sp) : spec(sp), s(Structure::build(sp)), model(sp) {}
};

Instance random_instance(std::mt19937_64& rng, const RandomStructureOptions& opts, const std::string& name) {
  return Instance(testing::random_finite_spec(rng, opts, name));
}

}  // namespace

// ---------------------------------------------------------------------------
// 1. Type equality against the automorphism-orbit oracle

Outcome theorem_cross_validation(std::uint64_t seed, std::size_t structures) {
  Outcome out;
  out.required = structures;
  std::mt19937_64 rng(seed);
  const auto start = std::chrono::steady_clock::now();
  std::uint64_t pairs = 0;
  std::size_t incomplete = 0;
  for (std::size_t i = 0; i < structures; ++i) {
    Structure s = testing::random_finite_structure(rng, {}, "s" + std::to_string(i));
    bool ok = true;
    for (std::size_t arity : {1, 2}) {
      TheoremReport r = check_theorem(s, arity, Caps{}, 100, seed + i);
      pairs += r.pairs_checked;
      if (r.verdict == "BASIS_INCOMPLETE") ++incomplete;
      if (!r.mismatches.empty()) ok = false;
    }
    ++out.cases;
    if (!ok) ++out.violations;
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  out.detail = note("%zu structures, arities 1 and 2, %llu pairs, %zu incomplete bases, %.1f s", out.cases,
                    static_cast<unsigned long long>(pairs), incomplete, seconds);
  if (seconds > 300) {
    ++out.violations;
    out.detail += " (over the 5 minute budget)";
  }
  return out;
}

// ---------------------------------------------------------------------------
// 2. Coverage decisions against enumeration

namespace {

// Residue classes x_1 = j mod k as formula texts, j = 0..k-1.
std::vector<std::string> residue_classes(long k, const std::string& var, const std::string& unit) {
  std::vector<std::string> out;
  for (long j = 0; j < k; ++j)
    out.push_back("E z. Eq(" + var + " - " + std::to_string(k) + "*z" + (j ? " - " + std::to_string(j) + "*" + unit : "") + ")");
  return out;
}

// 1-4 covering formulas; half of the time a family of residue classes,
// possibly with a gap, mixed with random formulas.
std::vector<std::string> cover_texts(std::mt19937_64& rng, const Structure& s, const std::vector<std::string>& free,
                                     const std::string& unit) {
  RandomFormulaOptions fo;
  fo.parameters = true;
  fo.max_bound = free.size() == 1 ? 2 : 1;
  std::vector<std::string> out;
  if (draw(rng, 0, 1)) {
    out = residue_classes(draw(rng, 2, 3), free[0], unit);
    if (draw(rng, 0, 2) == 0) out.erase(out.begin() + draw(rng, 0, static_cast<long>(out.size()) - 1));
  }
  const long extra = draw(rng, out.empty() ? 1 : 0, 4 - static_cast<long>(out.size()));
  for (long i = 0; i < extra; ++i) out.push_back(testing::random_formula_text(rng, s, free, fo));
  return out;
}

StructureSpec random_infinite_spec(std::mt19937_64& rng, const std::string& name) {
  StructureSpec spec;
  spec.name = name;
  spec.ambient_rank = static_cast<std::size_t>(draw(rng, 1, 2));
  if (spec.ambient_rank == 2 && draw(rng, 0, 1)) {
    IntVector rel{Integer(draw(rng, 0, 3)), Integer(draw(rng, 1, 4))};
    spec.relations.push_back(rel);
  }
  if (draw(rng, 0, 1)) {
    StructureSpec::SubgroupSpec p;
    for (long g = draw(rng, 1, 2); g > 0; --g) {
      IntVector v;
      for (std::size_t j = 0; j < spec.ambient_rank; ++j) v.emplace_back(draw(rng, -4, 4));
      p.generators.push_back(v);
    }
    spec.subgroups.emplace("P", p);
  }
  IntVector one(spec.ambient_rank), a(spec.ambient_rank);
  one[0] = 1;
  for (auto& x : a) x = draw(rng, -3, 3);
  spec.parameters.emplace(kUnitParameter, one);
  spec.parameters.emplace("a", a);
  return spec;
}

}  // namespace

Outcome coverage(std::uint64_t seed, std::size_t finite_instances, std::size_t infinite_instances) {
  Outcome out;
  out.required = finite_instances + infinite_instances;
  std::mt19937_64 rng(seed);
  RandomStructureOptions so;
  so.max_order = 64;
  std::size_t covered_finite = 0;
  for (std::size_t i = 0; i < finite_instances;) {
    Instance in = random_instance(rng, so, "c" + std::to_string(i));
    const std::size_t order = in.model.elements().size();
    const std::size_t m = order <= 16 && draw(rng, 0, 1) ? 2 : 1;
    const auto free = names("x", m);
    const Signature sig = in.s.signature(free);
    RandomFormulaOptions fo;
    fo.parameters = true;
    fo.max_bound = m == 1 ? 2 : 1;
    const PpFormula target = parse_pp(testing::random_formula_text(rng, in.s, free, fo), sig);
    const DefinableCoset x = eval_pp(in.s, target);
    if (x.is_empty()) continue;
    std::vector<PpFormula> covers;
    std::vector<DefinableCoset> cosets;
    for (const auto& text : cover_texts(rng, in.s, free, kUnitParameter)) {
      covers.push_back(parse_pp(text, sig));
      cosets.push_back(eval_pp(in.s, covers.back()));
    }
    bool truth = true;
    for (const auto& t : in.model.tuples(m)) {
      if (!in.model.satisfies_pp(target, t)) continue;
      bool hit = false;
      for (const auto& c : covers) hit = hit || in.model.satisfies_pp(c, t);
      if (!hit) {
        truth = false;
        break;
      }
    }
    const bool claimed = cover_decide(x, cosets);
    covered_finite += truth;
    ++out.cases;
    ++i;
    if (claimed != truth) ++out.violations;
  }

  std::size_t covered_infinite = 0, filter_changes = 0;
  for (std::size_t i = 0; i < infinite_instances;) {
    Structure s = Structure::build(random_infinite_spec(rng, "inf" + std::to_string(i)));
    const std::vector<std::string> free{"x"};
    const Signature sig = s.signature(free);
    RandomFormulaOptions fo;
    fo.parameters = true;
    fo.max_bound = 2;
    const DefinableCoset x = eval_pp(s, parse_pp(testing::random_formula_text(rng, s, free, fo), sig));
    if (x.is_empty()) continue;
    std::vector<DefinableCoset> cosets;
    for (const auto& text : cover_texts(rng, s, free, draw(rng, 0, 1) ? kUnitParameter : "a"))
      cosets.push_back(eval_pp(s, parse_pp(text, sig)));
    const bool claimed = cover_decide(x, cosets);
    ++i;
    ++out.cases;
    bool bad = false;

    std::vector<DefinableCoset> finite_index;
    for (const auto& c : cosets)
      if (!c.is_empty() && !index_of(intersect(x.group(), c.group()), x.group()).is_infinite())
        finite_index.push_back(c);
    if (cover_decide(x, finite_index) != claimed) {
      ++filter_changes;
      bad = true;
    }
    if (claimed) {
      ++covered_infinite;
      testing::for_each_in_box(s.ambient_rank(), 50, [&](const IntVector& v) {
        if (bad || !x.contains(v)) return;
        bool hit = false;
        for (const auto& c : cosets) hit = hit || (!c.is_empty() && c.contains(v));
        if (!hit) bad = true;
      });
    }
    if (bad) ++out.violations;
  }
  out.detail = note("%zu finite (%zu covered), %zu infinite (%zu covered, %zu changed by removing infinite-index cosets)",
                    finite_instances, covered_finite, infinite_instances, covered_infinite, filter_changes);
  return out;
}

// ---------------------------------------------------------------------------
// 3. Solution sets of one pp* formula at two parameter tuples are equal or disjoint

Outcome coset_dichotomy(std::uint64_t seed, std::size_t pairs) {
  Outcome out;
  out.required = pairs;
  std::mt19937_64 rng(seed);
  RandomStructureOptions so;
  so.max_order = 16;
  std::size_t intersecting = 0, distinct = 0;
  while (out.cases < pairs) {
    Instance in = random_instance(rng, so, "d");
    const std::size_t order = in.model.elements().size();
    const std::size_t m = order <= 8 && draw(rng, 0, 1) ? 2 : 1;
    const std::size_t p = static_cast<std::size_t>(draw(rng, 1, 2));
    auto free = names("x", m);
    const auto params = names("b", p);
    free.insert(free.end(), params.begin(), params.end());
    RandomFormulaOptions fo;
    fo.f_constraints = true;
    fo.parameters = true;
    fo.max_bound = 2;
    const PpStarFormula psi = as_ppstar(parse(testing::random_formula_text(rng, in.s, free, fo), in.s.signature(free)));
    const auto xs = in.model.tuples(m);
    const auto bs = in.model.tuples(p);
    auto solutions = [&](const BruteModel::Tuple& b) {
      std::set<BruteModel::Tuple> set;
      for (const auto& x : xs)
        if (satisfies_ppstar(in.s, psi, in.model.flatten(concat(x, b)))) set.insert(x);
      return set;
    };
    // Ten parameter pairs per formula; the second often shifts the first.
    for (int k = 0; k < 10 && out.cases < pairs; ++k) {
      const auto& b = bs[static_cast<std::size_t>(draw(rng, 0, static_cast<long>(bs.size()) - 1))];
      const auto& b2 = bs[static_cast<std::size_t>(draw(rng, 0, static_cast<long>(bs.size()) - 1))];
      const auto sa = solutions(b), sb = solutions(b2);
      ++out.cases;
      bool meet = false;
      for (const auto& x : sa) meet = meet || sb.count(x);
      if (meet) {
        ++intersecting;
        if (b != b2) ++distinct;
        if (sa != sb) ++out.violations;
      }
    }
  }
  out.detail = note("%zu pairs, %zu intersecting (%zu with different parameters)", out.cases, intersecting, distinct);
  return out;
}

// ---------------------------------------------------------------------------
// 4. Back-and-forth extension for every c

Outcome constructive_extension(std::uint64_t seed, std::size_t cases) {
  Outcome out;
  out.required = cases;
  std::mt19937_64 rng(seed);
  RandomStructureOptions so;
  so.max_order = 24;
  std::size_t nontrivial = 0, incomplete = 0, extensions = 0;
  while (out.cases < cases) {
    Instance in = random_instance(rng, so, "e");
    const Caps caps;
    const FormulaBasis basis = basis_generate(in.s, 1, caps);
    const FormulaBasis extended = basis_generate(in.s, 2, caps);
    const auto& elems = in.model.elements();
    for (int k = 0; k < 5 && out.cases < cases; ++k) {
      const IntVector a = in.model.flatten({elems[static_cast<std::size_t>(draw(rng, 0, static_cast<long>(elems.size()) - 1))]});
      // A b of the same type as a, found by sampling; a itself if none turns up.
      IntVector b = a;
      for (int t = 0; t < 16; ++t) {
        IntVector cand = in.model.flatten({elems[static_cast<std::size_t>(draw(rng, 0, static_cast<long>(elems.size()) - 1))]});
        if (cand != a && eq_ppstar_type(in.s, a, cand, basis)) {
          b = cand;
          break;
        }
      }
      if (!eq_ppstar_type(in.s, a, b, basis)) continue;
      if (a != b) ++nontrivial;
      ++out.cases;
      bool bad = false;
      for (const auto& e : elems) {
        const IntVector c = in.model.flatten({e});
        try {
          IntVector d = extend(in.s, a, b, c, basis, extended);
          IntVector ac = a, bd = b;
          ac.insert(ac.end(), c.begin(), c.end());
          bd.insert(bd.end(), d.begin(), d.end());
          ++extensions;
          if (!eq_ppstar_type(in.s, ac, bd, extended)) bad = true;
        } catch (const Error& err) {
          if (err.kind() != ErrorKind::BasisIncomplete) throw;
          ++incomplete;
          bad = true;
        }
      }
      if (bad) ++out.violations;
    }
  }
  out.detail = note("%zu (a, b) pairs (%zu with a != b), %zu verified extensions, %zu BASIS_INCOMPLETE", out.cases,
                    nontrivial, extensions, incomplete);
  return out;
}

// ---------------------------------------------------------------------------
// 5. One-sided containments of basis data imply equal fingerprints

namespace {

// For each basis formula: bottom, or the set of f-values of its witnesses at t.
using WitnessValues = std::vector<std::optional<std::set<std::vector<Rational>>>>;

WitnessValues witness_values(const BruteModel& model, const FormulaBasis& basis, const BruteModel::Tuple& t) {
  WitnessValues out;
  for (const auto& bf : basis.formulas) {
    std::set<std::vector<Rational>> values;
    bool any = false;
    for (const auto& y : model.tuples(bf.formula.bound_arity()))
      if (model.satisfies_matrix(bf.formula, t, y)) {
        any = true;
        std::vector<Rational> v;
        for (const auto& e : y) {
          auto fe = model.f(e);
          v.insert(v.end(), fe.begin(), fe.end());
        }
        values.insert(v);
      }
    out.push_back(any ? std::optional(values) : std::nullopt);
  }
  return out;
}

// Every pp* formula over the basis true of a is true of b, and every negated
// basis formula true of a is true of b.
bool contained(const WitnessValues& a, const WitnessValues& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].has_value() != b[i].has_value()) return false;
    if (a[i] && !std::includes(b[i]->begin(), b[i]->end(), a[i]->begin(), a[i]->end())) return false;
  }
  return true;
}

}  // namespace

Outcome containment_implies_equality(std::uint64_t seed, std::size_t pairs) {
  Outcome out;
  out.required = pairs;
  std::mt19937_64 rng(seed);
  RandomStructureOptions so;
  so.max_order = 16;
  std::size_t premise = 0;
  while (out.cases < pairs) {
    Instance in = random_instance(rng, so, "l");
    const std::size_t m = in.model.elements().size() <= 8 && draw(rng, 0, 1) ? 2 : 1;
    const FormulaBasis basis = basis_generate(in.s, m, Caps{});
    const auto tuples = in.model.tuples(m);
    std::map<BruteModel::Tuple, WitnessValues> cache;
    auto values = [&](const BruteModel::Tuple& t) -> const WitnessValues& {
      auto it = cache.find(t);
      if (it == cache.end()) it = cache.emplace(t, witness_values(in.model, basis, t)).first;
      return it->second;
    };
    for (int k = 0; k < 10 && out.cases < pairs; ++k) {
      const auto& a = tuples[static_cast<std::size_t>(draw(rng, 0, static_cast<long>(tuples.size()) - 1))];
      // Prefer a partner with the same f-values so that the premise is often met.
      BruteModel::Tuple b = tuples[static_cast<std::size_t>(draw(rng, 0, static_cast<long>(tuples.size()) - 1))];
      for (int t = 0; t < 32 && k % 2 == 0; ++t) {
        const auto& cand = tuples[static_cast<std::size_t>(draw(rng, 0, static_cast<long>(tuples.size()) - 1))];
        if (in.s.f_tuple(in.model.flatten(cand)) == in.s.f_tuple(in.model.flatten(a)) &&
            contained(values(a), values(cand))) {
          b = cand;
          break;
        }
      }
      ++out.cases;
      const bool same_f = in.s.f_tuple(in.model.flatten(a)) == in.s.f_tuple(in.model.flatten(b));
      if (!same_f || !contained(values(a), values(b))) continue;
      ++premise;
      if (fingerprint(in.s, in.model.flatten(a), basis) != fingerprint(in.s, in.model.flatten(b), basis))
        ++out.violations;
    }
  }
  out.detail = note("%zu pairs, %zu satisfying both containments", out.cases, premise);
  return out;
}

// ---------------------------------------------------------------------------
// 6. eval_pp, satisfies_ppstar and kernel_and_fiber against enumeration

Outcome solver_matches_enumeration(std::uint64_t seed, std::size_t cases) {
  Outcome out;
  out.required = 3 * cases;
  std::mt19937_64 rng(seed);
  RandomStructureOptions so;
  so.max_order = 64;
  std::array<std::size_t, 3> bad{};
  std::size_t nonempty = 0, satisfied = 0, fibers = 0;
  for (std::size_t i = 0; i < cases; ++i) {
    Instance in = random_instance(rng, so, "v");
    const std::size_t order = in.model.elements().size();
    const std::size_t m = order <= 16 && draw(rng, 0, 1) ? 2 : 1;
    const auto free = names("x", m);
    const Signature sig = in.s.signature(free);
    RandomFormulaOptions fo;
    fo.parameters = true;
    fo.max_bound = 0;
    while (fo.max_bound < 3 && power(order, m + fo.max_bound + 1) <= (1u << 18)) ++fo.max_bound;

    const PpFormula phi = parse_pp(testing::random_formula_text(rng, in.s, free, fo), sig);
    const DefinableCoset c = eval_pp(in.s, phi);
    bool ok = true;
    bool any = false;
    for (const auto& t : in.model.tuples(m)) {
      const bool truth = in.model.satisfies_pp(phi, t);
      any = any || truth;
      if (truth != (!c.is_empty() && c.contains(in.model.flatten(t)))) ok = false;
    }
    nonempty += any;
    if (!ok) ++bad[0];

    fo.f_constraints = true;
    const PpStarFormula psi = as_ppstar(parse(testing::random_formula_text(rng, in.s, free, fo), sig));
    const auto tuples = in.model.tuples(m);
    for (int k = 0; k < 4; ++k) {
      const auto& t = tuples[static_cast<std::size_t>(draw(rng, 0, static_cast<long>(tuples.size()) - 1))];
      const bool truth = in.model.satisfies_ppstar(psi, t);
      satisfied += truth;
      if (truth != satisfies_ppstar(in.s, psi, in.model.flatten(t))) {
        ++bad[1];
        break;
      }
    }

    std::optional<TorusPoint> value;
    if (draw(rng, 0, 3) > 0) {
      const auto& e = in.model.elements()[static_cast<std::size_t>(draw(rng, 0, static_cast<long>(order) - 1))];
      value = in.s.f(in.model.flatten({e}));
      if (draw(rng, 0, 2) == 0 && in.s.torus_dim() > 0) {
        std::vector<Rational> coords;
        for (std::size_t j = 0; j < in.s.torus_dim(); ++j) coords.emplace_back(draw(rng, 0, 11), 12);
        value = TorusPoint(coords);
      }
    }
    const DefinableCoset k = kernel_and_fiber(in.s, value);
    const TorusPoint target = value.value_or(TorusPoint::zero(in.s.torus_dim()));
    bool fiber_ok = true;
    for (const auto& e : in.model.elements()) {
      const bool truth = TorusPoint(in.model.f(e)) == target;
      fibers += truth;
      if (truth != (!k.is_empty() && k.contains(in.model.flatten({e})))) fiber_ok = false;
    }
    if (!fiber_ok) ++bad[2];
  }
  out.cases = 3 * cases;
  out.violations = bad[0] + bad[1] + bad[2];
  out.detail = note("%zu cases each; mismatches eval %zu, satisfies %zu, kernel/fiber %zu (%zu nonempty, %zu true)",
                    cases, bad[0], bad[1], bad[2], nonempty, satisfied);
  return out;
}

// ---------------------------------------------------------------------------
// 7. Integer lattice certificates

namespace {

bool is_canonical_hnf(const IntMatrix& b) {
  std::size_t last = 0;
  for (std::size_t r = 0; r < b.rows(); ++r) {
    std::size_t p = 0;
    while (p < b.cols() && b(r, p) == 0) ++p;
    if (p == b.cols() || b(r, p) <= 0) return false;
    if (r > 0 && p <= last) return false;
    for (std::size_t above = 0; above < r; ++above)
      if (b(above, p) < 0 || b(above, p) >= b(r, p)) return false;
    last = p;
  }
  return true;
}

bool snf_certificate(const IntMatrix& m) {
  SmithForm sf = snf(m);
  if (testing::naive_product(testing::naive_product(sf.u, m), sf.v) != sf.d) return false;
  if (abs(testing::rational_determinant(sf.u)) != 1 || abs(testing::rational_determinant(sf.v)) != 1) return false;
  Integer prev = 1;
  bool zero_seen = false;
  for (std::size_t i = 0; i < sf.d.rows(); ++i)
    for (std::size_t j = 0; j < sf.d.cols(); ++j) {
      const Integer& x = sf.d(i, j);
      if (i != j) {
        if (x != 0) return false;
        continue;
      }
      if (x < 0) return false;
      if (x == 0) {
        zero_seen = true;
        continue;
      }
      if (zero_seen || x % prev != 0) return false;
      prev = x;
    }
  return true;
}

IntMatrix rows_of(const Lattice& l) { return l.basis(); }

// A random sublattice of `l` with the same rank: random integer combinations.
Lattice random_sublattice(std::mt19937_64& rng, const Lattice& l, Integer& index) {
  const std::size_t r = l.rank();
  IntMatrix c;
  do c = testing::random_matrix(rng, r, r, 3);
  while (testing::rational_determinant(c) == 0);
  index = abs(numerator(testing::rational_determinant(c)));
  return hnf(testing::naive_product(c, rows_of(l)));
}

}  // namespace

Outcome lattice_certificates(std::uint64_t seed, std::size_t matrices) {
  Outcome out;
  out.required = matrices;
  std::mt19937_64 rng(seed);
  std::array<std::size_t, 6> bad{};
  for (std::size_t i = 0; i < matrices; ++i) {
    const std::size_t rows = static_cast<std::size_t>(draw(rng, 1, 6)), cols = static_cast<std::size_t>(draw(rng, 1, 6));
    const IntMatrix m = testing::random_matrix(rng, rows, cols, 50);
    ++out.cases;

    const Lattice h = hnf(m);
    const Echelon e = hermite_with_transform(m);
    bool hnf_ok = is_canonical_hnf(h.basis()) && hnf(h.basis()) == h &&
                  testing::naive_product(e.transform, m) == e.form &&
                  abs(testing::rational_determinant(e.transform)) == 1 && e.form.row_block(0, e.rank) == h.basis();
    for (std::size_t r = 0; r < rows && hnf_ok; ++r)
      hnf_ok = testing::in_span(h.basis(), m.row(r));
    if (!hnf_ok) ++bad[0];
    if (!snf_certificate(m)) ++bad[1];

    // Intersections in small dimensions against box enumeration.
    if (cols <= 3) {
      const Lattice a = h, b = hnf(testing::random_matrix(rng, static_cast<std::size_t>(draw(rng, 1, 3)), cols, 6));
      const Lattice both = intersect(a, b);
      bool ok = true;
      for (std::size_t r = 0; r < both.rank(); ++r)
        ok = ok && testing::in_span(a.basis(), both.basis().row(r)) && testing::in_span(b.basis(), both.basis().row(r));
      testing::for_each_in_box(cols, cols == 3 ? 8 : 20, [&](const IntVector& v) {
        if (ok && testing::in_span(a.basis(), v) && testing::in_span(b.basis(), v) && !testing::in_span(both.basis(), v))
          ok = false;
      });
      if (!ok) ++bad[2];
    }

    // Index multiplicativity along L2 in L1 in L0.
    if (h.rank() > 0) {
      Integer i10, i21;
      const Lattice l1 = random_sublattice(rng, h, i10);
      const Lattice l2 = random_sublattice(rng, l1, i21);
      const IndexValue a = index_of(l2, h), b = index_of(l2, l1), c = index_of(l1, h);
      if (a.is_infinite() || b.is_infinite() || c.is_infinite() || a.value() != b.value() * c.value() ||
          c.value() != i10 || b.value() != i21)
        ++bad[3];
      if (h.is_full_rank()) {
        const IndexValue full = index_of(h, Lattice::full(cols));
        if (full.is_infinite() || Rational(full.value()) != abs(testing::rational_determinant(h.basis()))) ++bad[4];
      }
    }

    // solve on a box.
    if (i % 5 == 0) {
      const std::size_t n = static_cast<std::size_t>(draw(rng, 1, 3)), p = static_cast<std::size_t>(draw(rng, 1, 3));
      const IntMatrix map = testing::random_matrix(rng, p, n, 4);
      const Lattice target = hnf(testing::random_matrix(rng, static_cast<std::size_t>(draw(rng, 0, p)), p, 5));
      IntVector shift;
      for (std::size_t j = 0; j < p; ++j) shift.emplace_back(draw(rng, -5, 5));
      const auto sol = solve(map, target, shift);
      bool ok = true;
      testing::for_each_in_box(n, n == 3 ? 6 : 10, [&](const IntVector& v) {
        IntVector w = ppstar::apply(map, v);
        for (std::size_t j = 0; j < p; ++j) w[j] -= shift[j];
        const bool truth = target.rank() == 0 ? std::all_of(w.begin(), w.end(), [](const Integer& x) { return x == 0; })
                                              : testing::in_span(target.basis(), w);
        if (truth != (sol && sol->contains(v))) ok = false;
      });
      if (!ok) ++bad[5];
    }
  }
  for (auto b : bad) out.violations += b;
  out.detail = note("%zu matrices; failures hnf %zu, snf %zu, intersect %zu, index chain %zu, index/det %zu, solve %zu",
                    out.cases, bad[0], bad[1], bad[2], bad[3], bad[4], bad[5]);
  return out;
}

// ---------------------------------------------------------------------------
// 8. README examples

namespace {

struct Example {
  std::string command;
  std::string expected;
};

// Console blocks: a line "$ ppstar ..." followed by the expected output, up to
// the next command or the closing fence.
std::vector<Example> readme_blocks(const std::string& path) {
  std::ifstream in(path);
  std::vector<Example> out;
  std::string line;
  bool inside = false;
  while (std::getline(in, line)) {
    if (line.rfind("```", 0) == 0) {
      inside = !inside && line == "```console";
      continue;
    }
    if (!inside) continue;
    if (line.rfind("$ ppstar ", 0) == 0) {
      out.push_back({line.substr(2), ""});
    } else if (!out.empty()) {
      out.back().expected += line + "\n";
    }
  }
  return out;
}

std::pair<std::string, int> run(const std::string& command) {
  std::string text;
  FILE* pipe = popen(command.c_str(), "r");
  if (!pipe) return {"", -1};
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) text.append(buf.data(), n);
  const int status = pclose(pipe);
  return {text, WIFEXITED(status) ? WEXITSTATUS(status) : -1};
}

}  // namespace

Outcome readme_examples(const std::string& readme, const std::string& cli, const std::string& workdir) {
  Outcome out;
  const auto examples = readme_blocks(readme);
  out.required = 1;
  std::string failed;
  for (const auto& ex : examples) {
    // "ppstar <args>" runs the freshly built binary from the repository root.
    const std::string cmd = "cd '" + workdir + "' && '" + cli + "'" + ex.command.substr(6) + " 2>/dev/null";
    const auto first = run(cmd), second = run(cmd);
    ++out.cases;
    if (first.first != ex.expected || second.first != first.first) {
      ++out.violations;
      if (failed.empty()) failed = ex.command;
    }
  }
  out.detail = note("%zu invocations", out.cases);
  if (!failed.empty()) out.detail += "; first difference: " + failed;
  return out;
}

// ---------------------------------------------------------------------------

std::vector<Criterion> criteria(std::uint64_t seed, double scale) {
  auto n = [scale](std::size_t full) { return std::max<std::size_t>(1, static_cast<std::size_t>(full * scale)); };
  return {
      {1, "type equality agrees with the automorphism-orbit oracle", [=] { return theorem_cross_validation(seed + 1, n(100)); }},
      {2, "coverage decisions agree with enumeration", [=] { return coverage(seed + 2, n(200), n(100)); }},
      {3, "pp* solution sets are equal or disjoint", [=] { return coset_dichotomy(seed + 3, n(1000)); }},
      {4, "back-and-forth extension succeeds for every c", [=] { return constructive_extension(seed + 4, n(200)); }},
      {5, "basis containments imply equal fingerprints", [=] { return containment_implies_equality(seed + 5, n(200)); }},
      {6, "solver agrees with brute-force enumeration", [=] { return solver_matches_enumeration(seed + 6, n(500)); }},
      {7, "lattice certificates", [=] { return lattice_certificates(seed + 7, n(500)); }},
      {8, "README examples reproduce byte-identical output",
       [] { return readme_examples(PPSTAR_SOURCE_DIR "/README.md", PPSTAR_CLI_PATH, PPSTAR_SOURCE_DIR); }},
  };
}

}  // namespace ppstar::acceptance
