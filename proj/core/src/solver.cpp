#include "ppstar/solver.hpp"

#include "ppstar/error.hpp"

namespace ppstar {

// ---------------------------------------------------------------------------
// DefinableCoset

DefinableCoset DefinableCoset::empty(std::size_t arity, std::size_t ambient_rank) {
  return DefinableCoset(arity, arity * ambient_rank);
}

DefinableCoset::DefinableCoset(std::size_t arity, AffineLattice coset)
    : arity_(arity), width_(coset.group.ambient_dim()), coset_(coset.canonical()) {
  if (coset_->rep.size() != width_) throw Error(ErrorKind::Dimension, "coset representative has the wrong width");
}

bool DefinableCoset::contains(std::span<const Integer> tuple) const {
  if (tuple.size() != width_) throw Error(ErrorKind::Dimension, "tuple width does not match the coset");
  return coset_ && coset_->contains(tuple);
}

IndexValue DefinableCoset::size(const Structure& s) const {
  if (!coset_) return IndexValue::finite(0);
  return index_of(s.relations_power(arity_), coset_->group);
}

// ---------------------------------------------------------------------------
// Matrix form of a pp formula

namespace {

struct ConstraintSystem {
  IntMatrix map;
  Lattice target;
  IntVector shift;
};

IntVector parameter_value(const Structure& s, const ParameterAssignment& args, const std::string& name) {
  if (auto it = args.find(name); it != args.end()) {
    if (it->second.size() != s.ambient_rank())
      throw Error(ErrorKind::Dimension, "parameter '" + name + "' has the wrong number of coordinates");
    return it->second;
  }
  if (auto it = s.parameters().find(name); it != s.parameters().end()) return it->second;
  throw Error(ErrorKind::Precondition, "no value for parameter '" + name + "'");
}

// Each atom P(t_1..t_p) becomes rows  sum_v coef * x_v  -  (param part)  in P.
ConstraintSystem build_system(const Structure& s, const PpFormula& phi, const ParameterAssignment& args) {
  const std::size_t n = s.ambient_rank();
  const std::size_t vars = phi.free_arity() + phi.bound_arity();
  ConstraintSystem sys{IntMatrix(0, vars * n), Lattice(0), {}};
  IntMatrix target_basis(0, 0);
  for (const auto& atom : phi.atoms) {
    const Subgroup& pred = s.predicate(atom.predicate);
    if (pred.arity != atom.args.size())
      throw Error(ErrorKind::Dimension, "predicate " + atom.predicate + " applied to the wrong number of terms");
    for (const auto& term : atom.args) {
      if (term.free.size() != phi.free_arity() || term.bound.size() != phi.bound_arity())
        throw Error(ErrorKind::Dimension, "term does not match the formula's variables");
      IntVector offset(n);
      for (const auto& [name, coef] : term.params) {
        IntVector v = parameter_value(s, args, name);
        for (std::size_t i = 0; i < n; ++i) offset[i] += coef * v[i];
      }
      if (term.constant != 0) {
        IntVector unit = parameter_value(s, args, kUnitParameter);
        for (std::size_t i = 0; i < n; ++i) offset[i] += term.constant * unit[i];
      }
      for (std::size_t i = 0; i < n; ++i) {
        IntVector row(vars * n);
        for (std::size_t v = 0; v < phi.free_arity(); ++v) row[v * n + i] = term.free[v];
        for (std::size_t v = 0; v < phi.bound_arity(); ++v) row[(phi.free_arity() + v) * n + i] = term.bound[v];
        sys.map.append_row(row);
        sys.shift.push_back(-offset[i]);
      }
    }
    // Append the predicate lattice as a diagonal block of the target.
    const std::size_t old = target_basis.cols(), add = pred.lattice.ambient_dim();
    IntMatrix grown(target_basis.rows() + pred.lattice.rank(), old + add);
    for (std::size_t r = 0; r < target_basis.rows(); ++r)
      for (std::size_t c = 0; c < old; ++c) grown(r, c) = target_basis(r, c);
    for (std::size_t r = 0; r < pred.lattice.rank(); ++r)
      for (std::size_t c = 0; c < add; ++c) grown(target_basis.rows() + r, old + c) = pred.lattice.basis()(r, c);
    target_basis = std::move(grown);
  }
  sys.target = hnf(target_basis);
  return sys;
}

}  // namespace

WitnessMap::WitnessMap(const Structure& s, const PpFormula& phi, const ParameterAssignment& args)
    : n_(s.ambient_rank()), free_arity_(phi.free_arity()), bound_arity_(phi.bound_arity()) {
  const std::size_t xw = free_arity_ * n_, yw = bound_arity_ * n_;
  ConstraintSystem sys = build_system(s, phi, args);
  if (sys.map.rows() == 0)
    matrix_ = AffineLattice{IntVector(xw + yw), Lattice::full(xw + yw)};
  else
    matrix_ = solve(sys.map, sys.target, sys.shift);
  if (!matrix_) {
    projection_ = Lattice(xw);
    witness_group_ = Lattice(yw);
    return;
  }
  ProjectionWithLifts p = project_with_lifts(matrix_->group, 0, xw);
  projection_ = std::move(p.image);
  lifts_ = std::move(p.lifts);
  witness_group_ = project(p.kernel, xw, yw);
}

DefinableCoset WitnessMap::solutions() const {
  if (!matrix_) return DefinableCoset::empty(free_arity_, n_);
  const std::size_t xw = free_arity_ * n_;
  IntVector rep(matrix_->rep.begin(), matrix_->rep.begin() + static_cast<std::ptrdiff_t>(xw));
  return DefinableCoset(free_arity_, AffineLattice{std::move(rep), projection_});
}

std::optional<IntVector> WitnessMap::witness(std::span<const Integer> tuple) const {
  const std::size_t xw = free_arity_ * n_, yw = bound_arity_ * n_;
  if (tuple.size() != xw) throw Error(ErrorKind::Dimension, "tuple width does not match the formula's free variables");
  if (!matrix_) return std::nullopt;
  IntVector diff(xw);
  for (std::size_t i = 0; i < xw; ++i) diff[i] = tuple[i] - matrix_->rep[i];
  auto coords = projection_.coordinates(diff);
  if (!coords) return std::nullopt;
  IntVector y(matrix_->rep.begin() + static_cast<std::ptrdiff_t>(xw), matrix_->rep.end());
  for (std::size_t r = 0; r < coords->size(); ++r) {
    const Integer& a = (*coords)[r];
    if (a == 0) continue;
    for (std::size_t j = 0; j < yw; ++j) y[j] += a * lifts_(r, xw + j);
  }
  return y;
}

DefinableCoset WitnessMap::witnesses(std::span<const Integer> tuple) const {
  auto y = witness(tuple);
  if (!y) return DefinableCoset::empty(bound_arity_, n_);
  return DefinableCoset(bound_arity_, AffineLattice{std::move(*y), witness_group_});
}

DefinableCoset eval_pp(const Structure& s, const PpFormula& phi, const ParameterAssignment& args) {
  return WitnessMap(s, phi, args).solutions();
}

TorusCoset torus_image(const Structure& s, const DefinableCoset& c) {
  const std::size_t dim = c.arity() * s.torus_dim();
  if (c.is_empty()) return TorusCoset::empty(dim);
  std::vector<TorusPoint> gens;
  for (std::size_t r = 0; r < c.group().rank(); ++r) gens.push_back(s.f_tuple(c.group().basis().row(r)));
  return TorusCoset(s.f_tuple(c.rep()), closure_of(gens, dim));
}

namespace {

void check_tuple(const Structure& s, const PpStarFormula& psi, std::span<const Integer> tuple) {
  if (tuple.size() != psi.core.free_arity() * s.ambient_rank())
    throw Error(ErrorKind::Dimension, "tuple has " + std::to_string(tuple.size()) + " coordinates, expected " +
                                          std::to_string(psi.core.free_arity() * s.ambient_rank()));
  for (const auto& [index, value] : psi.f_constraints)
    if (value.dim() != s.torus_dim()) throw Error(ErrorKind::Dimension, "f-constraint has the wrong torus dimension");
}

}  // namespace

bool satisfies_ppstar(const Structure& s, const PpStarFormula& psi, std::span<const Integer> tuple,
                      const ParameterAssignment& args) {
  check_tuple(s, psi, tuple);
  const std::size_t n = s.ambient_rank(), m = psi.core.free_arity();
  std::vector<std::size_t> constrained;
  TorusPoint wanted;
  for (const auto& [index, value] : psi.f_constraints) {
    if (index < m) {
      if (s.f(tuple.subspan(index * n, n)) != value) return false;
    } else {
      constrained.push_back(index - m);
      wanted = wanted.concat(value);
    }
  }
  DefinableCoset w = WitnessMap(s, psi.core, args).witnesses(tuple);
  if (w.is_empty()) return false;
  if (constrained.empty()) return true;

  // Restrict the witness coset to the constrained bound variables, then ask
  // whether the prescribed values lie in the closure of its image.
  auto restrict = [&](std::span<const Integer> v) {
    IntVector out;
    for (std::size_t j : constrained) out.insert(out.end(), v.begin() + j * n, v.begin() + (j + 1) * n);
    return out;
  };
  std::vector<TorusPoint> gens;
  for (std::size_t r = 0; r < w.group().rank(); ++r) gens.push_back(s.f_tuple(restrict(w.group().basis().row(r))));
  const std::size_t dim = constrained.size() * s.torus_dim();
  TorusCoset image(s.f_tuple(restrict(w.rep())), closure_of(gens, dim));
  return member(wanted, image);
}

bool satisfies_ppstar_approx(const Structure& s, const PpStarFormula& psi, std::span<const Integer> tuple,
                             const Rational& eps, const ParameterAssignment& args) {
  if (psi.core.bound_arity() != 0)
    throw Error(ErrorKind::Precondition, "approximate satisfaction is defined only for quantifier-free formulas");
  if (eps < 0) throw Error(ErrorKind::Precondition, "eps must be non-negative");
  check_tuple(s, psi, tuple);
  const std::size_t n = s.ambient_rank();
  if (WitnessMap(s, psi.core, args).witnesses(tuple).is_empty()) return false;
  for (const auto& [index, value] : psi.f_constraints) {
    TorusCoset point(value, ClosedTorusSubgroup::trivial(s.torus_dim()));
    if (!approx_member(s.f(tuple.subspan(index * n, n)), point, eps)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Coverage

namespace {

struct CoverSearch {
  const std::vector<const DefinableCoset*>& covers;
  const Lattice& k0;
  Integer sum = 0;

  // Adds the terms for every Delta extending the current one by indices >= next.
  void extend(const AffineLattice& current, std::size_t size, std::size_t next) {
    for (std::size_t j = next; j < covers.size(); ++j) {
      auto meet = intersect(current, covers[j]->affine());
      // An empty intersection stays empty for every superset of Delta.
      if (!meet) continue;
      const Integer count = index_of(k0, meet->group).value();
      if ((size + 1) % 2 == 1) sum -= count;
      else sum += count;
      extend(*meet, size + 1, j + 1);
    }
  }
};

}  // namespace

CoverAnalysis cover_analysis(const DefinableCoset& x, const std::vector<DefinableCoset>& covers) {
  if (x.is_empty()) throw Error(ErrorKind::Precondition, "the covered coset must be non-empty");
  for (const auto& c : covers)
    if (c.width() != x.width() || c.arity() != x.arity())
      throw Error(ErrorKind::Dimension, "covering cosets must have the same arity as the covered one");

  CoverAnalysis out;
  const Lattice& h = x.group();
  Lattice k0 = h;
  std::vector<const DefinableCoset*> kept;
  for (std::size_t i = 0; i < covers.size(); ++i) {
    if (covers[i].is_empty()) continue;
    Lattice meet = intersect(h, covers[i].group());
    if (index_of(meet, h).is_infinite()) continue;
    out.survivors.push_back(i);
    kept.push_back(&covers[i]);
    k0 = intersect(k0, covers[i].group());
  }
  out.base_index = index_of(k0, h).value();
  CoverSearch search{kept, k0, out.base_index};
  search.extend(x.affine(), 0, 0);
  out.signed_sum = search.sum;
  out.covered = out.signed_sum == 0;
  return out;
}

bool cover_decide(const DefinableCoset& x, const std::vector<DefinableCoset>& covers) {
  return cover_analysis(x, covers).covered;
}

// ---------------------------------------------------------------------------
// Kernel and fibres of f

DefinableCoset kernel_and_fiber(const Structure& s, const std::optional<TorusPoint>& value) {
  const std::size_t n = s.ambient_rank(), d = s.torus_dim();
  if (value && value->dim() != d)
    throw Error(ErrorKind::Dimension, "torus value has dimension " + std::to_string(value->dim()) + ", expected " +
                                          std::to_string(d));
  const Character& f = s.character();
  // Clear denominators: D*F*x == D*c (mod D Z^d).
  Integer scale = f.denominator();
  if (value)
    for (const auto& q : value->coords()) scale = lcm(scale, denominator(q));
  IntMatrix map(d, n);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < n; ++j) map(i, j) = f.numerators()(i, j) * (scale / f.denominator());
  IntVector shift(d);
  if (value)
    for (std::size_t i = 0; i < d; ++i) shift[i] = numerator((*value)[i]) * (scale / denominator((*value)[i]));
  auto coset = solve(map, Lattice::scaled(d, scale), shift);
  if (!coset) return DefinableCoset::empty(1, n);
  return DefinableCoset(1, *coset);
}

}  // namespace ppstar
