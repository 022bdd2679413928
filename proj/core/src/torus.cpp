#include "ppstar/torus.hpp"

#include "ppstar/error.hpp"

#include <algorithm>

namespace ppstar {

// ---------------------------------------------------------------------------
// TorusPoint

TorusPoint::TorusPoint(std::vector<Rational> coords) : coords_(std::move(coords)) {
  for (auto& c : coords_) c = frac(c);
}

TorusPoint TorusPoint::concat(const TorusPoint& other) const {
  TorusPoint out = *this;
  out.coords_.insert(out.coords_.end(), other.coords_.begin(), other.coords_.end());
  return out;
}

TorusPoint TorusPoint::slice(std::size_t first, std::size_t count) const {
  if (first + count > dim()) throw Error(ErrorKind::Dimension, "torus point slice out of range");
  TorusPoint out;
  out.coords_.assign(coords_.begin() + static_cast<std::ptrdiff_t>(first),
                     coords_.begin() + static_cast<std::ptrdiff_t>(first + count));
  return out;
}

TorusPoint operator+(const TorusPoint& a, const TorusPoint& b) {
  if (a.dim() != b.dim()) throw Error(ErrorKind::Dimension, "torus addition: dimension mismatch");
  std::vector<Rational> c(a.dim());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = a[i] + b[i];
  return TorusPoint(std::move(c));
}

TorusPoint operator-(const TorusPoint& a) {
  std::vector<Rational> c(a.dim());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = -a[i];
  return TorusPoint(std::move(c));
}

TorusPoint operator-(const TorusPoint& a, const TorusPoint& b) { return a + (-b); }

std::string TorusPoint::to_string() const {
  if (dim() == 1) return ppstar::to_string(coords_[0]);
  std::string s = "(";
  for (std::size_t i = 0; i < dim(); ++i) {
    if (i) s += ", ";
    s += ppstar::to_string(coords_[i]);
  }
  return s + ")";
}

// ---------------------------------------------------------------------------
// Congruence solving on the torus

namespace {

std::optional<TorusPoint> solve_with_smith(const SmithForm& s, const std::vector<Rational>& targets) {
  const std::size_t rows = s.d.rows(), cols = s.d.cols();
  if (targets.size() != rows) throw Error(ErrorKind::Dimension, "congruence: target count mismatch");
  // D z == U t (mod 1), x = V z.
  std::vector<Rational> ut(rows);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < rows; ++j)
      if (s.u(i, j) != 0) ut[i] += Rational(s.u(i, j)) * targets[j];
  std::vector<Rational> z(cols);
  for (std::size_t i = 0; i < rows; ++i) {
    const Integer d = i < cols ? s.d(i, i) : Integer(0);
    if (d == 0) {
      if (frac(ut[i]) != 0) return std::nullopt;
    } else {
      z[i] = frac(ut[i]) / Rational(d);
    }
  }
  std::vector<Rational> x(cols);
  for (std::size_t i = 0; i < cols; ++i)
    for (std::size_t j = 0; j < cols; ++j)
      if (s.v(i, j) != 0 && z[j] != 0) x[i] += Rational(s.v(i, j)) * z[j];
  return TorusPoint(std::move(x));
}

Rational dot(std::span<const Integer> chi, const std::vector<Rational>& x) {
  Rational acc = 0;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (chi[i] != 0 && x[i] != 0) acc += Rational(chi[i]) * x[i];
  return acc;
}

}  // namespace

std::optional<TorusPoint> solve_congruence(const IntMatrix& rows, const std::vector<Rational>& targets) {
  return solve_with_smith(snf(rows), targets);
}

// ---------------------------------------------------------------------------
// ClosedTorusSubgroup

ClosedTorusSubgroup::ClosedTorusSubgroup(Lattice annihilator)
    : annihilator_(std::move(annihilator)),
      smith_(std::make_shared<const SmithForm>(snf(annihilator_.basis()))) {}

bool ClosedTorusSubgroup::contains(const TorusPoint& x) const {
  if (x.dim() != dim()) throw Error(ErrorKind::Dimension, "torus membership: dimension mismatch");
  for (std::size_t r = 0; r < annihilator_.rank(); ++r)
    if (frac(dot(annihilator_.basis().row(r), x.coords())) != 0) return false;
  return true;
}

IndexValue ClosedTorusSubgroup::order() const { return index_of(annihilator_, Lattice::full(dim())); }

std::vector<TorusPoint> ClosedTorusSubgroup::elements() const {
  if (!is_finite()) throw Error(ErrorKind::Precondition, "elements(): subgroup is infinite");
  // x = V z with z_i in (1/d_i) Z / Z.
  const std::size_t m = dim();
  std::vector<Integer> d(m);
  for (std::size_t i = 0; i < m; ++i) d[i] = smith_->d(i, i);
  std::vector<TorusPoint> out;
  std::vector<Integer> digits(m);
  while (true) {
    std::vector<Rational> x(m);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j)
        if (digits[j] != 0) x[i] += Rational(smith_->v(i, j) * digits[j], d[j]);
    out.emplace_back(std::move(x));
    std::size_t pos = 0;
    while (pos < m && ++digits[pos] == d[pos]) digits[pos++] = 0;
    if (pos == m) break;
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Rational> ClosedTorusSubgroup::coset_key(const TorusPoint& x) const {
  if (x.dim() != dim()) throw Error(ErrorKind::Dimension, "coset key: dimension mismatch");
  std::vector<Rational> key(annihilator_.rank());
  for (std::size_t r = 0; r < key.size(); ++r) key[r] = frac(dot(annihilator_.basis().row(r), x.coords()));
  return key;
}

TorusPoint ClosedTorusSubgroup::canonical_rep(const TorusPoint& x) const {
  auto rep = solve_with_smith(*smith_, coset_key(x));
  return *rep;  // annihilator rows are independent, so always solvable
}

// ---------------------------------------------------------------------------
// TorusCoset

TorusCoset::TorusCoset(std::size_t dim)
    : empty_(true), rep_(TorusPoint::zero(dim)), group_(ClosedTorusSubgroup::trivial(dim)) {}

TorusCoset TorusCoset::empty(std::size_t dim) { return TorusCoset(dim); }

TorusCoset::TorusCoset(const TorusPoint& rep, ClosedTorusSubgroup group)
    : group_(std::move(group)) {
  if (rep.dim() != group_.dim()) throw Error(ErrorKind::Dimension, "torus coset: representative dimension mismatch");
  rep_ = group_.canonical_rep(rep);
}

bool operator==(const TorusCoset& a, const TorusCoset& b) {
  if (a.empty_ || b.empty_) return a.empty_ == b.empty_ && a.dim() == b.dim();
  return a.group_ == b.group_ && a.rep_ == b.rep_;
}

// ---------------------------------------------------------------------------
// Operations

ClosedTorusSubgroup closure_of(const std::vector<TorusPoint>& gens, std::size_t dim) {
  if (gens.empty()) return ClosedTorusSubgroup::trivial(dim);
  // With g_j = h_j / D: chi annihilates every g_j iff chi . h_j in D Z.
  Integer common = 1;
  for (const auto& g : gens) {
    if (g.dim() != dim) throw Error(ErrorKind::Dimension, "closure_of: generator dimension mismatch");
    for (const auto& c : g.coords()) common = lcm(common, denominator(c));
  }
  IntMatrix map(gens.size(), dim);
  for (std::size_t j = 0; j < gens.size(); ++j)
    for (std::size_t i = 0; i < dim; ++i) {
      const Rational& c = gens[j][i];
      map(j, i) = numerator(c) * (common / denominator(c));
    }
  auto pre = solve(map, Lattice::scaled(gens.size(), common), IntVector(gens.size()));
  return ClosedTorusSubgroup(pre->group);
}

bool member(const TorusPoint& x, const TorusCoset& c) {
  if (c.is_empty()) return false;
  return c.group().contains(x - c.rep());
}

TorusCoset coset_intersect(const TorusCoset& a, const TorusCoset& b) {
  if (a.dim() != b.dim()) throw Error(ErrorKind::Dimension, "coset_intersect: dimension mismatch");
  if (a.is_empty() || b.is_empty()) return TorusCoset::empty(a.dim());
  const auto& la = a.group().annihilator();
  const auto& lb = b.group().annihilator();
  IntMatrix rows = la.basis();
  std::vector<Rational> targets = a.group().coset_key(a.rep());
  for (std::size_t r = 0; r < lb.rank(); ++r) rows.append_row(lb.basis().row(r));
  auto kb = b.group().coset_key(b.rep());
  targets.insert(targets.end(), kb.begin(), kb.end());
  auto x = solve_congruence(rows, targets);
  if (!x) return TorusCoset::empty(a.dim());
  return TorusCoset(*x, ClosedTorusSubgroup(sum(la, lb)));
}

Rational circle_distance(const TorusPoint& a, const TorusPoint& b) {
  if (a.dim() != b.dim()) throw Error(ErrorKind::Dimension, "circle_distance: dimension mismatch");
  Rational best = 0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    Rational f = frac(a[i] - b[i]);
    Rational d = std::min(f, Rational(1) - f);
    best = std::max(best, d);
  }
  return best;
}

namespace {

// a . u <= b over the reals.
struct LinearConstraint {
  std::vector<Rational> a;
  Rational b;
};

// Fourier-Motzkin feasibility over the reals.
bool feasible(std::vector<LinearConstraint> system, std::size_t vars) {
  for (std::size_t v = vars; v-- > 0;) {
    std::vector<LinearConstraint> pos, neg, next;
    for (auto& c : system) {
      if (c.a[v] > 0) pos.push_back(std::move(c));
      else if (c.a[v] < 0) neg.push_back(std::move(c));
      else next.push_back(std::move(c));
    }
    for (const auto& p : pos)
      for (const auto& n : neg) {
        // p/|p_v| + n/|n_v| eliminates v.
        Rational sp = Rational(1) / p.a[v], sn = Rational(-1) / n.a[v];
        LinearConstraint c{std::vector<Rational>(vars), p.b * sp + n.b * sn};
        for (std::size_t i = 0; i < v; ++i) c.a[i] = p.a[i] * sp + n.a[i] * sn;
        next.push_back(std::move(c));
      }
    system = std::move(next);
  }
  return std::all_of(system.begin(), system.end(), [](const LinearConstraint& c) { return c.b >= 0; });
}

}  // namespace

bool approx_member(const TorusPoint& x, const TorusCoset& c, const Rational& eps) {
  if (eps < 0) throw Error(ErrorKind::Precondition, "approx_member: eps must be non-negative");
  if (c.is_empty()) return false;
  if (x.dim() != c.dim()) throw Error(ErrorKind::Dimension, "approx_member: dimension mismatch");
  if (eps == 0) return member(x, c);
  if (eps * 2 >= 1) return true;
  const std::size_t m = x.dim();
  const TorusPoint w = x - c.rep();
  // G = {V z : z_i in (1/d_i) Z for i < rank, z_j real otherwise}; look for
  // z with |V z - w|_inf <= eps.
  const SmithForm s = snf(c.group().annihilator().basis());
  const std::size_t rank = c.group().annihilator().rank();
  IntMatrix v_inv = hermite_with_transform(s.v).transform;
  std::vector<Integer> lo(rank), hi(rank), dvals(rank);
  for (std::size_t i = 0; i < rank; ++i) {
    dvals[i] = s.d(i, i);
    Rational centre = 0, spread = 0;
    for (std::size_t j = 0; j < m; ++j) {
      centre += Rational(v_inv(i, j)) * w[j];
      spread += Rational(v_inv(i, j) < 0 ? Integer(-v_inv(i, j)) : v_inv(i, j)) * eps;
    }
    // k / d_i within [centre - spread, centre + spread]
    Rational a = (centre - spread) * Rational(dvals[i]);
    Rational b = (centre + spread) * Rational(dvals[i]);
    lo[i] = -floor(-a);
    hi[i] = floor(b);
    if (lo[i] > hi[i]) return false;
  }
  const std::size_t free = m - rank;
  std::vector<Integer> grid = lo;
  while (true) {
    std::vector<Rational> fixed(m);
    for (std::size_t l = 0; l < m; ++l)
      for (std::size_t i = 0; i < rank; ++i)
        if (grid[i] != 0) fixed[l] += Rational(s.v(l, i) * grid[i], dvals[i]);
    std::vector<LinearConstraint> system;
    for (std::size_t l = 0; l < m; ++l) {
      LinearConstraint up{std::vector<Rational>(free), eps + w[l] - fixed[l]};
      LinearConstraint down{std::vector<Rational>(free), eps - w[l] + fixed[l]};
      for (std::size_t j = 0; j < free; ++j) {
        up.a[j] = Rational(s.v(l, rank + j));
        down.a[j] = -up.a[j];
      }
      system.push_back(std::move(up));
      system.push_back(std::move(down));
    }
    if (feasible(std::move(system), free)) return true;
    std::size_t pos = 0;
    while (pos < rank && grid[pos] == hi[pos]) {
      grid[pos] = lo[pos];
      ++pos;
    }
    if (pos == rank) return false;
    ++grid[pos];
  }
}

}  // namespace ppstar
