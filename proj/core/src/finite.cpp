#include "ppstar/finite.hpp"

#include "ppstar/error.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <map>
#include <numeric>

namespace ppstar {

std::size_t max_orbit_order() {
  if (const char* env = std::getenv("PPSTAR_MAX_ORBIT")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return kDefaultMaxOrbitOrder;
}

namespace {

struct SmithCoordinates {
  std::vector<Integer> moduli;
  IntMatrix v, v_inverse;
};

// x -> x*V maps the relations onto the diagonal of their Smith form.
SmithCoordinates smith_coordinates(const Structure& s) {
  SmithForm sf = snf(s.relations().basis());
  SmithCoordinates out{{}, sf.v, hermite_with_transform(sf.v).transform};
  for (std::size_t i = 0; i < s.ambient_rank(); ++i) out.moduli.push_back(sf.d(i, i));
  return out;
}

std::vector<IntVector> enumerate(const Structure& s, const SmithCoordinates& sc, std::size_t size) {
  const std::size_t n = s.ambient_rank();
  std::vector<IntVector> out(size);
  for (std::size_t c = 0; c < size; ++c) {
    IntVector z(n);
    std::size_t rest = c;
    for (std::size_t i = 0; i < n; ++i) {
      const auto d = static_cast<std::size_t>(sc.moduli[i]);
      z[i] = rest % d;
      rest /= d;
    }
    out[c] = s.reduce(apply_row(z, sc.v_inverse));
  }
  return out;
}

}  // namespace

std::vector<IntVector> finite_elements(const Structure& s) {
  if (!s.is_finite()) throw Error(ErrorKind::Precondition, "structure '" + s.name() + "' is infinite");
  return enumerate(s, smith_coordinates(s), static_cast<std::size_t>(*s.order()));
}

FiniteGroup::FiniteGroup(const Structure& s, std::size_t limit) : s_(&s) {
  if (!s.is_finite()) throw Error(ErrorKind::Precondition, "structure '" + s.name() + "' is infinite");
  const Integer total = *s.order();
  if (total > limit)
    throw Error(ErrorKind::SizeLimit, "|A| = " + total.str() + " exceeds the exhaustive-search bound " +
                                          std::to_string(limit) + " (set PPSTAR_MAX_ORBIT to raise it)");
  const std::size_t n = s.ambient_rank();
  const std::size_t size = static_cast<std::size_t>(total);

  SmithCoordinates sc = smith_coordinates(s);
  v_ = sc.v;
  moduli_ = sc.moduli;
  elements_ = enumerate(s, sc, size);
  std::size_t stride = 1;
  for (const auto& d : moduli_) {
    radix_.push_back(static_cast<std::size_t>(d));
    strides_.push_back(stride);
    stride *= static_cast<std::size_t>(d);
  }

  add_.resize(size * size);
  for (std::size_t a = 0; a < size; ++a)
    for (std::size_t b = 0; b < size; ++b) {
      // Mixed-radix digit-wise addition.
      std::size_t ra = a, rb = b, out = 0, stride = 1;
      for (std::size_t i = 0; i < n; ++i) {
        const auto d = static_cast<std::size_t>(moduli_[i]);
        out += ((ra % d + rb % d) % d) * stride;
        ra /= d;
        rb /= d;
        stride *= d;
      }
      add_[a * size + b] = static_cast<Code>(out);
    }
  neg_.resize(size);
  orders_.resize(size);
  for (std::size_t a = 0; a < size; ++a) {
    for (std::size_t b = 0; b < size; ++b)
      if (add_[a * size + b] == 0) neg_[a] = static_cast<Code>(b);
    Code x = static_cast<Code>(a);
    std::uint32_t k = 1;
    while (x != 0) {
      x = add(x, static_cast<Code>(a));
      ++k;
    }
    orders_[a] = a == 0 ? 1 : k;
  }

  std::map<TorusPoint, std::uint32_t> classes;
  f_classes_.resize(size);
  for (std::size_t a = 0; a < size; ++a) {
    auto [it, fresh] = classes.emplace(s.f(elements_[a]), static_cast<std::uint32_t>(classes.size()));
    f_classes_[a] = it->second;
  }

  for (const auto& [name, sub] : s.subgroups()) {
    Relation rel{sub.arity, {}, {}};
    std::size_t space = 1;
    for (std::size_t i = 0; i < sub.arity; ++i) space *= size;
    rel.members.assign(space, false);
    for (std::size_t r = 0; r < sub.lattice.rank(); ++r) {
      auto gen = codes(sub.lattice.basis().row(r));
      if (std::any_of(gen.begin(), gen.end(), [](Code c) { return c != 0; })) rel.generators.push_back(gen);
    }
    // Closure of the generators under addition.
    std::vector<std::vector<Code>> found{std::vector<Code>(sub.arity, 0)};
    rel.members[0] = true;
    for (std::size_t i = 0; i < found.size(); ++i)
      for (const auto& gen : rel.generators) {
        std::vector<Code> next(sub.arity);
        for (std::size_t j = 0; j < sub.arity; ++j) next[j] = add(found[i][j], gen[j]);
        std::size_t idx = tuple_index(next);
        if (!rel.members[idx]) {
          rel.members[idx] = true;
          found.push_back(std::move(next));
        }
      }
    predicates_.push_back(std::move(rel));
  }
}

FiniteGroup::Code FiniteGroup::code(std::span<const Integer> element) const {
  IntVector z = apply_row(element, v_);
  std::size_t out = 0, stride = 1;
  for (std::size_t i = 0; i < z.size(); ++i) {
    out += static_cast<std::size_t>(floor_mod(z[i], moduli_[i])) * stride;
    stride *= static_cast<std::size_t>(moduli_[i]);
  }
  return static_cast<Code>(out);
}

std::vector<FiniteGroup::Code> FiniteGroup::codes(std::span<const Integer> tuple) const {
  const std::size_t n = s_->ambient_rank();
  if (n == 0) {
    if (!tuple.empty()) throw Error(ErrorKind::Dimension, "tuple for a rank-0 structure must be empty");
    return {};
  }
  if (tuple.size() % n != 0) throw Error(ErrorKind::Dimension, "tuple length is not a multiple of the ambient rank");
  std::vector<Code> out;
  for (std::size_t b = 0; b < tuple.size() / n; ++b) out.push_back(code(tuple.subspan(b * n, n)));
  return out;
}

IntVector FiniteGroup::tuple(std::span<const Code> codes) const {
  IntVector out;
  for (Code c : codes) out.insert(out.end(), elements_[c].begin(), elements_[c].end());
  return out;
}

FiniteGroup::Code FiniteGroup::multiple(Code a, std::uint64_t k) const {
  k %= orders_[a];
  Code out = 0;
  for (std::uint64_t i = 0; i < k; ++i) out = add(out, a);
  return out;
}

std::size_t FiniteGroup::tuple_index(std::span<const Code> tuple) const {
  std::size_t idx = 0;
  for (auto it = tuple.rbegin(); it != tuple.rend(); ++it) idx = idx * order() + *it;
  return idx;
}

// ---------------------------------------------------------------------------
// Automorphism search

namespace {

using Code = FiniteGroup::Code;
constexpr Code kUnset = static_cast<Code>(-1);

struct Generator {
  Code element;
  Code forced = kUnset;       // required image, for components of a
  std::uint32_t relative = 1;  // least o >= 1 with o * element in the previous span
  Code multiple = 0;           // o * element
};

class AutomorphismSearch {
 public:
  AutomorphismSearch(const FiniteGroup& g, std::span<const Code> a, std::span<const Code> b) : g_(g) {
    const std::size_t size = g.order();
    entered_.assign(size, 0);
    std::vector<char> in_span(size, 0);
    std::vector<Code> span{0};
    in_span[0] = 1;

    auto add_generator = [&](Code x, Code forced) {
      Generator gen{x, forced};
      Code m = x;
      while (!in_span[m]) {
        m = g.add(m, x);
        ++gen.relative;
      }
      gen.multiple = m;
      const std::size_t step = gens_.size() + 1;
      const std::size_t old = span.size();
      for (std::size_t i = 0; i < old; ++i) {
        Code y = span[i];
        for (std::uint32_t j = 1; j < gen.relative; ++j) {
          y = g.add(y, x);
          in_span[y] = 1;
          entered_[y] = step;
          span.push_back(y);
        }
      }
      gens_.push_back(gen);
    };

    for (std::size_t j = 0; j < a.size(); ++j) {
      if (in_span[a[j]]) checks_.push_back({entered_[a[j]], a[j], b[j]});
      else add_generator(a[j], b[j]);
    }
    std::vector<Code> rest(size);
    std::iota(rest.begin(), rest.end(), 0);
    std::stable_sort(rest.begin(), rest.end(),
                     [&](Code x, Code y) { return g.element_order(x) > g.element_order(y); });
    for (Code x : rest)
      if (!in_span[x]) add_generator(x, kUnset);

    // Predicate generator tuples are checked once all their entries are mapped.
    for (std::size_t p = 0; p < g.relations().size(); ++p)
      for (const auto& tuple : g.relations()[p].generators) {
        std::size_t step = 0;
        for (Code c : tuple) step = std::max(step, entered_[c]);
        relation_checks_.push_back({step, p, &tuple});
      }
  }

  std::optional<Automorphism> run() {
    const std::size_t size = g_.order();
    sigma_.assign(size, kUnset);
    used_.assign(size, 0);
    sigma_[0] = 0;
    used_[0] = 1;
    domain_ = {0};
    for (const auto& c : checks_)
      if (c.step == 0 && c.target != 0) return std::nullopt;
    if (!dfs(0)) return std::nullopt;
    return sigma_;
  }

 private:
  struct ElementCheck {
    std::size_t step;
    Code source, target;
  };
  struct RelationCheck {
    std::size_t step;
    std::size_t predicate;
    const std::vector<Code>* tuple;
  };

  bool dfs(std::size_t i) {
    if (i == gens_.size()) return true;
    const Generator& gen = gens_[i];
    if (gen.forced != kUnset) return try_image(i, gen.forced);
    const std::size_t size = g_.order();
    for (Code h = 0; h < size; ++h) {
      if (used_[h] || g_.element_order(h) != g_.element_order(gen.element) ||
          g_.f_class(h) != g_.f_class(gen.element))
        continue;
      if (try_image(i, h)) return true;
    }
    return false;
  }

  bool try_image(std::size_t i, Code h) {
    const Generator& gen = gens_[i];
    const std::size_t step = i + 1;
    Code mh = h;
    for (std::uint32_t j = 1; j < gen.relative; ++j) mh = g_.add(mh, h);
    if (mh != sigma_[gen.multiple]) return false;

    const std::size_t old = domain_.size();
    bool ok = true;
    for (std::size_t k = 0; k < old && ok; ++k) {
      Code x = domain_[k], y = sigma_[x];
      for (std::uint32_t j = 1; j < gen.relative; ++j) {
        x = g_.add(x, gen.element);
        y = g_.add(y, h);
        if (used_[y] || g_.f_class(y) != g_.f_class(x)) {
          ok = false;
          break;
        }
        sigma_[x] = y;
        used_[y] = 1;
        domain_.push_back(x);
      }
    }
    if (ok)
      for (const auto& c : checks_)
        if (c.step == step && sigma_[c.source] != c.target) ok = false;
    if (ok)
      for (const auto& c : relation_checks_) {
        if (c.step != step) continue;
        const auto& rel = g_.relations()[c.predicate];
        std::vector<Code> image(c.tuple->size());
        for (std::size_t j = 0; j < image.size(); ++j) image[j] = sigma_[(*c.tuple)[j]];
        if (!rel.members[g_.tuple_index(image)]) {
          ok = false;
          break;
        }
      }
    if (ok && dfs(i + 1)) return true;
    for (std::size_t k = old; k < domain_.size(); ++k) {
      used_[sigma_[domain_[k]]] = 0;
      sigma_[domain_[k]] = kUnset;
    }
    domain_.resize(old);
    return false;
  }

  const FiniteGroup& g_;
  std::vector<Generator> gens_;
  std::vector<std::size_t> entered_;
  std::vector<ElementCheck> checks_;
  std::vector<RelationCheck> relation_checks_;
  std::vector<Code> sigma_;
  std::vector<char> used_;
  std::vector<Code> domain_;
};

}  // namespace

std::optional<Automorphism> find_automorphism(const FiniteGroup& g, std::span<const Code> a,
                                              std::span<const Code> b) {
  if (a.size() != b.size()) throw Error(ErrorKind::Dimension, "tuples have different lengths");
  for (std::size_t j = 0; j < a.size(); ++j)
    if (g.element_order(a[j]) != g.element_order(b[j]) || g.f_class(a[j]) != g.f_class(b[j])) return std::nullopt;
  return AutomorphismSearch(g, a, b).run();
}

// ---------------------------------------------------------------------------
// Endomorphisms

namespace {

class EndomorphismSearch {
 public:
  explicit EndomorphismSearch(const FiniteGroup& g) : g_(g) {
    for (std::size_t i = 0; i < g.moduli().size(); ++i) {
      if (g.moduli()[i] == 1) continue;
      const Code gen = g.unit(i);
      std::vector<Code> images;
      for (Code h = 0; h < g.order(); ++h)
        if (g.moduli()[i] % g.element_order(h) == 0 && g.f_class(h) == g.f_class(gen)) images.push_back(h);
      digits_.push_back(i);
      candidates_.push_back(std::move(images));
    }
    // A predicate generator tuple is checked once the images of all digits it uses are fixed.
    for (std::size_t p = 0; p < g.relations().size(); ++p)
      for (const auto& tuple : g.relations()[p].generators) {
        std::size_t step = 0;
        for (Code c : tuple)
          for (std::size_t j = 0; j < digits_.size(); ++j)
            if (g.digit(c, digits_[j]) != 0) step = std::max(step, j + 1);
        checks_.push_back({step, p, &tuple});
      }
  }

  std::uint64_t leaves() const {
    std::uint64_t total = 1;
    for (const auto& c : candidates_) {
      if (c.empty()) return 0;
      if (total > std::numeric_limits<std::uint64_t>::max() / c.size()) return std::numeric_limits<std::uint64_t>::max();
      total *= c.size();
    }
    return total;
  }

  std::vector<Endomorphism> run() {
    images_.assign(digits_.size(), 0);
    for (const auto& c : checks_)
      if (c.step == 0 && !holds(c)) return {};
    dfs(0);
    return std::move(found_);
  }

 private:
  struct RelationCheck {
    std::size_t step;
    std::size_t predicate;
    const std::vector<Code>* tuple;
  };

  Code image(Code x) const {
    Code out = 0;
    for (std::size_t j = 0; j < digits_.size(); ++j)
      out = g_.add(out, g_.multiple(images_[j], g_.digit(x, digits_[j])));
    return out;
  }

  bool holds(const RelationCheck& c) const {
    std::vector<Code> t(c.tuple->size());
    for (std::size_t j = 0; j < t.size(); ++j) t[j] = image((*c.tuple)[j]);
    return g_.relations()[c.predicate].members[g_.tuple_index(t)];
  }

  void dfs(std::size_t i) {
    if (i == digits_.size()) {
      Endomorphism h(g_.order());
      for (Code x = 0; x < g_.order(); ++x) h[x] = image(x);
      found_.push_back(std::move(h));
      return;
    }
    for (Code h : candidates_[i]) {
      images_[i] = h;
      bool ok = true;
      for (const auto& c : checks_)
        if (c.step == i + 1 && !holds(c)) {
          ok = false;
          break;
        }
      if (ok) dfs(i + 1);
    }
    images_[i] = 0;
  }

  const FiniteGroup& g_;
  std::vector<std::size_t> digits_;
  std::vector<std::vector<Code>> candidates_;
  std::vector<RelationCheck> checks_;
  std::vector<Code> images_;
  std::vector<Endomorphism> found_;
};

}  // namespace

std::optional<std::vector<Endomorphism>> endomorphisms(const FiniteGroup& g, std::uint64_t limit) {
  EndomorphismSearch search(g);
  if (search.leaves() > limit) return std::nullopt;
  return search.run();
}

bool is_bijective(const Endomorphism& h) {
  std::vector<char> hit(h.size(), 0);
  for (auto y : h) {
    if (hit[y]) return false;
    hit[y] = 1;
  }
  return true;
}

}  // namespace ppstar
