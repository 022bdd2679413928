#include "ppstar/formula.hpp"

#include "ppstar/error.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace ppstar {

bool Term::is_zero() const {
  auto zero = [](const Integer& x) { return x == 0; };
  return std::all_of(free.begin(), free.end(), zero) && std::all_of(bound.begin(), bound.end(), zero) &&
         params.empty() && constant == 0;
}

const PpFormula& core_of(const Formula& f) {
  return std::visit(
      [](const auto& g) -> const PpFormula& {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, PpFormula>) return g;
        else if constexpr (std::is_same_v<T, PpStarFormula>) return g.core;
        else return g.inner;
      },
      f);
}

// ---------------------------------------------------------------------------
// Lexer

namespace {

enum class Tok { Name, Int, Punct, End };

struct Token {
  Tok kind;
  std::string text;
  std::size_t pos;
};

std::vector<Token> lex(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
      out.push_back({Tok::Name, std::string(s.substr(i, j - i)), i});
      i = j;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      out.push_back({Tok::Int, std::string(s.substr(i, j - i)), i});
      i = j;
    } else if (std::string_view("(),.&=!*+-/").find(c) != std::string_view::npos) {
      out.push_back({Tok::Punct, std::string(1, c), i});
      ++i;
    } else {
      throw ParseError(i, std::string("unexpected character '") + c + "'");
    }
  }
  out.push_back({Tok::End, "", s.size()});
  return out;
}

bool reserved(const std::string& name) { return name == "E" || name == "f"; }

// ---------------------------------------------------------------------------
// Parser

class Parser {
 public:
  Parser(std::string_view text, const Signature& sig) : toks_(lex(text)), sig_(sig) {}

  Formula run() {
    PpFormula core;
    core.free_names = sig_.free_vars;
    for (const auto& name : sig_.free_vars)
      if (reserved(name)) throw ParseError(0, "reserved name used as free variable: " + name);
    bool negated = false;
    if (is_punct("!")) {
      negated = true;
      next();
    }
    while (peek().kind == Tok::Name && peek().text == "E") {
      next();
      std::size_t count = 0;
      while (true) {
        const Token& t = expect_name("bound variable name");
        if (reserved(t.text)) throw ParseError(t.pos, "reserved name used as bound variable: " + t.text);
        if (std::find(core.bound_names.begin(), core.bound_names.end(), t.text) != core.bound_names.end())
          throw ParseError(t.pos, "variable bound twice: " + t.text);
        if (std::find(sig_.free_vars.begin(), sig_.free_vars.end(), t.text) != sig_.free_vars.end())
          throw ParseError(t.pos, "bound variable shadows free variable: " + t.text);
        if (std::binary_search(sig_.params.begin(), sig_.params.end(), t.text))
          throw ParseError(t.pos, "bound variable shadows parameter: " + t.text);
        if (sig_.predicates.count(t.text)) throw ParseError(t.pos, "bound variable shadows predicate: " + t.text);
        core.bound_names.push_back(t.text);
        ++count;
        if (!is_punct(",")) break;
        next();
      }
      expect_punct(".");
      core.blocks.push_back(count);
    }
    formula_ = &core;

    std::map<std::size_t, TorusPoint> constraints;
    std::size_t first_constraint_pos = 0;
    while (true) {
      const Token& t = peek();
      if (t.kind == Tok::Name && t.text == "f" && peek(1).kind == Tok::Punct && peek(1).text == "(") {
        if (constraints.empty()) first_constraint_pos = t.pos;
        parse_f_constraint(constraints);
      } else if (t.kind == Tok::Name && peek(1).kind == Tok::Punct && peek(1).text == "(") {
        core.atoms.push_back(parse_predicate_atom());
      } else {
        core.atoms.push_back(parse_equation());
      }
      if (!is_punct("&")) break;
      next();
    }
    if (peek().kind != Tok::End) throw ParseError(peek().pos, "unexpected trailing input '" + peek().text + "'");

    if (negated) {
      if (!constraints.empty()) throw ParseError(first_constraint_pos, "f-constraint under negation");
      return NegPpFormula{std::move(core)};
    }
    if (!constraints.empty()) return PpStarFormula{std::move(core), std::move(constraints)};
    return core;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const { return toks_[std::min(idx_ + ahead, toks_.size() - 1)]; }
  const Token& next() { return toks_[idx_ < toks_.size() - 1 ? idx_++ : idx_]; }
  bool is_punct(const char* p) const { return peek().kind == Tok::Punct && peek().text == p; }

  const Token& expect_name(const char* what) {
    if (peek().kind != Tok::Name) throw ParseError(peek().pos, std::string("expected ") + what);
    return next();
  }
  void expect_punct(const char* p) {
    if (!is_punct(p)) throw ParseError(peek().pos, std::string("expected '") + p + "'");
    next();
  }

  Term zero_term() const {
    Term t;
    t.free.assign(formula_->free_arity(), 0);
    t.bound.assign(formula_->bound_arity(), 0);
    return t;
  }

  // Adds coef * name to t.
  void add_name(Term& t, const Token& tok, const Integer& coef) {
    const auto& bn = formula_->bound_names;
    if (auto it = std::find(bn.begin(), bn.end(), tok.text); it != bn.end()) {
      t.bound[static_cast<std::size_t>(it - bn.begin())] += coef;
      return;
    }
    const auto& fn = formula_->free_names;
    if (auto it = std::find(fn.begin(), fn.end(), tok.text); it != fn.end()) {
      t.free[static_cast<std::size_t>(it - fn.begin())] += coef;
      return;
    }
    if (std::binary_search(sig_.params.begin(), sig_.params.end(), tok.text)) {
      Integer& c = t.params[tok.text];
      c += coef;
      if (c == 0) t.params.erase(tok.text);
      return;
    }
    throw ParseError(tok.pos, "unknown variable or parameter: " + tok.text);
  }

  void parse_mono(Term& t, bool negative) {
    if (is_punct("-")) {
      next();
      negative = !negative;
    }
    const Token& head = peek();
    if (head.kind == Tok::Int) {
      next();
      Integer coef(head.text);
      if (negative) coef = -coef;
      bool star = false;
      if (is_punct("*")) {
        next();
        star = true;
      }
      if (peek().kind == Tok::Name && !(peek(1).kind == Tok::Punct && peek(1).text == "(")) {
        add_name(t, next(), coef);
      } else {
        if (star) throw ParseError(peek().pos, "expected a name after '*'");
        // 0 is always available; other constants are multiples of the unit.
        if (coef != 0) {
          if (!sig_.unit_param) throw ParseError(head.pos, "integer constant without a unit parameter");
          if (!std::binary_search(sig_.params.begin(), sig_.params.end(), *sig_.unit_param))
            throw ParseError(head.pos, "unit parameter is not declared");
        }
        t.constant += coef;
      }
    } else if (head.kind == Tok::Name) {
      if (reserved(head.text)) throw ParseError(head.pos, "reserved name in term: " + head.text);
      next();
      add_name(t, head, negative ? Integer(-1) : Integer(1));
    } else {
      throw ParseError(head.pos, "expected a term");
    }
  }

  Term parse_term() {
    Term t = zero_term();
    parse_mono(t, false);
    while (is_punct("+") || is_punct("-")) {
      bool negative = next().text == "-";
      parse_mono(t, negative);
    }
    return t;
  }

  Atom parse_predicate_atom() {
    const Token& name = next();
    auto it = sig_.predicates.find(name.text);
    if (it == sig_.predicates.end()) throw ParseError(name.pos, "unknown predicate: " + name.text);
    expect_punct("(");
    Atom a{name.text, {}};
    a.args.push_back(parse_term());
    while (is_punct(",")) {
      next();
      a.args.push_back(parse_term());
    }
    expect_punct(")");
    if (a.args.size() != it->second)
      throw ParseError(name.pos, "arity mismatch for " + name.text + ": expected " + std::to_string(it->second) +
                                     ", got " + std::to_string(a.args.size()));
    return a;
  }

  Atom parse_equation() {
    Term lhs = parse_term();
    expect_punct("=");
    Term rhs = parse_term();
    for (std::size_t i = 0; i < lhs.free.size(); ++i) lhs.free[i] -= rhs.free[i];
    for (std::size_t i = 0; i < lhs.bound.size(); ++i) lhs.bound[i] -= rhs.bound[i];
    for (const auto& [name, c] : rhs.params) {
      Integer& x = lhs.params[name];
      x -= c;
      if (x == 0) lhs.params.erase(name);
    }
    lhs.constant -= rhs.constant;
    return Atom{kEqPredicate, {std::move(lhs)}};
  }

  Rational parse_rational_literal() {
    std::size_t pos = peek().pos;
    std::string text;
    if (is_punct("-")) {
      next();
      text = "-";
    }
    if (peek().kind != Tok::Int) throw ParseError(peek().pos, "malformed rational");
    text += next().text;
    if (is_punct("/")) {
      next();
      if (peek().kind != Tok::Int) throw ParseError(peek().pos, "malformed rational");
      text += "/" + next().text;
    }
    try {
      return parse_rational(text);
    } catch (const std::invalid_argument& e) {
      throw ParseError(pos, std::string("malformed rational: ") + e.what());
    }
  }

  void parse_f_constraint(std::map<std::size_t, TorusPoint>& constraints) {
    const Token& ftok = next();
    expect_punct("(");
    const Token& var = expect_name("variable in f-constraint");
    std::size_t index = 0;
    const auto& fn = formula_->free_names;
    const auto& bn = formula_->bound_names;
    if (auto it = std::find(bn.begin(), bn.end(), var.text); it != bn.end()) {
      index = fn.size() + static_cast<std::size_t>(it - bn.begin());
    } else if (auto jt = std::find(fn.begin(), fn.end(), var.text); jt != fn.end()) {
      index = static_cast<std::size_t>(jt - fn.begin());
    } else {
      throw ParseError(var.pos, "f-constraint on unknown variable: " + var.text);
    }
    expect_punct(")");
    expect_punct("=");
    std::vector<Rational> coords;
    std::size_t value_pos = peek().pos;
    if (is_punct("(")) {
      next();
      coords.push_back(parse_rational_literal());
      while (is_punct(",")) {
        next();
        coords.push_back(parse_rational_literal());
      }
      expect_punct(")");
    } else {
      coords.push_back(parse_rational_literal());
    }
    if (sig_.torus_dim == 0) throw ParseError(ftok.pos, "f-constraint but the torus has dimension 0");
    if (coords.size() != sig_.torus_dim)
      throw ParseError(value_pos, "torus point has " + std::to_string(coords.size()) + " coordinates, expected " +
                                      std::to_string(sig_.torus_dim));
    if (constraints.count(index)) throw ParseError(ftok.pos, "second f-constraint on variable " + var.text);
    constraints.emplace(index, TorusPoint(std::move(coords)));
  }

  std::vector<Token> toks_;
  std::size_t idx_ = 0;
  const Signature& sig_;
  const PpFormula* formula_ = nullptr;
};

}  // namespace

Formula parse(std::string_view text, const Signature& sig) { return Parser(text, sig).run(); }

PpFormula parse_pp(std::string_view text, const Signature& sig) {
  Formula f = parse(text, sig);
  if (auto* p = std::get_if<PpFormula>(&f)) return std::move(*p);
  throw ParseError(0, "expected a pp formula (no negation, no f-constraints)");
}

PpStarFormula parse_ppstar(std::string_view text, const Signature& sig) {
  Formula f = parse(text, sig);
  if (auto* p = std::get_if<PpStarFormula>(&f)) return std::move(*p);
  if (auto* p = std::get_if<PpFormula>(&f)) return PpStarFormula{std::move(*p), {}};
  throw ParseError(0, "expected a pp* formula, not a negation");
}

std::vector<std::string> scan_free_variables(std::string_view text, const std::vector<std::string>& params) {
  auto toks = lex(text);
  std::set<std::string> bound;
  std::vector<std::string> out;
  for (std::size_t i = 0; i < toks.size(); ++i) {
    const Token& t = toks[i];
    if (t.kind != Tok::Name) continue;
    if (t.text == "E") {
      for (std::size_t j = i + 1; j < toks.size() && toks[j].kind == Tok::Name; j += 2) {
        bound.insert(toks[j].text);
        if (!(toks[j + 1].kind == Tok::Punct && toks[j + 1].text == ",")) break;
      }
      continue;
    }
    bool call = i + 1 < toks.size() && toks[i + 1].kind == Tok::Punct && toks[i + 1].text == "(";
    if (call || reserved(t.text) || bound.count(t.text)) continue;
    if (std::find(params.begin(), params.end(), t.text) != params.end()) continue;
    if (std::find(out.begin(), out.end(), t.text) == out.end()) out.push_back(t.text);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Rendering

std::string render(const Term& t, const PpFormula& ctx) {
  std::vector<std::string> parts;
  auto mono = [&](const Integer& c, const std::string& name) {
    if (c == 0) return;
    parts.push_back(c == 1 ? name : c.str() + "*" + name);
  };
  for (std::size_t i = 0; i < t.free.size(); ++i) mono(t.free[i], ctx.free_names[i]);
  for (std::size_t i = 0; i < t.bound.size(); ++i) mono(t.bound[i], ctx.bound_names[i]);
  for (const auto& [name, c] : t.params) mono(c, name);
  if (t.constant != 0) parts.push_back(t.constant.str());
  if (parts.empty()) return "0";
  std::string s = parts[0];
  for (std::size_t i = 1; i < parts.size(); ++i) s += " + " + parts[i];
  return s;
}

namespace {

std::string render_prefix(const PpFormula& f) {
  std::string s;
  std::size_t next = 0;
  for (std::size_t block : f.blocks) {
    s += "E ";
    for (std::size_t i = 0; i < block; ++i) {
      if (i) s += ", ";
      s += f.bound_names[next++];
    }
    s += ". ";
  }
  return s;
}

std::string render_atoms(const PpFormula& f) {
  std::string s;
  for (std::size_t i = 0; i < f.atoms.size(); ++i) {
    if (i) s += " & ";
    const Atom& a = f.atoms[i];
    s += a.predicate + "(";
    for (std::size_t j = 0; j < a.args.size(); ++j) {
      if (j) s += ", ";
      s += render(a.args[j], f);
    }
    s += ")";
  }
  return s;
}

}  // namespace

std::string render(const PpFormula& f) { return render_prefix(f) + render_atoms(f); }

std::string render(const PpStarFormula& f) {
  std::string s = render(f.core);
  for (const auto& [index, value] : f.f_constraints) {
    const auto& name = index < f.core.free_arity() ? f.core.free_names[index]
                                                   : f.core.bound_names[index - f.core.free_arity()];
    s += " & f(" + name + ") = " + value.to_string();
  }
  return s;
}

std::string render(const NegPpFormula& f) { return "! " + render(f.inner); }

std::string render(const Formula& f) {
  return std::visit([](const auto& g) { return render(g); }, f);
}

// ---------------------------------------------------------------------------
// Normalization

namespace {

struct Renumbered {
  PpFormula core;
  std::vector<std::size_t> bound_map;  // old bound index -> new, or npos
};

Renumbered renumber(const PpFormula& f, const std::set<std::size_t>& extra_used_bound) {
  const std::size_t k = f.bound_arity();
  std::vector<bool> used(k, false);
  for (const auto& a : f.atoms)
    for (const auto& t : a.args)
      for (std::size_t i = 0; i < k; ++i)
        if (t.bound[i] != 0) used[i] = true;
  for (std::size_t i : extra_used_bound) used[i] = true;

  Renumbered r;
  r.core.free_names = f.free_names;
  r.bound_map.assign(k, static_cast<std::size_t>(-1));
  for (std::size_t i = 0; i < k; ++i)
    if (used[i]) {
      r.bound_map[i] = r.core.bound_names.size();
      r.core.bound_names.push_back(f.bound_names[i]);
    }
  if (!r.core.bound_names.empty()) r.core.blocks = {r.core.bound_names.size()};
  for (const auto& a : f.atoms) {
    Atom na{a.predicate, {}};
    for (const auto& t : a.args) {
      Term nt{t.free, IntVector(r.core.bound_names.size()), t.params, t.constant};
      for (std::size_t i = 0; i < k; ++i)
        if (used[i]) nt.bound[r.bound_map[i]] = t.bound[i];
      na.args.push_back(std::move(nt));
    }
    if (std::find(r.core.atoms.begin(), r.core.atoms.end(), na) == r.core.atoms.end())
      r.core.atoms.push_back(std::move(na));
  }
  return r;
}

}  // namespace

PpFormula normalize_pp(const PpFormula& f) { return renumber(f, {}).core; }

NormalizedFormula normalize(const Formula& f) {
  NormalizedFormula out;
  if (const auto* star = std::get_if<PpStarFormula>(&f)) {
    const std::size_t n = star->core.free_arity();
    std::set<std::size_t> constrained;
    for (const auto& [index, value] : star->f_constraints)
      if (index >= n) constrained.insert(index - n);
    Renumbered r = renumber(star->core, constrained);
    PpStarFormula ns{std::move(r.core), {}};
    for (const auto& [index, value] : star->f_constraints)
      ns.f_constraints.emplace(index < n ? index : n + r.bound_map[index - n], value);
    out.ast = std::move(ns);
  } else if (const auto* neg = std::get_if<NegPpFormula>(&f)) {
    out.ast = NegPpFormula{normalize_pp(neg->inner)};
  } else {
    out.ast = normalize_pp(std::get<PpFormula>(f));
  }

  const PpFormula& core = core_of(out.ast);
  std::set<std::string> params;
  for (const auto& a : core.atoms)
    for (const auto& t : a.args)
      for (const auto& [name, c] : t.params) params.insert(name);
  out.param_slots.assign(params.begin(), params.end());
  const std::size_t n = core.free_arity(), k = core.bound_arity(), p = out.param_slots.size();
  for (const auto& a : core.atoms) {
    IntMatrix m(a.args.size(), n + k + p + 1);
    for (std::size_t r = 0; r < a.args.size(); ++r) {
      const Term& t = a.args[r];
      for (std::size_t i = 0; i < n; ++i) m(r, i) = t.free[i];
      for (std::size_t i = 0; i < k; ++i) m(r, n + i) = t.bound[i];
      for (std::size_t i = 0; i < p; ++i) {
        auto it = t.params.find(out.param_slots[i]);
        if (it != t.params.end()) m(r, n + k + i) = it->second;
      }
      m(r, n + k + p) = t.constant;
    }
    out.atom_matrices.push_back(std::move(m));
  }
  return out;
}

}  // namespace ppstar
