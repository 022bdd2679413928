// ppstar command-line front end. Every command prints one JSON document
// (or aligned key/value text with --output text).
//
// Exit codes: 0 success, 1 domain failure (check mismatches, extend errors),
// 2 input or validation errors.

#include "ppstar/error.hpp"
#include "ppstar/finite.hpp"
#include "ppstar/formula.hpp"
#include "ppstar/solver.hpp"
#include "ppstar/structure.hpp"
#include "ppstar/types.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using ppstar::Error;
using ppstar::ErrorKind;
using ppstar::Integer;
using ppstar::IntVector;
using ppstar::Structure;
using json = nlohmann::ordered_json;

struct Options {
  std::string structure;
  std::uint64_t seed = 0;
  std::string caps = "1,2,2";
  bool no_saturate = false;
  std::string output = "json";
  std::string eps;
  std::string formula;
  std::string target;
  std::vector<std::string> by;
  std::string free;
  std::string tuple, tuple_a, tuple_b, element, value;
  std::size_t arity = 1;
  std::size_t trials = 100;
};

// Errors that end the run with exit code 2 and a JSON error document.
struct InputError {
  std::string message;
};

json number(const Integer& z) {
  if (z >= INT64_MIN && z <= INT64_MAX) return ppstar::to_int64(z);
  return z.str();
}

json ints(const IntVector& v) {
  json a = json::array();
  for (const auto& x : v) a.push_back(number(x));
  return a;
}

json lattice_rows(const ppstar::Lattice& l) {
  json rows = json::array();
  for (std::size_t r = 0; r < l.rank(); ++r) rows.push_back(ints(IntVector(l.basis().row(r).begin(), l.basis().row(r).end())));
  return rows;
}

json coset_json(const Structure& s, const ppstar::DefinableCoset& c) {
  json j;
  j["arity"] = c.arity();
  j["empty"] = c.is_empty();
  if (c.is_empty()) return j;
  j["rep"] = ints(s.reduce_tuple(c.rep()));
  j["group"] = lattice_rows(c.group());
  auto size = c.size(s);
  j["size"] = size.is_infinite() ? json("INFINITE") : number(size.value());
  return j;
}

json torus_coset_json(const ppstar::TorusCoset& c) {
  json j;
  j["rep"] = c.rep().to_string();
  j["annihilator"] = lattice_rows(c.group().annihilator());
  return j;
}

IntVector parse_tuple(const std::string& text, const char* flag) {
  IntVector out;
  if (text.empty()) return out;
  std::stringstream in(text);
  std::string part;
  while (std::getline(in, part, ',')) {
    auto b = part.find_first_not_of(' '), e = part.find_last_not_of(' ');
    if (b == std::string::npos) throw InputError{std::string(flag) + ": empty coordinate in \"" + text + "\""};
    part = part.substr(b, e - b + 1);
    std::size_t i = part[0] == '-' ? 1 : 0;
    if (i == part.size() || !std::all_of(part.begin() + static_cast<std::ptrdiff_t>(i), part.end(), ::isdigit))
      throw InputError{std::string(flag) + ": not an integer: \"" + part + "\""};
    out.emplace_back(part);
  }
  return out;
}

// A tuple of whole elements: the coordinate count must be a multiple of N.
IntVector parse_elements(const Structure& s, const std::string& text, const char* flag) {
  IntVector v = parse_tuple(text, flag);
  const std::size_t n = s.ambient_rank();
  if ((n == 0 && !v.empty()) || (n > 0 && v.size() % n != 0))
    throw InputError{std::string(flag) + ": " + std::to_string(v.size()) +
                     " coordinates is not a whole number of elements of rank " + std::to_string(n)};
  return v;
}

std::size_t tuple_arity(const Structure& s, const IntVector& v) {
  return s.ambient_rank() == 0 ? 0 : v.size() / s.ambient_rank();
}

ppstar::TorusPoint parse_point(const std::string& text, std::size_t dim) {
  std::string body = text;
  auto b = body.find_first_not_of(' '), e = body.find_last_not_of(' ');
  body = b == std::string::npos ? "" : body.substr(b, e - b + 1);
  if (!body.empty() && body.front() == '(' && body.back() == ')') body = body.substr(1, body.size() - 2);
  std::vector<ppstar::Rational> coords;
  std::stringstream in(body);
  std::string part;
  while (std::getline(in, part, ',')) {
    try {
      auto pb = part.find_first_not_of(' '), pe = part.find_last_not_of(' ');
      coords.push_back(ppstar::parse_rational(pb == std::string::npos ? "" : part.substr(pb, pe - pb + 1)));
    } catch (const std::exception& ex) {
      throw InputError{"--value: malformed rational \"" + part + "\""};
    }
  }
  if (coords.size() != dim)
    throw InputError{"--value: expected " + std::to_string(dim) + " coordinates, got " + std::to_string(coords.size())};
  return ppstar::TorusPoint(std::move(coords));
}

std::vector<std::string> free_variables(const Structure& s, const Options& o, const std::string& text) {
  if (!o.free.empty()) {
    std::vector<std::string> out;
    std::stringstream in(o.free);
    std::string part;
    while (std::getline(in, part, ','))
      if (!part.empty()) out.push_back(part);
    return out;
  }
  std::vector<std::string> params;
  for (const auto& [name, v] : s.parameters()) params.push_back(name);
  return ppstar::scan_free_variables(text, params);
}

ppstar::Caps caps_of(const Options& o) {
  ppstar::Caps caps = ppstar::parse_caps(o.caps);
  caps.saturate = !o.no_saturate;
  return caps;
}

void require_finite(const Structure& s, const char* command) {
  if (!s.is_finite()) throw InputError{std::string(command) + " requires a finite structure"};
}

void require_arity(const Structure& s, const IntVector& v, std::size_t arity, const char* flag) {
  if (tuple_arity(s, v) != arity)
    throw InputError{std::string(flag) + " has " + std::to_string(tuple_arity(s, v)) + " elements, expected " +
                     std::to_string(arity)};
}

// Returns the report and the exit code.
std::pair<json, int> run_command(const std::string& command, const Options& o) {
  if (command == "validate") {
    const Structure s = ppstar::load_structure(o.structure);
    json j;
    j["valid"] = true;
    json factors = json::array();
    for (const auto& d : s.invariant_factors()) factors.push_back(number(d));
    j["invariant_factors"] = factors;
    if (s.free_rank() > 0) j["free_rank"] = s.free_rank();
    return {j, 0};
  }

  const Structure s = ppstar::load_structure(o.structure);

  if (command == "eval") {
    auto f = ppstar::parse(o.formula, s.signature(free_variables(s, o, o.formula)));
    if (!std::holds_alternative<ppstar::PpFormula>(f))
      throw InputError{"eval takes a pp formula (no f-constraints, no negation)"};
    return {coset_json(s, ppstar::eval_pp(s, std::get<ppstar::PpFormula>(f))), 0};
  }

  if (command == "satisfies") {
    auto f = ppstar::parse(o.formula, s.signature(free_variables(s, o, o.formula)));
    const IntVector t = parse_elements(s, o.tuple, "--tuple");
    require_arity(s, t, ppstar::core_of(f).free_arity(), "--tuple");
    bool result = false;
    if (!o.eps.empty()) {
      if (std::holds_alternative<ppstar::NegPpFormula>(f)) throw InputError{"--eps does not apply to negated formulas"};
      if (ppstar::core_of(f).bound_arity() > 0) throw InputError{"--eps applies to quantifier-free formulas only"};
      ppstar::Rational eps;
      try {
        eps = ppstar::parse_rational(o.eps);
      } catch (const std::exception&) {
        throw InputError{"--eps: malformed rational \"" + o.eps + "\""};
      }
      if (eps < 0) throw InputError{"--eps must be non-negative"};
      ppstar::PpStarFormula psi = std::holds_alternative<ppstar::PpStarFormula>(f)
                                      ? std::get<ppstar::PpStarFormula>(f)
                                      : ppstar::PpStarFormula{std::get<ppstar::PpFormula>(f), {}};
      result = ppstar::satisfies_ppstar_approx(s, psi, t, eps);
    } else if (auto* neg = std::get_if<ppstar::NegPpFormula>(&f)) {
      result = !ppstar::eval_pp(s, neg->inner).contains(t);
    } else if (auto* pp = std::get_if<ppstar::PpFormula>(&f)) {
      result = ppstar::eval_pp(s, *pp).contains(t);
    } else {
      result = ppstar::satisfies_ppstar(s, std::get<ppstar::PpStarFormula>(f), t);
    }
    return {json{{"satisfied", result}}, 0};
  }

  if (command == "cover") {
    const auto free = free_variables(s, o, o.target);
    const auto sig = s.signature(free);
    auto eval = [&](const std::string& text) {
      auto f = ppstar::parse(text, sig);
      if (!std::holds_alternative<ppstar::PpFormula>(f))
        throw InputError{"cover takes pp formulas (no f-constraints, no negation): " + text};
      return ppstar::eval_pp(s, std::get<ppstar::PpFormula>(f));
    };
    const auto x = eval(o.target);
    if (x.is_empty()) throw InputError{"--target defines the empty set"};
    std::vector<ppstar::DefinableCoset> covers;
    for (const auto& text : o.by) covers.push_back(eval(text));
    return {json{{"covered", ppstar::cover_decide(x, covers)}}, 0};
  }

  if (command == "kernel") return {coset_json(s, ppstar::kernel_and_fiber(s, std::nullopt)), 0};

  if (command == "fiber") return {coset_json(s, ppstar::kernel_and_fiber(s, parse_point(o.value, s.torus_dim()))), 0};

  if (command == "type") {
    require_finite(s, "type");
    const IntVector t = parse_elements(s, o.tuple, "--tuple");
    const ppstar::Caps caps = caps_of(o);
    const auto basis = ppstar::basis_generate(s, tuple_arity(s, t), caps);
    const auto fp = ppstar::fingerprint(s, t, basis);
    json j;
    j["arity"] = basis.arity;
    j["basis_size"] = basis.formulas.size();
    j["saturated"] = basis.saturated;
    j["f_values"] = fp.f_values.to_string();
    json entries = json::array();
    for (std::size_t i = 0; i < basis.formulas.size(); ++i) {
      json e;
      e["formula"] = basis.formulas[i].text;
      e["image"] = fp.entries[i] ? torus_coset_json(*fp.entries[i]) : json(nullptr);
      entries.push_back(e);
    }
    j["entries"] = entries;
    return {j, 0};
  }

  if (command == "eqtype") {
    const IntVector a = parse_elements(s, o.tuple_a, "--tuple-a");
    const IntVector b = parse_elements(s, o.tuple_b, "--tuple-b");
    require_arity(s, b, tuple_arity(s, a), "--tuple-b");
    const auto basis = ppstar::basis_generate(s, tuple_arity(s, a), caps_of(o));
    const auto cmp = ppstar::compare_types(s, a, b, basis);
    json j;
    j["equal"] = cmp.equal;
    if (!cmp.equal) j["witness"] = cmp.witness;
    return {j, 0};
  }

  if (command == "extend") {
    require_finite(s, "extend");
    const IntVector a = parse_elements(s, o.tuple_a, "--tuple-a");
    const IntVector b = parse_elements(s, o.tuple_b, "--tuple-b");
    const IntVector c = parse_elements(s, o.element, "--element");
    require_arity(s, b, tuple_arity(s, a), "--tuple-b");
    require_arity(s, c, 1, "--element");
    const IntVector d = ppstar::extend(s, a, b, c, caps_of(o));
    return {json{{"d", ints(d)}}, 0};
  }

  if (command == "orbit") {
    require_finite(s, "orbit");
    const IntVector a = parse_elements(s, o.tuple_a, "--tuple-a");
    const IntVector b = parse_elements(s, o.tuple_b, "--tuple-b");
    require_arity(s, b, tuple_arity(s, a), "--tuple-b");
    return {json{{"orbit_equal", ppstar::orbit_oracle(s, a, b)}}, 0};
  }

  if (command == "check") {
    require_finite(s, "check");
    const auto report = ppstar::check_theorem(s, o.arity, caps_of(o), o.trials, o.seed);
    return {json::parse(ppstar::report_to_json(report)), report.verdict == "PASS" ? 0 : 1};
  }

  throw InputError{"unknown command: " + command};
}

std::string render_text(const json& j) {
  std::size_t width = 0;
  for (const auto& [key, value] : j.items()) width = std::max(width, key.size());
  std::ostringstream out;
  for (const auto& [key, value] : j.items()) {
    out << key << std::string(width - key.size(), ' ') << "  ";
    if (value.is_string()) out << value.get<std::string>();
    else out << value.dump();
    out << "\n";
  }
  return out.str();
}

void emit(const json& j, const std::string& output) {
  if (output == "text") std::cout << render_text(j);
  else std::cout << j.dump(2) << "\n";
}

json error_json(const std::string& message, const char* key = nullptr, const json& where = nullptr,
                const char* kind = nullptr) {
  json e;
  if (key) e[key] = where;
  if (kind) e["kind"] = kind;
  e["message"] = message;
  return json{{"error", e}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Definability questions over abelian structures with a torus character"};
  app.require_subcommand(1, 1);
  Options o;

  struct Spec {
    const char* name;
    const char* help;
  };
  const std::vector<Spec> commands{
      {"validate", "check a structure file and print its invariant factors"},
      {"eval", "solution coset of a pp formula"},
      {"satisfies", "whether a tuple satisfies a pp, pp* or negated pp formula"},
      {"cover", "whether the target coset is covered by the --by cosets"},
      {"kernel", "the kernel of f"},
      {"fiber", "the fibre of f over --value"},
      {"type", "fingerprint of a tuple over the formula basis"},
      {"eqtype", "whether two tuples have the same pp*-type"},
      {"extend", "d such that (a, c) and (b, d) have the same type"},
      {"orbit", "whether an automorphism maps --tuple-a onto --tuple-b"},
      {"check", "cross-check type equality against the orbit oracle"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    const std::string cmd = name;
    sub->add_option("--structure", o.structure, "structure JSON file")->required();
    sub->add_option("--output", o.output, "json or text")->check(CLI::IsMember({"json", "text"}));
    if (cmd == "eval" || cmd == "satisfies") sub->add_option("--formula", o.formula, "formula text")->required();
    if (cmd == "eval" || cmd == "satisfies" || cmd == "cover")
      sub->add_option("--free", o.free, "free variables in order, comma-separated");
    if (cmd == "satisfies") {
      sub->add_option("--tuple", o.tuple, "comma-separated coordinates")->required();
      sub->add_option("--eps", o.eps, "tolerance p/q for quantifier-free f-constraints");
    }
    if (cmd == "cover") {
      sub->add_option("--target", o.target, "pp formula of the covered coset")->required();
      sub->add_option("--by", o.by, "pp formula of a covering coset (repeatable)");
    }
    if (cmd == "fiber") sub->add_option("--value", o.value, "torus point p/q or (p/q, ...)")->required();
    if (cmd == "type") sub->add_option("--tuple", o.tuple, "comma-separated coordinates")->required();
    if (cmd == "eqtype" || cmd == "extend" || cmd == "orbit") {
      sub->add_option("--tuple-a", o.tuple_a, "first tuple")->required();
      sub->add_option("--tuple-b", o.tuple_b, "second tuple")->required();
    }
    if (cmd == "extend") sub->add_option("--element", o.element, "the element c")->required();
    if (cmd == "type" || cmd == "eqtype" || cmd == "extend" || cmd == "check") {
      sub->add_option("--caps", o.caps, "k,atoms,coeff enumeration bounds");
      sub->add_flag("--no-saturate", o.no_saturate, "skip the endomorphism formulas");
    }
    if (cmd == "check") {
      sub->add_option("--arity", o.arity, "tuple arity m");
      sub->add_option("--trials", o.trials, "random pairs");
      sub->add_option("--seed", o.seed, "64-bit seed for the random pairs");
    }
  }

  if (argc > 1 && argv[1][0] != '-' &&
      std::none_of(commands.begin(), commands.end(), [&](const Spec& c) { return std::string(argv[1]) == c.name; })) {
    std::cerr << app.help();
    emit(error_json(std::string("unknown command: ") + argv[1]), "json");
    return 2;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << app.help();
    emit(error_json(e.what()), "json");
    return 2;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    auto [report, code] = run_command(command, o);
    emit(report, o.output);
    return code;
  } catch (const InputError& e) {
    emit(error_json(e.message), "json");
  } catch (const ppstar::SchemaError& e) {
    emit(error_json(e.what(), "path", e.path()), "json");
  } catch (const ppstar::ParseError& e) {
    emit(error_json(e.what(), "position", e.position()), "json");
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::TypeMismatch || e.kind() == ErrorKind::BasisIncomplete) {
      emit(error_json(e.what(), nullptr, nullptr, ppstar::to_string(e.kind())), "json");
      return 1;
    }
    emit(error_json(e.what(), nullptr, nullptr, ppstar::to_string(e.kind())), "json");
  } catch (const std::exception& e) {
    emit(error_json(e.what()), "json");
  }
  return 2;
}
