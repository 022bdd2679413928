#include "ppstar/error.hpp"
#include "ppstar/structure.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace ppstar {

namespace {

using nlohmann::json;

const json& field(const json& obj, const std::string& path, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(path + "/" + key, std::string("missing required field '") + key + "'");
  return *it;
}

Integer as_integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw SchemaError(path, "expected an integer");
  if (j.is_number_unsigned()) return Integer(j.get<std::uint64_t>());
  return Integer(j.get<std::int64_t>());
}

std::size_t as_count(const json& j, const std::string& path) {
  if (!j.is_number_integer() || (j.is_number_integer() && !j.is_number_unsigned() && j.get<std::int64_t>() < 0))
    throw SchemaError(path, "expected a non-negative integer");
  return j.get<std::size_t>();
}

IntVector as_int_vector(const json& j, const std::string& path) {
  if (!j.is_array()) throw SchemaError(path, "expected an array of integers");
  IntVector v;
  for (std::size_t i = 0; i < j.size(); ++i) v.push_back(as_integer(j[i], path + "/" + std::to_string(i)));
  return v;
}

std::vector<IntVector> as_int_rows(const json& j, const std::string& path) {
  if (!j.is_array()) throw SchemaError(path, "expected an array of integer arrays");
  std::vector<IntVector> rows;
  for (std::size_t i = 0; i < j.size(); ++i) rows.push_back(as_int_vector(j[i], path + "/" + std::to_string(i)));
  return rows;
}

// Canonical "p/q": q > 0, gcd(p, q) = 1, 0 <= p < q.
Rational as_rational_literal(const json& j, const std::string& path) {
  if (!j.is_string()) throw SchemaError(path, "expected a rational string \"p/q\"");
  const std::string text = j.get<std::string>();
  auto slash = text.find('/');
  auto digits = [](const std::string& s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
  };
  if (slash == std::string::npos || !digits(text.substr(0, slash)) || !digits(text.substr(slash + 1)))
    throw SchemaError(path, "malformed rational '" + text + "', expected \"p/q\"");
  Integer p(text.substr(0, slash)), q(text.substr(slash + 1));
  if (q == 0) throw SchemaError(path, "zero denominator in '" + text + "'");
  if (gcd(p, q) != 1 || p >= q)
    throw SchemaError(path, "rational '" + text + "' is not canonical (need gcd(p,q)=1 and 0 <= p < q)");
  return Rational(p, q);
}

void reject_unknown_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) throw SchemaError(path + "/" + it.key(), "unknown field '" + it.key() + "'");
  }
}

StructureSpec spec_from_json(const json& root) {
  if (!root.is_object()) throw SchemaError("", "structure file must be a JSON object");
  reject_unknown_keys(root, "", {"name", "ambient_rank", "relations", "subgroups", "character", "parameters"});
  StructureSpec spec;
  const json& name = field(root, "", "name");
  if (!name.is_string()) throw SchemaError("/name", "expected a string");
  spec.name = name.get<std::string>();
  spec.ambient_rank = as_count(field(root, "", "ambient_rank"), "/ambient_rank");
  spec.relations = as_int_rows(field(root, "", "relations"), "/relations");

  const json& subgroups = field(root, "", "subgroups");
  if (!subgroups.is_object()) throw SchemaError("/subgroups", "expected an object");
  for (auto it = subgroups.begin(); it != subgroups.end(); ++it) {
    const std::string path = "/subgroups/" + it.key();
    if (!it->is_object()) throw SchemaError(path, "expected an object");
    reject_unknown_keys(*it, path, {"arity", "generators"});
    StructureSpec::SubgroupSpec sub;
    sub.arity = as_count(field(*it, path, "arity"), path + "/arity");
    sub.generators = as_int_rows(field(*it, path, "generators"), path + "/generators");
    spec.subgroups.emplace(it.key(), std::move(sub));
  }

  const json& character = field(root, "", "character");
  if (!character.is_object()) throw SchemaError("/character", "expected an object");
  reject_unknown_keys(character, "/character", {"torus_dim", "matrix"});
  spec.torus_dim = as_count(field(character, "/character", "torus_dim"), "/character/torus_dim");
  const json& matrix = field(character, "/character", "matrix");
  if (!matrix.is_array()) throw SchemaError("/character/matrix", "expected an array of rows");
  for (std::size_t r = 0; r < matrix.size(); ++r) {
    const std::string rpath = "/character/matrix/" + std::to_string(r);
    if (!matrix[r].is_array()) throw SchemaError(rpath, "expected an array of rational strings");
    std::vector<Rational> row;
    for (std::size_t c = 0; c < matrix[r].size(); ++c)
      row.push_back(as_rational_literal(matrix[r][c], rpath + "/" + std::to_string(c)));
    spec.character.push_back(std::move(row));
  }

  const json& parameters = field(root, "", "parameters");
  if (!parameters.is_object()) throw SchemaError("/parameters", "expected an object");
  for (auto it = parameters.begin(); it != parameters.end(); ++it)
    spec.parameters.emplace(it.key(), as_int_vector(*it, "/parameters/" + it.key()));
  return spec;
}

}  // namespace

Structure structure_from_json(std::string_view text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError("", std::string("invalid JSON: ") + e.what());
  }
  return Structure::build(spec_from_json(root));
}

Structure load_structure(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Precondition, "cannot read structure file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return structure_from_json(buf.str());
}

std::string structure_to_json(const Structure& s) {
  const StructureSpec spec = s.spec();
  auto ints = [](const IntVector& v) {
    json a = json::array();
    for (const auto& x : v) a.push_back(to_int64(x));
    return a;
  };
  json root;
  root["name"] = spec.name;
  root["ambient_rank"] = spec.ambient_rank;
  root["relations"] = json::array();
  for (const auto& r : spec.relations) root["relations"].push_back(ints(r));
  root["subgroups"] = json::object();
  for (const auto& [name, sub] : spec.subgroups) {
    json gens = json::array();
    for (const auto& g : sub.generators) gens.push_back(ints(g));
    root["subgroups"][name] = {{"arity", sub.arity}, {"generators", gens}};
  }
  json matrix = json::array();
  for (const auto& row : spec.character) {
    json r = json::array();
    for (const auto& q : row) r.push_back(to_string(frac(q)));
    matrix.push_back(r);
  }
  root["character"] = {{"torus_dim", spec.torus_dim}, {"matrix", matrix}};
  root["parameters"] = json::object();
  for (const auto& [name, v] : spec.parameters) root["parameters"][name] = ints(v);
  return root.dump(2);
}

}  // namespace ppstar
