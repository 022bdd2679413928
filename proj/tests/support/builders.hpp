#pragma once

// Short constructors for test literals.

#include "ppstar/lattice.hpp"
#include "ppstar/structure.hpp"
#include "ppstar/torus.hpp"

#include <initializer_list>
#include <string>
#include <vector>

namespace ppstar::testing {

inline IntVector V(std::initializer_list<long> xs) {
  IntVector v;
  for (long x : xs) v.emplace_back(x);
  return v;
}

inline IntMatrix M(std::initializer_list<std::initializer_list<long>> rows, std::size_t cols = 0) {
  std::vector<IntVector> rs;
  for (auto r : rows) rs.push_back(V(r));
  if (cols == 0 && !rs.empty()) cols = rs.front().size();
  return IntMatrix::from_rows(rs, cols);
}

inline Lattice L(std::initializer_list<std::initializer_list<long>> rows, std::size_t cols = 0) {
  return hnf(M(rows, cols));
}

inline Rational Q(long p, long q = 1) { return Rational(p, q); }

inline TorusPoint T(std::initializer_list<Rational> xs) { return TorusPoint(std::vector<Rational>(xs)); }

inline std::string sample_path(const std::string& name) { return std::string(PPSTAR_SAMPLES_DIR) + "/" + name; }

inline Structure sample(const std::string& name) { return load_structure(sample_path(name)); }

}  // namespace ppstar::testing
