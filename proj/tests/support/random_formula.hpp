#pragma once

#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "semsyn/formula.hpp"
#include "semsyn/letter.hpp"

namespace semsyn::testing {

/// Random NNF formula with at most `budget` constructor applications.
inline Formula random_formula(std::mt19937_64& rng, const std::vector<PropId>& props, int budget) {
  std::uniform_int_distribution<int> pick(0, 8);
  auto lit = [&] {
    PropId p = props[rng() % props.size()];
    return (rng() & 1U) ? prop(p) : neg_prop(p);
  };
  if (budget <= 1) return lit();
  switch (pick(rng)) {
    case 0:
    case 1:
      return lit();
    case 2: {
      int l = 1 + static_cast<int>(rng() % (budget - 1));
      return make_and(random_formula(rng, props, l), random_formula(rng, props, budget - l));
    }
    case 3: {
      int l = 1 + static_cast<int>(rng() % (budget - 1));
      return make_or(random_formula(rng, props, l), random_formula(rng, props, budget - l));
    }
    case 4:
      return make_next(random_formula(rng, props, budget - 1));
    case 5:
      return make_finally(random_formula(rng, props, budget - 1));
    case 6:
      return make_globally(random_formula(rng, props, budget - 1));
    case 7: {
      int l = 1 + static_cast<int>(rng() % (budget - 1));
      return make_until(random_formula(rng, props, l), random_formula(rng, props, budget - l));
    }
    default: {
      int l = 1 + static_cast<int>(rng() % (budget - 1));
      return make_release(random_formula(rng, props, l), random_formula(rng, props, budget - l));
    }
  }
}

inline Letter random_letter(std::mt19937_64& rng, const std::vector<PropId>& props) {
  Letter l;
  for (PropId p : props) l.set(p, rng() & 1U);
  return l;
}

inline LassoWord random_lasso(std::mt19937_64& rng, const std::vector<PropId>& props, int maxStem = 3, int maxLoop = 3) {
  LassoWord w;
  int s = static_cast<int>(rng() % (maxStem + 1));
  int l = 1 + static_cast<int>(rng() % maxLoop);
  for (int i = 0; i < s; ++i) w.stem.push_back(random_letter(rng, props));
  for (int i = 0; i < l; ++i) w.loop.push_back(random_letter(rng, props));
  return w;
}

inline std::vector<PropId> prop_ids(const std::vector<std::string>& names) {
  std::vector<PropId> out;
  for (const auto& n : names) out.push_back(intern_prop(n));
  return out;
}

}  // namespace semsyn::testing

namespace semsyn {
// Readable gtest failure output.
inline void PrintTo(Formula f, std::ostream* os) { *os << (f.node() ? to_string(f) : std::string("<null>")); }
}  // namespace semsyn
