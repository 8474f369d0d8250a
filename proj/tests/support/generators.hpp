#pragma once

// Random formula generators shared by the property tests.

#include <string>
#include <vector>

#include "pqa/formula.hpp"
#include "pqa/rng.hpp"

namespace pqa::testing {

struct FormulaShape {
  int predicates = 4;      // P0 .. P{n-1}
  int constants = 0;       // a, b, c
  int max_depth = 3;       // connective depth inside a quantifier
  bool allow_nesting = false;
};

inline std::string pred_name(int i) { return "P" + std::to_string(i); }
inline std::string const_name(int i) { return std::string(1, static_cast<char>('a' + i)); }

namespace detail {

inline Formula random_body(Rng& rng, const FormulaShape& shape, const std::vector<std::string>& vars, int depth) {
  const bool leaf = depth <= 0 || rng.chance(0.3);
  if (leaf) {
    const std::string p = pred_name(static_cast<int>(rng.below(shape.predicates)));
    const bool use_const = shape.constants > 0 && (vars.empty() || rng.chance(0.25));
    Formula a = use_const ? ground(p, const_name(static_cast<int>(rng.below(shape.constants))))
                          : Formula::pred(p, Term::var(rng.pick(vars)));
    return rng.chance(0.3) ? Formula::negate(a) : a;
  }
  const auto roll = rng.below(shape.allow_nesting ? 7 : 5);
  switch (roll) {
    case 0:
      return Formula::negate(random_body(rng, shape, vars, depth - 1));
    case 1:
      return Formula::conj(random_body(rng, shape, vars, depth - 1), random_body(rng, shape, vars, depth - 1));
    case 2:
      return Formula::disj(random_body(rng, shape, vars, depth - 1), random_body(rng, shape, vars, depth - 1));
    case 3:
    case 4:
      return Formula::implies(random_body(rng, shape, vars, depth - 1), random_body(rng, shape, vars, depth - 1));
    default: {
      const std::string v = vars.size() == 1 ? "y" : "z";
      auto inner = vars;
      inner.push_back(v);
      Formula body = random_body(rng, shape, inner, depth - 1);
      return roll == 5 ? Formula::forall(v, body) : Formula::exists(v, body);
    }
  }
}

}  // namespace detail

// A closed formula: either a ground literal combination (when constants are
// available) or a quantifier over x with a random body.
inline Formula random_closed_formula(Rng& rng, const FormulaShape& shape) {
  if (shape.constants > 0 && rng.chance(0.2)) {
    return detail::random_body(rng, shape, {}, 1);
  }
  Formula body = detail::random_body(rng, shape, {"x"}, shape.max_depth);
  Formula q = rng.chance(0.6) ? Formula::forall("x", body) : Formula::exists("x", body);
  return rng.chance(0.1) ? Formula::negate(q) : q;
}

}  // namespace pqa::testing
