#pragma once

// Premise pools: original premises from rule templates, derived premises
// obtained by combining pool members, and unrelated distractors over fresh
// predicates. Every pool is validated with the logic engine as it grows.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pqa/engine.hpp"
#include "pqa/formula.hpp"
#include "pqa/lexicon.hpp"
#include "pqa/rng.hpp"

namespace pqa {

enum class InferenceRule { ModusPonens, HypotheticalSyllogism, DeMorgan, Existential };
std::string_view to_string(InferenceRule r);

// The three premise shapes emitted by the generator, all over variable x.
struct PremiseShape {
  enum class Kind { Rule, Universal, Existential };
  Kind kind = Kind::Rule;
  LiteralChain lhs;  // antecedent for Rule, the whole body otherwise
  LiteralChain rhs;  // Rule only

  Formula to_formula() const;
};
std::optional<PremiseShape> premise_shape(const Formula& f);

struct OriginalPremise {
  Formula formula;
  InferenceRule rule;
};

struct DerivedPremise {
  Formula formula;
  std::vector<int> parents;  // zero-based positions in chainable()
  int depth = 2;
};

struct PremiseParams {
  int s = 1;
  int c = 1;
  int d = 0;
};

struct PremisePool {
  std::vector<OriginalPremise> original;
  std::vector<DerivedPremise> derived;
  std::vector<Formula> unrelated;
  std::uint64_t seed = 0;
  PremiseParams params;

  // original followed by derived
  std::vector<Formula> chainable() const;
  std::vector<Formula> all() const;
  int depth(std::size_t chainable_index) const;
};

// One premise from the given template, taking predicate names from the
// front of `predicates` (at least three are needed).
Formula generate_original(Rng& rng, const std::vector<std::string>& predicates, InferenceRule rule);
Formula generate_original(Rng& rng, const std::vector<std::string>& predicates);

// Combines two pool premises. With a != b: hypothetical syllogism,
// conjunction introduction, contraposition of both, or existential modus
// ponens, tried in random order. With a == b: contraposition or
// simplification of the single premise. The result is entailed by {a, b}.
std::optional<Formula> derive(const Formula& a, const Formula& b, Rng& rng);

// Draws s originals, d derived and s - c unrelated premises. Synthetic
// predicates are added to `lexicon` when its vocabulary runs out.
PremisePool generate_premises(int s, int c, int d, std::uint64_t seed, SolverBackend& backend, Lexicon& lexicon);
PremisePool generate_premises(int s, int c, int d, std::uint64_t seed);

}  // namespace pqa
