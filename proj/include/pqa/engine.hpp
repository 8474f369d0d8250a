#pragma once

// Decision procedures for the monadic fragment: satisfiability, three-valued
// entailment and minimum supporting-premise sets.
//
// The internal backend grounds the input over a finite domain and hands the
// propositional encoding to a CDCL solver. Monadic formulas without equality
// have models of at most 2^p elements (p = distinct predicates), plus one
// element per constant. When every quantifier body is quantifier-free, a
// model only needs the constants and one witness per existential in
// negation normal form, which keeps the grounding small.

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pqa/formula.hpp"

namespace pqa {

enum class EntailmentStatus { Yes, No, Uncertain };

std::string_view to_string(EntailmentStatus s);

class SolverBackend {
 public:
  virtual ~SolverBackend() = default;
  virtual bool satisfiable(std::span<const Formula> formulas) = 0;
  virtual std::string name() const = 0;
};

class InternalBackend final : public SolverBackend {
 public:
  static constexpr int kDefaultMaxPredicates = 64;
  // Full 2^p grounding, needed for nested quantifiers, is limited to this
  // many predicates.
  static constexpr int kMaxNestedPredicates = 12;

  explicit InternalBackend(int max_predicates = kDefaultMaxPredicates) : max_predicates_(max_predicates) {}

  bool satisfiable(std::span<const Formula> formulas) override;
  std::string name() const override { return "internal"; }

  // Size of the grounding domain chosen for `formulas`.
  int domain_size(std::span<const Formula> formulas) const;

 private:
  int max_predicates_;
};

// "internal", "internal:<max predicates>" or "external:<command line>".
struct BackendSpec {
  enum class Kind { Internal, External };
  Kind kind = Kind::Internal;
  int max_predicates = InternalBackend::kDefaultMaxPredicates;
  std::string command;

  static BackendSpec parse(std::string_view text);
  std::string to_string() const;
};

std::unique_ptr<SolverBackend> make_backend(const BackendSpec& spec);

bool is_satisfiable(std::span<const Formula> premises, SolverBackend& backend);

// Throws InconsistentPremises when the premises have no model.
EntailmentStatus entails(std::span<const Formula> premises, const Formula& goal, SolverBackend& backend);

// One-based, strictly increasing premise indices.
struct SupportSet {
  std::vector<int> indices;
  // False when the premise count exceeded the search cap and the set came
  // from deletion-based shrinking instead.
  bool minimum = true;

  friend bool operator==(const SupportSet&, const SupportSet&) = default;
};

struct SupportOptions {
  std::size_t size_cap = 16;
};

// Minimum-cardinality subset S with entails(S, goal) == status; ties go to
// the lexicographically smallest index tuple. Throws NoSupport when status
// is Uncertain or does not match the premises.
SupportSet minimal_support(std::span<const Formula> premises, const Formula& goal, EntailmentStatus status,
                           SolverBackend& backend, SupportOptions options = {});

// Every minimum-cardinality support, in lexicographic order, stopping after
// `limit` sets.
std::vector<SupportSet> minimum_supports(std::span<const Formula> premises, const Formula& goal,
                                         EntailmentStatus status, SolverBackend& backend, std::size_t limit = 2);

// True when `subset` (one-based) alone yields `status` for goal, assuming the
// subset is consistent.
bool supports(std::span<const Formula> premises, const std::vector<int>& subset, const Formula& goal,
              EntailmentStatus status, SolverBackend& backend);

// Premises that share at least one predicate with `goal`, one-based. Used as
// the idx of Uncertain answers.
std::vector<int> related_premises(std::span<const Formula> premises, const Formula& goal);

// Finite interpretation over {0, ..., domain_size-1}; predicate extensions
// are bitmasks over the domain.
struct Model {
  int domain_size = 1;
  std::map<std::string, std::uint32_t> extension;
  std::map<std::string, int> constants;
};

bool holds(const Model& model, const Formula& f);

// Every interpretation of exactly `domain_size` elements that satisfies all
// premises. The signature is the premises' predicates and constants plus the
// extras. Requires at most 4 predicates and domain_size <= 2^p.
std::vector<Model> enumerate_models(std::span<const Formula> premises, int domain_size,
                                    const std::vector<std::string>& extra_predicates = {},
                                    const std::vector<std::string>& extra_constants = {});

}  // namespace pqa
