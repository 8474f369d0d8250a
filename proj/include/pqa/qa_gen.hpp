#pragma once

// Questions, answers, supporting indices and explanations for dataset
// records; record validation and dataset statistics.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pqa/engine.hpp"
#include "pqa/lexicon.hpp"
#include "pqa/premise_gen.hpp"
#include "pqa/record.hpp"
#include "pqa/rng.hpp"

namespace pqa {

struct QuestionSpec {
  QuestionKind kind = QuestionKind::YesNoUncertain;
  std::optional<Formula> goal;   // YNU
  std::vector<Formula> options;  // MC, in letter order
  NumericKind numeric = NumericKind::TotalCredits;
};

struct Solution {
  std::string answer;
  std::vector<int> idx;
  std::string explanation;
  EntailmentStatus status = EntailmentStatus::Uncertain;  // YNU and MC
};

struct GeneratedQuestion {
  QuestionSpec spec;
  std::string text;
  Solution solution;
};

// Template-rendered question text for a spec.
std::string question_text(const QuestionSpec& spec, const Lexicon& lexicon);

// Answers a question from the premises alone. YNU: entailment status with
// the minimal support, or the premises sharing a predicate with the goal
// when Uncertain. MC: the single entailed option. Numerical: arithmetic
// over the quantity premises. Throws NoSupport when an MC question does not
// have exactly one entailed option or a numerical question lacks facts.
Solution answer_question(std::span<const Formula> premises, const std::vector<std::string>& premises_nl,
                         const QuestionSpec& spec, SolverBackend& backend);
// Parses the question text first; throws NlParseError when it cannot.
QuestionSpec spec_from_text(std::string_view question, const Lexicon& lexicon);

// Question builders over premises in record order. `target` fixes the YNU
// answer; otherwise one is drawn uniformly. Candidates whose minimum support
// is not unique are skipped. Throw GenerationExhausted.
GeneratedQuestion gen_yesno(std::span<const Formula> premises, const std::vector<std::string>& premises_nl, Rng& rng,
                            const Lexicon& lexicon, SolverBackend& backend,
                            std::optional<EntailmentStatus> target = std::nullopt);
GeneratedQuestion gen_mc(std::span<const Formula> premises, const std::vector<std::string>& premises_nl, Rng& rng,
                         const Lexicon& lexicon, SolverBackend& backend);

struct NumericRanges {
  int min_terms = 1, max_terms = 4;
  int min_credits = 12, max_credits = 24;  // per completed term
  int min_required = 100, max_required = 160;
  int min_cap = 15, max_cap = 24;
  int max_noise = 2;  // unrelated rule premises
};

struct NumericItem {
  std::vector<Formula> premises;
  std::vector<std::string> premises_nl;
  std::vector<GeneratedQuestion> questions;
};

// A numerical record body: quantity premises in shuffled order, a few
// unrelated rule premises and `question_count` distinct numeric questions.
NumericItem gen_numeric(Rng& rng, const Lexicon& lexicon, SolverBackend& backend, const NumericRanges& ranges = {},
                        int question_count = 3);

// Premises of the pool in record order: a seeded shuffle of original,
// derived and unrelated.
std::vector<Formula> ordered_premises(const PremisePool& pool, std::uint64_t shuffle_seed);

// Builds the record for `specs` over the shuffled pool and validates it.
// Throws RecordRejected with the first violation's kind.
Record assemble_record(const PremisePool& pool, const std::vector<QuestionSpec>& specs, const Lexicon& lexicon,
                       SolverBackend& backend, std::uint64_t shuffle_seed);
Record assemble_record(std::span<const Formula> premises, const std::vector<std::string>& premises_nl,
                       const std::vector<QuestionSpec>& specs, const Lexicon& lexicon, SolverBackend& backend);

struct Violation {
  int question = 0;  // one-based; 0 for record-level problems
  std::string kind;  // e.g. "answer mismatch", "idx not minimal"
  std::string detail;

  std::string to_string() const;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

// Re-derives every answer, idx and citation from the record's own premises.
ValidationReport check_record(const Record& record, const Lexicon& lexicon, SolverBackend& backend);

// `base` plus synthetic entries for any predicate of `premises` it lacks.
Lexicon lexicon_for(const Lexicon& base, std::span<const Formula> premises);

struct DatasetStats {
  std::size_t total_records = 0;
  double avg_premise_count = 0;
  double avg_premise_length_words = 0;  // premise words per record
  std::size_t ynu_records = 0;
  std::size_t mc_records = 0;
  std::size_t numerical_records = 0;
  std::size_t max_inference_steps = 0;  // largest idx entry
  std::size_t max_premises_per_record = 0;

  friend bool operator==(const DatasetStats&, const DatasetStats&) = default;
};

DatasetStats dataset_stats(const std::vector<Record>& records);
std::string format_stats(const DatasetStats& s);

}  // namespace pqa
