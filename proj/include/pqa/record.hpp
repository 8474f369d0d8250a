#pragma once

// Dataset records and their JSON form, plus the question text formats
// shared by the generator, the validator and the reference server.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pqa/formula.hpp"

namespace pqa {

struct Record {
  std::vector<std::string> premises_nl;
  std::vector<std::string> premises_fol;
  std::vector<std::string> questions;
  std::vector<std::string> answers;
  std::vector<std::vector<int>> idx;
  std::vector<std::string> explanation;

  friend bool operator==(const Record&, const Record&) = default;
};

// JSON array of objects with the keys "premises-NL", "premises-FOL",
// "questions", "answers", "idx", "explanation", in that order.
std::string write_dataset(const std::vector<Record>& records);
std::string write_record(const Record& record);
// Throws ConfigError on malformed input.
std::vector<Record> read_dataset(std::string_view json_text);
Record read_record(std::string_view json_text);

std::string read_file(const std::string& path);
// Writes through a temporary file and renames it into place.
void write_file(const std::string& path, std::string_view content);

enum class QuestionKind { YesNoUncertain, MultipleChoice, Numerical };
std::string_view to_string(QuestionKind k);

enum class NumericKind { TotalCredits, RemainingCredits, TermsNeeded };

struct ParsedQuestion {
  QuestionKind kind = QuestionKind::YesNoUncertain;
  std::string statement;             // YNU
  std::vector<std::string> options;  // MC, in letter order
  NumericKind numeric = NumericKind::TotalCredits;
};

std::string yesno_question(const std::string& statement);
std::string mc_question(const std::vector<std::string>& options);
std::string numeric_question(NumericKind kind);
std::optional<ParsedQuestion> parse_question(std::string_view text);

// Quantity premises of numerical records, stored in premises-FOL as opaque
// ground atoms such as EarnedCreditsTerm2_30(student).
struct QuantityFact {
  enum class Kind { Earned, Required, PerTermCap };
  Kind kind = Kind::Earned;
  int value = 0;
  int term = 0;  // Earned only

  Formula to_formula() const;
  std::string to_nl() const;
};
std::optional<QuantityFact> quantity_fact(const Formula& f);
std::optional<QuantityFact> quantity_fact_from_nl(std::string_view sentence);

// One-based premise numbers cited as "Premise k" in an explanation.
std::vector<int> cited_premises(std::string_view explanation);

}  // namespace pqa
