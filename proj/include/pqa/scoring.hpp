#pragma once

// Exact-match scoring of system outputs, phase and campaign totals, and
// the leaderboard.

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pqa/record.hpp"

namespace pqa {

enum class Round { Selection, Final };
std::string_view to_string(Round r);
Round parse_round(std::string_view text);  // "selection" | "final", else ConfigError

// Canonical answer, or nullopt when the text cannot be one for `kind`.
// Yes/No/Uncertain case-insensitively, a letter A-D ("b", "B."), or an
// integer ("66", "66.0").
std::optional<std::string> normalize_answer(std::string_view raw, QuestionKind kind);

struct Prediction {
  std::string answer;
  std::vector<int> idx;
  double p3 = 0;  // explanation rubric, final round only
};

struct Truth {
  QuestionKind kind = QuestionKind::YesNoUncertain;
  std::string answer;  // canonical
  std::vector<int> idx;
};

struct InstanceScore {
  int p1 = 0;
  int p2 = 0;
  double p3 = 0;
  double s = 0;
};

// p2 compares idx as sets. s is zero unless both p1 and p2 are 1.
InstanceScore score_instance(const Prediction& pred, const Truth& truth, Round round);

double phase_score(std::span<const InstanceScore> instances);

// Throws NegativeBonus.
double selection_score(std::span<const InstanceScore> phase1, std::span<const InstanceScore> phase2, double b1,
                       double b2);
double selection_score(double phase1, double phase2, double b1, double b2);

struct FinalScore {
  double s2 = 0;
  double s3 = 0;
  double s = 0;
};

// Rubric means must lie in [1, 5] (RubricOutOfRange); `n` instances are
// expected (InvalidParams otherwise).
FinalScore final_score(std::span<const InstanceScore> instances, double r_pres, double r_qa, std::size_t n = 5);
double presentation_score(double r_pres, double r_qa);

struct CampaignScore {
  std::string team;
  // Selection round.
  double phase1 = 0, phase2 = 0;
  double b1 = 0, b2 = 0;
  double s1 = 0;
  // Final round.
  double s2 = 0, s3 = 0, s = 0;
  bool disqualified = false;
};

// Final round: S, then S2, then team name. Selection round: S1, then the
// phase 2 score, then team name. Disqualified teams always come last.
std::vector<CampaignScore> leaderboard(std::vector<CampaignScore> teams, Round round);

// One line of a results file.
struct SubmissionResult {
  std::string team;
  int phase = 1;  // 1 or 2 in the selection round
  std::string question_id;  // "<record>.<question>", one-based
  Prediction prediction;
  std::string explanation;
};

// JSON array of {team, phase, question_id, answer, idx, explanation, p3?}.
// Throws ConfigError.
std::vector<SubmissionResult> read_results(std::string_view json_text);
std::string write_results(const std::vector<SubmissionResult>& results);

// Ground truth keyed by question id.
std::map<std::string, Truth> truth_table(const std::vector<Record>& dataset);
std::string question_id(std::size_t record, std::size_t question);  // zero-based in, one-based out

struct TeamInputs {
  double b1 = 0, b2 = 0;
  double r_pres = 1, r_qa = 1;
  bool disqualified = false;
};

struct ScoredInstance {
  SubmissionResult result;
  InstanceScore score;
};

struct ScoreReport {
  Round round = Round::Selection;
  std::vector<ScoredInstance> instances;
  std::vector<CampaignScore> standings;  // leaderboard order
};

// Unknown question ids and duplicate (team, phase, id) rows are ConfigError.
// Final-round teams are checked against `final_n` instances.
ScoreReport score_results(const std::vector<SubmissionResult>& results, const std::map<std::string, Truth>& truth,
                          Round round, const std::map<std::string, TeamInputs>& inputs = {},
                          std::size_t final_n = 5);

// {"bonuses": {team: {"b1", "b2"}}, "rubric": {team: {"r_pres", "r_qa"}}}.
std::map<std::string, TeamInputs> read_team_inputs(std::string_view json_text);

std::string report_json(const ScoreReport& report);
std::string report_table(const ScoreReport& report);

}  // namespace pqa
