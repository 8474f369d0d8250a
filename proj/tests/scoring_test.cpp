#include <gtest/gtest.h>

#include <algorithm>

#include "pqa/errors.hpp"
#include "pqa/rng.hpp"
#include "pqa/scoring.hpp"

namespace pqa {
namespace {

constexpr double kEps = 1e-9;

Truth yes_truth(std::vector<int> idx) { return {QuestionKind::YesNoUncertain, "Yes", std::move(idx)}; }

InstanceScore perfect(Round r) { return score_instance({"Yes", {1, 2}, 1.0}, yes_truth({1, 2}), r); }

TEST(Normalize, Answers) {
  EXPECT_EQ(normalize_answer(" yes ", QuestionKind::YesNoUncertain), "Yes");
  EXPECT_EQ(normalize_answer("UNCERTAIN", QuestionKind::YesNoUncertain), "Uncertain");
  EXPECT_EQ(normalize_answer("No.", QuestionKind::YesNoUncertain), "No");
  EXPECT_FALSE(normalize_answer("maybe", QuestionKind::YesNoUncertain));
  EXPECT_EQ(normalize_answer("B.", QuestionKind::MultipleChoice), "B");
  EXPECT_EQ(normalize_answer("b", QuestionKind::MultipleChoice), "B");
  EXPECT_FALSE(normalize_answer("E", QuestionKind::MultipleChoice));
  EXPECT_FALSE(normalize_answer("AB", QuestionKind::MultipleChoice));
  EXPECT_EQ(normalize_answer("66", QuestionKind::Numerical), "66");
  EXPECT_EQ(normalize_answer("66.0", QuestionKind::Numerical), "66");
  EXPECT_EQ(normalize_answer("066", QuestionKind::Numerical), "66");
  EXPECT_EQ(normalize_answer("0", QuestionKind::Numerical), "0");
  EXPECT_FALSE(normalize_answer("sixty-six", QuestionKind::Numerical));
  EXPECT_FALSE(normalize_answer("66.5", QuestionKind::Numerical));
  EXPECT_FALSE(normalize_answer("", QuestionKind::Numerical));
}

TEST(ScoreInstance, Examples) {
  const auto s = score_instance({"Yes", {2, 4}}, yes_truth({2, 4}), Round::Selection);
  EXPECT_EQ(s.p1, 1);
  EXPECT_EQ(s.p2, 1);
  EXPECT_NEAR(s.s, 1.0, kEps);
  // Right answer, wrong idx: zeroed.
  const auto z = score_instance({"Yes", {2}}, yes_truth({2, 4}), Round::Selection);
  EXPECT_EQ(z.p1, 1);
  EXPECT_EQ(z.p2, 0);
  EXPECT_EQ(z.s, 0.0);
  // Wrong answer, right idx: zeroed too.
  EXPECT_EQ(score_instance({"No", {2, 4}}, yes_truth({2, 4}), Round::Selection).s, 0.0);
  EXPECT_NEAR(score_instance({"Yes", {2, 4}, 0.5}, yes_truth({2, 4}), Round::Final).s, 0.9, kEps);
  // P3 cannot rescue an inconsistent instance.
  EXPECT_EQ(score_instance({"Yes", {4}, 1.0}, yes_truth({2, 4}), Round::Final).s, 0.0);
  EXPECT_NEAR(score_instance({" b. ", {3, 1}}, {QuestionKind::MultipleChoice, "B", {1, 3}}, Round::Selection).s, 1.0,
              kEps);
}

TEST(ScoreInstance, Properties) {
  Rng rng(5);
  for (int i = 0; i < 2000; ++i) {
    std::vector<int> truth_idx, pred_idx;
    for (int k = 1; k <= 6; ++k) {
      if (rng.chance(0.4)) truth_idx.push_back(k);
      if (rng.chance(0.4)) pred_idx.push_back(k);
    }
    if (rng.chance(0.3)) pred_idx = truth_idx;
    const Truth t = yes_truth(truth_idx);
    const Prediction p{rng.chance(0.5) ? "Yes" : "No", pred_idx, rng.uniform()};
    const Round round = rng.chance(0.5) ? Round::Selection : Round::Final;
    const auto s = score_instance(p, t, round);
    ASSERT_GE(s.s, 0.0);
    ASSERT_LE(s.s, 1.0);
    if (s.p1 * s.p2 == 0) ASSERT_EQ(s.s, 0.0);
    auto shuffled = p;
    rng.shuffle(shuffled.idx);
    ASSERT_EQ(score_instance(shuffled, t, round).p2, s.p2);
    ASSERT_EQ(score_instance(p, t, round).s, s.s);
  }
}

TEST(Selection, Equation) {
  EXPECT_NEAR(selection_score(10, 20, 5, 10), 12.7, kEps);
  EXPECT_NEAR(selection_score(0, 0, 0, 0), 0.0, kEps);
  std::vector<InstanceScore> all(50, perfect(Round::Selection));
  EXPECT_NEAR(phase_score(all), 50.0, kEps);
  EXPECT_NEAR(selection_score(all, all, 0, 0), 39.0, kEps);
  EXPECT_THROW(selection_score(1, 1, -0.1, 0), NegativeBonus);
  EXPECT_THROW(selection_score(1, 1, 0, -2), NegativeBonus);
}

TEST(Final, Equations) {
  std::vector<InstanceScore> five(5, perfect(Round::Final));
  auto f = final_score(five, 5, 5);
  EXPECT_NEAR(f.s2, 5.0, kEps);
  EXPECT_NEAR(f.s3, 1.0, kEps);
  EXPECT_NEAR(f.s, 3.0, kEps);
  EXPECT_NEAR(presentation_score(4, 3), 0.7, kEps);
  EXPECT_NEAR(presentation_score(1, 1), 0.2, kEps);
  // S2 = 4.0, S3 = 0.8.
  std::vector<InstanceScore> four = five;
  four[4] = {};
  f = final_score(four, 4, 4);
  EXPECT_NEAR(f.s2, 4.0, kEps);
  EXPECT_NEAR(f.s, 2.4, kEps);
  EXPECT_THROW(final_score(five, 0.5, 3), RubricOutOfRange);
  EXPECT_THROW(final_score(five, 3, 5.5), RubricOutOfRange);
  EXPECT_THROW(final_score(four, 3, 3, 4), InvalidParams);
}

TEST(Final, PresentationBounds) {
  Rng rng(8);
  for (int i = 0; i < 1000; ++i) {
    const double a = 1 + 4 * rng.uniform(), b = 1 + 4 * rng.uniform();
    const double s3 = presentation_score(a, b);
    ASSERT_GE(s3, 0.2 - kEps);
    ASSERT_LE(s3, 1.0 + kEps);
  }
}

TEST(Leaderboard, Ordering) {
  std::vector<CampaignScore> teams(3);
  teams[0].team = "Beta";
  teams[0].s = 2.1;
  teams[1].team = "Alpha";
  teams[1].s = 2.4;
  teams[2].team = "Gamma";
  teams[2].s = 9.0;
  teams[2].disqualified = true;
  auto board = leaderboard(teams, Round::Final);
  EXPECT_EQ(board[0].team, "Alpha");
  EXPECT_EQ(board[1].team, "Beta");
  EXPECT_EQ(board[2].team, "Gamma");
  // Tie on S: higher S2 first, then name.
  teams[0].s = 2.4;
  teams[0].s2 = 4.0;
  teams[1].s2 = 3.0;
  board = leaderboard(teams, Round::Final);
  EXPECT_EQ(board[0].team, "Beta");
  teams[0].s2 = 3.0;
  board = leaderboard(teams, Round::Final);
  EXPECT_EQ(board[0].team, "Alpha");
}

// Zeroing every bonus keeps the order of teams with equal bonuses and
// strictly ordered phase scores.
TEST(Leaderboard, ZeroBonusKeepsOrder) {
  Rng rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    const double b1 = 10 * rng.uniform(), b2 = 10 * rng.uniform();
    std::vector<CampaignScore> teams(5);
    for (int i = 0; i < 5; ++i) {
      teams[i].team = "T" + std::to_string(i);
      teams[i].phase1 = 5.0 * i + rng.uniform();
      teams[i].phase2 = 5.0 * i + rng.uniform();
      teams[i].s1 = selection_score(teams[i].phase1, teams[i].phase2, b1, b2);
    }
    auto zeroed = teams;
    for (auto& t : zeroed) t.s1 = selection_score(t.phase1, t.phase2, 0, 0);
    auto names = [](const std::vector<CampaignScore>& v) {
      std::vector<std::string> out;
      for (const auto& t : v) out.push_back(t.team);
      return out;
    };
    ASSERT_EQ(names(leaderboard(teams, Round::Selection)), names(leaderboard(zeroed, Round::Selection)));
  }
}

TEST(Results, ScoreFileAndReport) {
  Record r;
  r.questions = {yesno_question("x"), mc_question({"a", "b", "c", "d"}), numeric_question(NumericKind::TotalCredits)};
  r.answers = {"Yes", "B", "54"};
  r.idx = {{2, 4}, {1, 3}, {1, 2}};
  const auto truth = truth_table({r});
  ASSERT_EQ(truth.size(), 3u);
  EXPECT_EQ(truth.at("1.2").kind, QuestionKind::MultipleChoice);

  const std::string results = R"([
    {"team": "A", "phase": 1, "question_id": "1.1", "answer": "yes", "idx": [4, 2], "explanation": ""},
    {"team": "A", "phase": 1, "question_id": "1.2", "answer": "B", "idx": [1, 3], "explanation": ""},
    {"team": "A", "phase": 2, "question_id": "1.3", "answer": "54.0", "idx": [1, 2], "explanation": ""},
    {"team": "B", "phase": 1, "question_id": "1.1", "answer": "Yes", "idx": [2], "explanation": ""}
  ])";
  const auto rows = read_results(results);
  EXPECT_EQ(read_results(write_results(rows)).size(), rows.size());
  const auto inputs = read_team_inputs(R"({"bonuses": {"B": {"b1": 5, "b2": 10}}})");
  const auto report = score_results(rows, truth, Round::Selection, inputs);
  ASSERT_EQ(report.standings.size(), 2u);
  // B's bonus outweighs A's two correct answers.
  EXPECT_EQ(report.standings[0].team, "B");
  const auto& a = report.standings[1];
  EXPECT_EQ(a.team, "A");
  EXPECT_NEAR(a.phase1, 2.0, kEps);
  EXPECT_NEAR(a.phase2, 1.0, kEps);
  EXPECT_NEAR(a.s1, 0.6 * 0.7 * 2 + 0.4 * 0.9 * 1, kEps);
  EXPECT_NEAR(report.standings[0].s1, 0.6 * 0.3 * 5 + 0.4 * 0.1 * 10, kEps);
  EXPECT_EQ(report_json(report), report_json(score_results(rows, truth, Round::Selection, inputs)));
  EXPECT_NE(report_table(report).find("Final Selection Score"), std::string::npos);

  EXPECT_THROW(score_results(read_results(R"([{"team":"A","question_id":"9.1","answer":"Yes","idx":[]}])"), truth,
                             Round::Selection),
               ConfigError);
  EXPECT_THROW(read_results(R"([{"team":"A"}])"), ConfigError);
}

TEST(Results, FinalRoundPadsMissingCases) {
  Record r;
  r.questions = {yesno_question("x")};
  r.answers = {"Yes"};
  r.idx = {{1}};
  const auto truth = truth_table({r});
  const auto rows = read_results(
      R"([{"team": "A", "phase": "final", "question_id": "1.1", "answer": "Yes", "idx": [1], "p3": 0.5}])");
  const auto inputs = read_team_inputs(R"({"rubric": {"A": {"r_pres": 4, "r_qa": 3}}})");
  const auto report = score_results(rows, truth, Round::Final, inputs);
  EXPECT_NEAR(report.standings[0].s2, 0.9, kEps);
  EXPECT_NEAR(report.standings[0].s3, 0.7, kEps);
  EXPECT_NEAR(report.standings[0].s, 0.8, kEps);
}

}  // namespace
}  // namespace pqa
