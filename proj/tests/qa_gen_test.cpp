#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "pqa/errors.hpp"
#include "pqa/fol.hpp"
#include "pqa/qa_gen.hpp"
#include "pqa/smtlib.hpp"
#include "support/numeric_oracle.hpp"
#include "support/type_oracle.hpp"

namespace pqa {
namespace {

Record fixture() { return read_record(read_file(std::string(PQA_FIXTURES) + "/course_policy_record.json")); }

std::vector<Formula> parsed(const Record& r) {
  std::vector<Formula> out;
  for (const auto& s : r.premises_fol) out.push_back(parse_formula(s));
  return out;
}

std::string report_text(const ValidationReport& rep) {
  std::string out;
  for (const auto& v : rep.violations) out += v.to_string() + "\n";
  return out;
}

bool has_violation(const ValidationReport& rep, const std::string& prefix) {
  for (const auto& v : rep.violations)
    if (v.to_string().rfind(prefix, 0) == 0) return true;
  return false;
}

TEST(ReferenceRecord, Validates) {
  InternalBackend backend;
  const Record r = fixture();
  const auto rep = check_record(r, Lexicon::academic_policy(), backend);
  EXPECT_TRUE(rep.ok()) << report_text(rep);
}

TEST(ReferenceRecord, AnswersAreRederived) {
  InternalBackend backend;
  const Record r = fixture();
  const auto premises = parsed(r);
  const auto lex = Lexicon::academic_policy();
  const auto mc = answer_question(premises, r.premises_nl, spec_from_text(r.questions[0], lex), backend);
  EXPECT_EQ(mc.answer, "B");
  EXPECT_EQ(mc.idx, (std::vector<int>{1, 3}));
  const auto ynu = answer_question(premises, r.premises_nl, spec_from_text(r.questions[1], lex), backend);
  EXPECT_EQ(ynu.answer, "Yes");
  EXPECT_EQ(ynu.idx, (std::vector<int>{2, 4}));
  EXPECT_EQ(cited_premises(mc.explanation), mc.idx);
}

TEST(ReferenceRecord, DistractorVerdicts) {
  const Record r = fixture();
  const auto premises = parsed(r);
  const auto q = spec_from_text(r.questions[0], Lexicon::academic_policy());
  ASSERT_EQ(q.options.size(), 4u);
  const testing::OracleVerdict expected[] = {testing::OracleVerdict::Uncertain, testing::OracleVerdict::Yes,
                                             testing::OracleVerdict::No, testing::OracleVerdict::Uncertain};
  InternalBackend backend;
  const EntailmentStatus engine[] = {EntailmentStatus::Uncertain, EntailmentStatus::Yes, EntailmentStatus::No,
                                     EntailmentStatus::Uncertain};
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(entails(premises, q.options[i], backend), engine[i]) << i;
    // The oracle is exponential in predicates; check it where the related
    // premises stay small.
    std::vector<Formula> rel;
    for (int k : related_premises(premises, q.options[i])) rel.push_back(premises[k - 1]);
    rel.push_back(q.options[i]);
    if (predicates(rel).size() > 5) continue;
    rel.pop_back();
    EXPECT_EQ(testing::TypeSetOracle(rel, q.options[i]).verdict(), expected[i]) << i;
  }
}

TEST(ReferenceRecord, FlippedAnswerIsReported) {
  InternalBackend backend;
  Record r = fixture();
  r.answers[0] = "C";
  const auto rep = check_record(r, Lexicon::academic_policy(), backend);
  EXPECT_TRUE(has_violation(rep, "answer mismatch, question 1")) << report_text(rep);
  r = fixture();
  r.answers[1] = "No";
  EXPECT_TRUE(has_violation(check_record(r, Lexicon::academic_policy(), backend), "answer mismatch, question 2"));
}

TEST(ReferenceRecord, RedundantIdxIsReported) {
  InternalBackend backend;
  Record r = fixture();
  r.idx[0] = {1, 3, 5};
  r.explanation[0] += " Premise 5 is not needed.";
  const auto rep = check_record(r, Lexicon::academic_policy(), backend);
  EXPECT_TRUE(has_violation(rep, "idx not minimal, question 1")) << report_text(rep);
  EXPECT_EQ(rep.violations.size(), 1u) << report_text(rep);
}

TEST(ReferenceRecord, OtherViolations) {
  InternalBackend backend;
  const auto lex = Lexicon::academic_policy();
  Record r = fixture();
  r.idx[1] = {2};
  r.explanation[1] = "Premise 2 is enough.";
  EXPECT_TRUE(has_violation(check_record(r, lex, backend), "idx does not support answer, question 2"));

  r = fixture();
  r.explanation[0] = "Premise 1 alone.";
  EXPECT_TRUE(has_violation(check_record(r, lex, backend), "explanation citations differ from idx, question 1"));

  r = fixture();
  r.idx[0] = {3, 1};
  EXPECT_TRUE(has_violation(check_record(r, lex, backend), "idx malformed, question 1"));

  r = fixture();
  r.answers[1] = "yes";
  EXPECT_TRUE(has_violation(check_record(r, lex, backend), "answer not canonical, question 2"));

  r = fixture();
  r.questions[1] = "Is it true that students pass?";
  EXPECT_TRUE(has_violation(check_record(r, lex, backend), "question unparseable, question 2"));

  r = fixture();
  r.premises_nl.pop_back();
  EXPECT_TRUE(has_violation(check_record(r, lex, backend), "premise lists misaligned"));

  r = fixture();
  r.answers.pop_back();
  EXPECT_TRUE(has_violation(check_record(r, lex, backend), "question lists misaligned"));

  r = fixture();
  r.premises_fol.push_back("ForAll(x, GraduatesWithHonors(x) -> NOT OnAcademicProbation(x))");
  r.premises_nl.push_back("Every student who graduates with honors is not on academic probation.");
  EXPECT_TRUE(has_violation(check_record(r, lex, backend), "premises inconsistent"));

  r = fixture();
  r.premises_fol[0] = "ForAll(x, Student(x) ->";
  EXPECT_TRUE(has_violation(check_record(r, lex, backend), "premise unparseable"));
}

TEST(ReferenceRecord, NonUniqueSupportIsReported) {
  InternalBackend backend;
  const auto lex = Lexicon::academic_policy();
  const std::vector<Formula> premises = {parse_formula("ForAll(x, AttendsAllLectures(x) -> PassCourse(x))"),
                                         parse_formula("ForAll(x, AttendsAllLectures(x) -> PassCourse(x) AND "
                                                       "HigherChancePassFinalExam(x))")};
  const Formula goal = parse_formula("ForAll(x, AttendsAllLectures(x) -> PassCourse(x))");
  const std::vector<std::string> nl = {render_nl(premises[0], lex), render_nl(premises[1], lex)};
  QuestionSpec spec;
  spec.goal = goal;
  EXPECT_THROW(assemble_record(premises, nl, {spec}, lex, backend), RecordRejected);
}

TEST(RecordJson, RoundTrip) {
  const Record r = fixture();
  EXPECT_EQ(read_record(write_record(r)), r);
  const std::vector<Record> ds{r, r};
  EXPECT_EQ(read_dataset(write_dataset(ds)), ds);
  // Keys keep their documented order.
  const std::string text = write_record(r);
  EXPECT_LT(text.find("premises-NL"), text.find("premises-FOL"));
  EXPECT_LT(text.find("answers"), text.find("\"idx\""));
  EXPECT_LT(text.find("\"idx\""), text.find("explanation"));
}

TEST(RecordJson, RejectsMalformed) {
  EXPECT_THROW(read_record("{"), ConfigError);
  EXPECT_THROW(read_record("[]"), ConfigError);
  EXPECT_THROW(read_record(R"({"premises-NL": []})"), ConfigError);
  EXPECT_THROW(read_dataset("{}"), ConfigError);
}

TEST(QuestionText, ParsesBack) {
  EXPECT_EQ(parse_question(yesno_question("Every student passes the course."))->statement,
            "Every student passes the course.");
  const auto mc = parse_question(mc_question({"a", "b", "c"}));
  ASSERT_TRUE(mc);
  EXPECT_EQ(mc->options, (std::vector<std::string>{"a", "b", "c"}));
  for (auto k : {NumericKind::TotalCredits, NumericKind::RemainingCredits, NumericKind::TermsNeeded})
    EXPECT_EQ(parse_question(numeric_question(k))->numeric, k);
  EXPECT_FALSE(parse_question("Which statement can be inferred?\nB. out of order"));
  EXPECT_FALSE(parse_question("What now?"));
}

TEST(Stats, MatchesRecount) {
  const Record r = fixture();
  Record numeric;
  numeric.premises_nl = {"The student earned 20 credits in term 1.", "The program requires 120 credits to graduate."};
  numeric.premises_fol = {"EarnedCreditsTerm1_20(student)", "RequiredCredits_120(program)"};
  numeric.questions = {numeric_question(NumericKind::RemainingCredits)};
  numeric.answers = {"100"};
  numeric.idx = {{1, 2}};
  numeric.explanation = {"Premise 1 ... Premise 2 ..."};
  const auto s = dataset_stats({r, numeric});

  // Word counts from the raw characters.
  auto words = [](const std::string& t) {
    std::size_t n = 0;
    bool in = false;
    for (char c : t) {
      const bool space = c == ' ' || c == '\n' || c == '\t';
      if (!space && !in) ++n;
      in = !space;
    }
    return n;
  };
  std::size_t total = 0;
  for (const auto& rec : {r, numeric})
    for (const auto& p : rec.premises_nl) total += words(p);
  EXPECT_EQ(s.total_records, 2u);
  EXPECT_DOUBLE_EQ(s.avg_premise_count, 3.5);
  EXPECT_DOUBLE_EQ(s.avg_premise_length_words, static_cast<double>(total) / 2);
  EXPECT_EQ(s.ynu_records, 1u);
  EXPECT_EQ(s.mc_records, 1u);
  EXPECT_EQ(s.numerical_records, 1u);
  EXPECT_EQ(s.max_inference_steps, 2u);
  EXPECT_EQ(s.max_premises_per_record, 5u);
  EXPECT_NE(format_stats(s).find("Total Records"), std::string::npos);
}

using testing::NumericOracle;

TEST(Numeric, ThousandDrawsMatchOracle) {
  InternalBackend backend;
  const auto lex = Lexicon::academic_policy();
  Rng rng(31337);
  int checked = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto item = gen_numeric(rng, lex, backend);
    const NumericOracle oracle(item.premises_nl);
    ASSERT_EQ(oracle.req_idx.size(), 1u);
    ASSERT_EQ(oracle.cap_idx.size(), 1u);
    ASSERT_EQ(item.questions.size(), 3u);
    for (const auto& q : item.questions) {
      ASSERT_EQ(q.solution.answer, oracle.answer(q.spec.numeric)) << q.text;
      ASSERT_EQ(q.solution.idx, oracle.idx(q.spec.numeric));
      ASSERT_EQ(cited_premises(q.solution.explanation), q.solution.idx);
      ++checked;
    }
    EXPECT_GT(std::stoi(oracle.answer(NumericKind::RemainingCredits)), 0);
  }
  EXPECT_EQ(checked, 3000);
}

TEST(Numeric, RecordValidatesAndRejectsExtraIdx) {
  InternalBackend backend;
  const auto lex = Lexicon::academic_policy();
  Rng rng(8);
  const auto item = gen_numeric(rng, lex, backend);
  std::vector<QuestionSpec> specs;
  for (const auto& q : item.questions) specs.push_back(q.spec);
  Record r = assemble_record(item.premises, item.premises_nl, specs, lex, backend);
  EXPECT_TRUE(check_record(r, lex, backend).ok());
  // Add a premise index that is not a quantity fact.
  for (int k = 1; k <= static_cast<int>(r.premises_fol.size()); ++k) {
    if (std::find(r.idx[0].begin(), r.idx[0].end(), k) != r.idx[0].end()) continue;
    r.idx[0].push_back(k);
    std::sort(r.idx[0].begin(), r.idx[0].end());
    r.explanation[0] += " Premise " + std::to_string(k) + ".";
    break;
  }
  EXPECT_TRUE(has_violation(check_record(r, lex, backend), "idx not minimal, question 1"));
}

TEST(Numeric, WorkedExample) {
  InternalBackend backend;
  const std::vector<Formula> premises = {QuantityFact{QuantityFact::Kind::Earned, 24, 1}.to_formula(),
                                         QuantityFact{QuantityFact::Kind::Earned, 30, 2}.to_formula(),
                                         QuantityFact{QuantityFact::Kind::Required, 120, 0}.to_formula(),
                                         QuantityFact{QuantityFact::Kind::PerTermCap, 20, 0}.to_formula()};
  std::vector<std::string> nl;
  for (const auto& f : premises) nl.push_back(quantity_fact(f)->to_nl());
  QuestionSpec spec;
  spec.kind = QuestionKind::Numerical;
  spec.numeric = NumericKind::TotalCredits;
  auto s = answer_question(premises, nl, spec, backend);
  EXPECT_EQ(s.answer, "54");
  EXPECT_NE(s.explanation.find("24 + 30 = 54"), std::string::npos);
  spec.numeric = NumericKind::RemainingCredits;
  EXPECT_EQ(answer_question(premises, nl, spec, backend).answer, "66");
  spec.numeric = NumericKind::TermsNeeded;
  s = answer_question(premises, nl, spec, backend);
  EXPECT_EQ(s.answer, "4");
  EXPECT_EQ(s.idx, (std::vector<int>{1, 2, 3, 4}));
}

struct Generated {
  std::vector<Formula> premises;
  std::vector<std::string> nl;
  Lexicon lexicon;
};

Generated generated_pool(std::uint64_t seed, int s, int c, int d, SolverBackend& backend) {
  Generated g{{}, {}, Lexicon::academic_policy()};
  const auto pool = generate_premises(s, c, d, seed, backend, g.lexicon);
  g.premises = ordered_premises(pool, derive_seed(seed, 1));
  for (const auto& f : g.premises) g.nl.push_back(render_nl(f, g.lexicon));
  return g;
}

TEST(YesNo, EveryTargetValidates) {
  InternalBackend backend;
  int oracle_checks = 0;
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    auto g = generated_pool(seed, 4, 3, 2, backend);
    Rng rng(seed);
    for (auto target : {EntailmentStatus::Yes, EntailmentStatus::No, EntailmentStatus::Uncertain}) {
      const auto q = gen_yesno(g.premises, g.nl, rng, g.lexicon, backend, target);
      EXPECT_EQ(q.solution.status, target);
      const auto r = assemble_record(g.premises, g.nl, {q.spec}, g.lexicon, backend);
      EXPECT_EQ(r.answers[0], q.solution.answer);
      const auto rep = check_record(r, g.lexicon, backend);
      EXPECT_TRUE(rep.ok()) << report_text(rep);
      if (target == EntailmentStatus::Uncertain) continue;
      // The support alone gives the verdict per the brute-force oracle.
      std::vector<Formula> sub;
      for (int k : q.solution.idx) sub.push_back(g.premises[k - 1]);
      if (predicates(sub).size() + predicates(*q.spec.goal).size() > 5) continue;
      const auto v = testing::TypeSetOracle(sub, *q.spec.goal).verdict();
      EXPECT_EQ(v, target == EntailmentStatus::Yes ? testing::OracleVerdict::Yes : testing::OracleVerdict::No);
      ++oracle_checks;
    }
  }
  EXPECT_GT(oracle_checks, 0);
}

TEST(MultipleChoice, ExactlyOneOptionEntailed) {
  InternalBackend backend;
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    auto g = generated_pool(seed, 5, 4, 2, backend);
    Rng rng(seed * 7);
    const auto q = gen_mc(g.premises, g.nl, rng, g.lexicon, backend);
    ASSERT_EQ(q.spec.options.size(), 4u);
    int yes = 0;
    for (const auto& o : q.spec.options) yes += entails(g.premises, o, backend) == EntailmentStatus::Yes;
    EXPECT_EQ(yes, 1);
    const auto r = assemble_record(g.premises, g.nl, {q.spec}, g.lexicon, backend);
    EXPECT_TRUE(check_record(r, g.lexicon, backend).ok());
    EXPECT_EQ(spec_from_text(r.questions[0], g.lexicon).options, q.spec.options);
  }
}

TEST(Generation, DeterministicForSeed) {
  InternalBackend backend;
  auto run = [&] {
    auto g = generated_pool(5, 5, 3, 3, backend);
    Rng rng(99);
    std::vector<QuestionSpec> specs{gen_mc(g.premises, g.nl, rng, g.lexicon, backend).spec,
                                    gen_yesno(g.premises, g.nl, rng, g.lexicon, backend).spec};
    return write_record(assemble_record(g.premises, g.nl, specs, g.lexicon, backend));
  };
  EXPECT_EQ(run(), run());
}

TEST(Validation, ExternalBackendAgrees) {
  const char* env = std::getenv("PQA_SMT_SOLVER");
  const std::string solver = env ? env : "/usr/local/bin/z3";
  if (!std::filesystem::exists(solver)) GTEST_SKIP() << "no SMT solver at " << solver;
  InternalBackend internal;
  ExternalBackend external(solver + " -in");
  EXPECT_TRUE(check_record(fixture(), Lexicon::academic_policy(), external).ok());
  for (std::uint64_t seed = 20; seed < 24; ++seed) {
    auto g = generated_pool(seed, 4, 3, 1, internal);
    Rng rng(seed);
    const auto q = gen_yesno(g.premises, g.nl, rng, g.lexicon, internal);
    const auto r = assemble_record(g.premises, g.nl, {q.spec}, g.lexicon, internal);
    const auto rep = check_record(r, g.lexicon, external);
    EXPECT_TRUE(rep.ok()) << report_text(rep);
  }
}

TEST(LexiconFor, AddsMissingPredicates) {
  const auto lex = lexicon_for(Lexicon::academic_policy(),
                               std::vector<Formula>{parse_formula("ForAll(x, P7(x) -> PassCourse(x))"),
                                                    QuantityFact{QuantityFact::Kind::Required, 120, 0}.to_formula()});
  EXPECT_TRUE(lex.contains("P7"));
  EXPECT_FALSE(lex.contains("RequiredCredits_120"));
}

}  // namespace
}  // namespace pqa
