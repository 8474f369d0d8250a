#include <gtest/gtest.h>

#include "pqa/errors.hpp"
#include "pqa/fol.hpp"
#include "pqa/lexicon.hpp"
#include "pqa/rng.hpp"

namespace pqa {
namespace {

const Lexicon& lex() {
  static const Lexicon l = Lexicon::academic_policy();
  return l;
}

TEST(RenderNl, NegatedRuleSnapshot) {
  const Formula f = parse_formula("ForAll(x, NOT SubmitsResearchPaper(x) -> NOT PassCourse(x))");
  EXPECT_EQ(render_nl(f, lex()), "Every student who does not submit their research paper also does not pass the course.");
}

TEST(RenderNl, ExistentialSnapshot) {
  const Formula f = parse_formula("Exists(x, OnAcademicProbation(x) AND GraduatesWithHonors(x))");
  EXPECT_EQ(render_nl(f, lex()), "There exists a student who is on academic probation and graduates with honors.");
}

TEST(RenderNl, DisjunctiveRuleSnapshot) {
  const Formula f =
      parse_formula("ForAll(x, (AttendsTutoringSession(x) OR CompletesExtraPractice(x)) -> MoreLikelyImproveGrades(x))");
  EXPECT_EQ(render_nl(f, lex()),
            "Every student who attends a tutoring session or completes extra practice problems also is more likely to "
            "improve their grades.");
}

TEST(RenderNl, MissingLexiconEntry) {
  const Lexicon empty;
  EXPECT_THROW(render_nl(ground("P", "a"), empty), MissingLexiconEntry);
  EXPECT_THROW(render_nl(parse_formula("ForAll(x, PassCourse(x) -> Unknown(x))"), lex()), MissingLexiconEntry);
}

TEST(RenderNl, NonTemplateShapesFallBack) {
  const Formula f = parse_formula("NOT ForAll(x, PassCourse(x))");
  EXPECT_FALSE(has_nl_template(f));
  EXPECT_EQ(render_nl(f, lex()), "It is not the case that for every student, the student passes the course.");
  EXPECT_THROW(parse_nl(render_nl(f, lex()), lex()), NlParseError);
}

TEST(ParseNl, RejectsUnknownText) {
  EXPECT_THROW(parse_nl("Every student who flies also swims.", lex()), NlParseError);
  EXPECT_THROW(parse_nl("Every student who passes the course", lex()), NlParseError);
  EXPECT_THROW(parse_nl("Every student who passes the course and is suspended or is on academic probation also "
                        "retakes the course.",
                        lex()),
               NlParseError);
}

TEST(Lexicon, ValidatesEntries) {
  EXPECT_THROW(Lexicon({{"A", "walks", "does not walk"}, {"A", "runs", "does not run"}}), ConfigError);
  EXPECT_THROW(Lexicon({{"A", "walks", "does not walk"}, {"B", "walks", "does not run"}}), ConfigError);
  EXPECT_THROW(Lexicon({{"A", "walks and talks", "does not walk"}}), ConfigError);
  EXPECT_GE(lex().size(), 40u);
}

TEST(Lexicon, JsonRoundTrip) {
  const Lexicon back = Lexicon::from_json(lex().to_json());
  ASSERT_EQ(back.size(), lex().size());
  EXPECT_EQ(back.to_json(), lex().to_json());
}

TEST(Lexicon, SyntheticEntries) {
  Lexicon l = lex();
  const auto& e = l.add_synthetic("P7");
  EXPECT_EQ(e.predicate, "P7");
  EXPECT_EQ(render_nl(parse_formula("Exists(x, P7(x))"), l), "There exists a student who " + e.affirmative + ".");
}

// Random template-shaped formulas survive render_nl -> parse_nl unchanged,
// and distinct formulas get distinct sentences.
TEST(ParseNl, InvertsRenderNl) {
  Rng rng(123);
  const auto& entries = lex().entries();
  std::map<std::string, std::string> seen;
  for (int i = 0; i < 3000; ++i) {
    auto chain = [&](int n) {
      LiteralChain c;
      c.op = rng.chance(0.5) ? LiteralChain::Op::And : LiteralChain::Op::Or;
      for (int k = 0; k < n; ++k) c.literals.push_back({rng.pick(entries).predicate, rng.chance(0.7)});
      return c.to_formula();
    };
    const auto shape = rng.below(3);
    const Formula f = shape == 0   ? Formula::forall("x", Formula::implies(chain(rng.range(1, 3)), chain(rng.range(1, 2))))
                      : shape == 1 ? Formula::forall("x", chain(rng.range(1, 3)))
                                   : Formula::exists("x", chain(rng.range(1, 3)));
    ASSERT_TRUE(has_nl_template(f));
    const std::string text = render_nl(f, lex());
    ASSERT_EQ(parse_nl(text, lex()), f) << text;
    const auto [it, fresh] = seen.emplace(text, render_fol(f));
    if (!fresh) ASSERT_EQ(it->second, render_fol(f));
  }
}

TEST(AsClause, LowercasesAndDropsPeriod) { EXPECT_EQ(as_clause("Every student passes."), "every student passes"); }

}  // namespace
}  // namespace pqa
