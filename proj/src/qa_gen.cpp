#include "pqa/qa_gen.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>

#include "pqa/errors.hpp"
#include "pqa/fol.hpp"

namespace pqa {

namespace {

constexpr int kQuestionAttempts = 200;
constexpr int kDistractorAttempts = 80;

using Op = LiteralChain::Op;
using Kind = PremiseShape::Kind;

std::string answer_word(EntailmentStatus s) {
  switch (s) {
    case EntailmentStatus::Yes: return "Yes";
    case EntailmentStatus::No: return "No";
    case EntailmentStatus::Uncertain: return "Uncertain";
  }
  return "Uncertain";
}

// "Premise 2 states that ... Premise 4 says that ..." for each index.
std::string cite(const std::vector<int>& idx, const std::vector<std::string>& nl) {
  std::string out;
  for (std::size_t k = 0; k < idx.size(); ++k) {
    const int i = idx[k];
    const std::string clause = i >= 1 && static_cast<std::size_t>(i) <= nl.size() ? as_clause(nl[i - 1]) : "";
    out += "Premise " + std::to_string(i) + (k == 0 ? " states that " : " says that ") + clause + ". ";
  }
  return out;
}

std::string join_plus(const std::vector<int>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) out += (i ? " + " : "") + std::to_string(values[i]);
  return out;
}

Solution solve_numeric(std::span<const Formula> premises, const std::vector<std::string>& nl, NumericKind kind) {
  std::vector<std::pair<int, QuantityFact>> earned;
  std::vector<std::pair<int, QuantityFact>> required, cap;
  for (std::size_t i = 0; i < premises.size(); ++i) {
    const auto fact = quantity_fact(premises[i]);
    if (!fact) continue;
    const int index = static_cast<int>(i) + 1;
    switch (fact->kind) {
      case QuantityFact::Kind::Earned: earned.emplace_back(index, *fact); break;
      case QuantityFact::Kind::Required: required.emplace_back(index, *fact); break;
      case QuantityFact::Kind::PerTermCap: cap.emplace_back(index, *fact); break;
    }
  }
  if (earned.empty()) throw NoSupport("no completed-credit premises");
  std::sort(earned.begin(), earned.end(), [](const auto& a, const auto& b) { return a.second.term < b.second.term; });
  std::vector<int> idx, values;
  int total = 0;
  for (const auto& [i, f] : earned) {
    idx.push_back(i);
    values.push_back(f.value);
    total += f.value;
  }
  Solution s;
  std::string tail;
  const std::string sum_text = values.size() == 1 ? std::to_string(total) : join_plus(values) + " = " + std::to_string(total);
  if (kind == NumericKind::TotalCredits) {
    s.answer = std::to_string(total);
    tail = "Therefore the student has completed " + sum_text + " credits.";
  } else {
    if (required.size() != 1) throw NoSupport("expected exactly one credit requirement premise");
    idx.push_back(required[0].first);
    const int req = required[0].second.value;
    const int remaining = std::max(0, req - total);
    if (kind == NumericKind::RemainingCredits) {
      s.answer = std::to_string(remaining);
      tail = "The student has completed " + sum_text + " credits, so they need " + std::to_string(req) + " - " +
             std::to_string(total) + " = " + std::to_string(remaining) + " more credits.";
    } else {
      if (cap.size() != 1) throw NoSupport("expected exactly one per-term cap premise");
      idx.push_back(cap[0].first);
      const int per_term = cap[0].second.value;
      if (per_term <= 0) throw NoSupport("per-term cap must be positive");
      const int terms = (remaining + per_term - 1) / per_term;
      s.answer = std::to_string(terms);
      tail = "The student still needs " + std::to_string(req) + " - " + std::to_string(total) + " = " +
             std::to_string(remaining) + " credits, and at " + std::to_string(per_term) +
             " credits per term that takes " + std::to_string(terms) + " more terms.";
    }
  }
  std::sort(idx.begin(), idx.end());
  s.idx = idx;
  s.explanation = cite(idx, nl) + tail;
  return s;
}

bool renderable(const Formula& f, const Lexicon& lexicon) {
  if (!has_nl_template(f)) return false;
  for (const auto& p : predicates(f))
    if (!lexicon.contains(p)) return false;
  return true;
}

std::set<std::string> renderings(std::span<const Formula> fs) {
  std::set<std::string> out;
  for (const auto& f : fs) out.insert(render_fol(f));
  return out;
}

std::optional<Formula> body_formula(Kind kind, std::vector<Literal> lits, Op op = Op::And) {
  LiteralChain c;
  c.op = op;
  for (const auto& l : lits)
    if (std::find(c.literals.begin(), c.literals.end(), l) == c.literals.end()) c.literals.push_back(l);
  if (c.literals.empty()) return std::nullopt;
  if (c.literals.size() == 1) c.op = Op::And;
  for (const auto& l : c.literals)
    if (std::find(c.literals.begin(), c.literals.end(), Literal{l.pred, !l.positive}) != c.literals.end())
      return std::nullopt;
  return PremiseShape{kind, c, {}}.to_formula();
}

std::optional<Formula> rule_formula(std::vector<Literal> lhs, std::vector<Literal> rhs, Op lop = Op::And,
                                    Op rop = Op::And) {
  auto a = body_formula(Kind::Universal, lhs, lop);
  auto b = body_formula(Kind::Universal, rhs, rop);
  if (!a || !b) return std::nullopt;
  for (const auto& l : lhs)
    for (const auto& r : rhs)
      if (l.pred == r.pred) return std::nullopt;
  return Formula::forall("x", Formula::implies(a->body(), b->body()));
}

bool conjunctive(const LiteralChain& c) { return c.op == Op::And || c.literals.size() == 1; }

// A goal whose negation follows from `g`.
std::optional<Formula> refutation_of(const Formula& g, Rng& rng) {
  const auto s = premise_shape(g);
  if (!s) return std::nullopt;
  switch (s->kind) {
    case Kind::Rule: {
      std::vector<Literal> lits;
      if (conjunctive(s->lhs)) lits = s->lhs.literals;
      else lits.push_back(rng.pick(s->lhs.literals));
      if (conjunctive(s->rhs)) {
        const Literal r = rng.pick(s->rhs.literals);
        lits.push_back({r.pred, !r.positive});
      } else {
        for (const auto& r : s->rhs.literals) lits.push_back({r.pred, !r.positive});
      }
      return body_formula(Kind::Existential, lits);
    }
    case Kind::Existential: {
      if (!conjunctive(s->lhs)) return std::nullopt;
      if (s->lhs.literals.size() == 1) {
        const Literal l = s->lhs.literals[0];
        return body_formula(Kind::Universal, {{l.pred, !l.positive}});
      }
      auto lits = s->lhs.literals;
      rng.shuffle(lits);
      return rule_formula({lits[0]}, {{lits[1].pred, !lits[1].positive}});
    }
    case Kind::Universal: {
      if (conjunctive(s->lhs)) {
        const Literal l = rng.pick(s->lhs.literals);
        return body_formula(Kind::Existential, {{l.pred, !l.positive}});
      }
      std::vector<Literal> lits;
      for (const auto& l : s->lhs.literals) lits.push_back({l.pred, !l.positive});
      return body_formula(Kind::Existential, lits);
    }
  }
  return std::nullopt;
}

std::optional<Formula> derived_candidate(std::span<const Formula> premises, Rng& rng) {
  if (premises.empty()) return std::nullopt;
  const Formula& a = premises[rng.below(premises.size())];
  const Formula& b = premises[rng.below(premises.size())];
  auto g = derive(a, b, rng);
  if (g && rng.chance(0.3)) {
    if (auto h = derive(*g, premises[rng.below(premises.size())], rng)) g = h;
  }
  return g;
}

std::vector<std::string> vocabulary(std::span<const Formula> premises, const Lexicon& lexicon, Rng& rng) {
  std::vector<std::string> names;
  for (const auto& p : predicates(std::vector<Formula>(premises.begin(), premises.end()))) {
    if (lexicon.contains(p)) names.push_back(p);
  }
  // Occasionally a predicate the premises never mention.
  const int extra = names.size() < 3 ? 3 : rng.chance(0.3) ? 1 : 0;
  for (int i = 0; i < extra; ++i) {
    const auto& e = rng.pick(lexicon.entries());
    if (std::find(names.begin(), names.end(), e.predicate) == names.end()) names.push_back(e.predicate);
  }
  return names;
}

std::optional<Formula> random_goal(std::span<const Formula> premises, const Lexicon& lexicon, Rng& rng) {
  auto names = vocabulary(premises, lexicon, rng);
  if (names.size() < 2) return std::nullopt;
  rng.shuffle(names);
  auto lit = [&](std::size_t i) { return Literal{names[i], rng.chance(0.7)}; };
  if (rng.chance(0.25)) return body_formula(Kind::Existential, {lit(0), lit(1)});
  if (names.size() >= 3 && rng.chance(0.4)) {
    return rule_formula({lit(0), lit(1)}, {lit(2)}, rng.chance(0.5) ? Op::And : Op::Or);
  }
  return rule_formula({lit(0)}, {lit(1)});
}

// Swaps one consequent (or body) literal for another predicate.
std::optional<Formula> mutate(const Formula& g, std::span<const Formula> premises, const Lexicon& lexicon, Rng& rng) {
  auto s = premise_shape(g);
  if (!s) return std::nullopt;
  const auto names = vocabulary(premises, lexicon, rng);
  LiteralChain& target = s->kind == Kind::Rule && rng.chance(0.7) ? s->rhs : s->lhs;
  Literal& l = target.literals[rng.below(target.literals.size())];
  if (rng.chance(0.4)) l.positive = !l.positive;
  else l = {rng.pick(names), rng.chance(0.7)};
  if (s->kind == Kind::Rule) return rule_formula(s->lhs.literals, s->rhs.literals, s->lhs.op, s->rhs.op);
  return body_formula(s->kind, s->lhs.literals, s->lhs.op);
}

bool unique_support(std::span<const Formula> premises, const Formula& goal, EntailmentStatus status,
                    SolverBackend& backend) {
  return minimum_supports(premises, goal, status, backend, 2).size() == 1;
}

}  // namespace

std::string question_text(const QuestionSpec& spec, const Lexicon& lexicon) {
  switch (spec.kind) {
    case QuestionKind::YesNoUncertain: return yesno_question(render_nl(*spec.goal, lexicon));
    case QuestionKind::MultipleChoice: {
      std::vector<std::string> options;
      for (const auto& f : spec.options) options.push_back(render_nl(f, lexicon));
      return mc_question(options);
    }
    case QuestionKind::Numerical: return numeric_question(spec.numeric);
  }
  return {};
}

QuestionSpec spec_from_text(std::string_view question, const Lexicon& lexicon) {
  const auto parsed = parse_question(question);
  if (!parsed) throw NlParseError("unrecognized question format");
  QuestionSpec spec;
  spec.kind = parsed->kind;
  switch (parsed->kind) {
    case QuestionKind::YesNoUncertain: spec.goal = parse_nl(parsed->statement, lexicon); break;
    case QuestionKind::MultipleChoice:
      for (const auto& o : parsed->options) spec.options.push_back(parse_nl(o, lexicon));
      break;
    case QuestionKind::Numerical: spec.numeric = parsed->numeric; break;
  }
  return spec;
}

Solution answer_question(std::span<const Formula> premises, const std::vector<std::string>& premises_nl,
                         const QuestionSpec& spec, SolverBackend& backend) {
  Solution s;
  switch (spec.kind) {
    case QuestionKind::YesNoUncertain: {
      const Formula& goal = *spec.goal;
      s.status = entails(premises, goal, backend);
      s.answer = answer_word(s.status);
      if (s.status == EntailmentStatus::Uncertain) {
        s.idx = related_premises(premises, goal);
        s.explanation = s.idx.empty() ? "No premise mentions the conditions in the statement, so the answer is Uncertain."
                                      : cite(s.idx, premises_nl) +
                                            "These premises neither confirm nor refute the statement, so the answer "
                                            "is Uncertain.";
        return s;
      }
      s.idx = minimal_support(premises, goal, s.status, backend).indices;
      if (s.idx.empty()) {
        s.explanation = s.status == EntailmentStatus::Yes
                            ? "The statement holds regardless of the premises, so the answer is Yes."
                            : "The statement can never hold, so the answer is No.";
      } else {
        s.explanation = cite(s.idx, premises_nl) + (s.status == EntailmentStatus::Yes
                                                        ? "Together these entail the statement, so the answer is Yes."
                                                        : "Together these contradict the statement, so the answer is No.");
      }
      return s;
    }
    case QuestionKind::MultipleChoice: {
      int entailed = -1, count = 0;
      for (std::size_t i = 0; i < spec.options.size(); ++i) {
        if (entails(premises, spec.options[i], backend) == EntailmentStatus::Yes) {
          entailed = static_cast<int>(i);
          ++count;
        }
      }
      if (count != 1) throw NoSupport(std::to_string(count) + " options are entailed");
      const char letter = static_cast<char>('A' + entailed);
      s.status = EntailmentStatus::Yes;
      s.answer = std::string(1, letter);
      s.idx = minimal_support(premises, spec.options[entailed], EntailmentStatus::Yes, backend).indices;
      s.explanation = cite(s.idx, premises_nl) + "Therefore option " + s.answer + " follows.";
      return s;
    }
    case QuestionKind::Numerical: return solve_numeric(premises, premises_nl, spec.numeric);
  }
  return s;
}

GeneratedQuestion gen_yesno(std::span<const Formula> premises, const std::vector<std::string>& premises_nl, Rng& rng,
                            const Lexicon& lexicon, SolverBackend& backend, std::optional<EntailmentStatus> target) {
  const EntailmentStatus want = target ? *target : static_cast<EntailmentStatus>(rng.below(3));
  const auto existing = renderings(premises);
  for (int attempt = 0; attempt < kQuestionAttempts; ++attempt) {
    std::optional<Formula> goal;
    switch (want) {
      case EntailmentStatus::Yes: goal = derived_candidate(premises, rng); break;
      case EntailmentStatus::No: {
        auto base = rng.chance(0.4) ? std::optional<Formula>(premises[rng.below(premises.size())])
                                    : derived_candidate(premises, rng);
        if (base) goal = refutation_of(*base, rng);
        break;
      }
      case EntailmentStatus::Uncertain: goal = random_goal(premises, lexicon, rng); break;
    }
    if (!goal || !renderable(*goal, lexicon) || existing.count(render_fol(*goal))) continue;
    if (entails(premises, *goal, backend) != want) continue;
    if (want != EntailmentStatus::Uncertain && !unique_support(premises, *goal, want, backend)) continue;
    GeneratedQuestion q;
    q.spec.kind = QuestionKind::YesNoUncertain;
    q.spec.goal = goal;
    q.text = question_text(q.spec, lexicon);
    q.solution = answer_question(premises, premises_nl, q.spec, backend);
    return q;
  }
  throw GenerationExhausted("no " + answer_word(want) + " statement after " + std::to_string(kQuestionAttempts) +
                            " candidates");
}

GeneratedQuestion gen_mc(std::span<const Formula> premises, const std::vector<std::string>& premises_nl, Rng& rng,
                         const Lexicon& lexicon, SolverBackend& backend) {
  const auto existing = renderings(premises);
  for (int attempt = 0; attempt < kQuestionAttempts; ++attempt) {
    const auto correct = derived_candidate(premises, rng);
    if (!correct || !renderable(*correct, lexicon) || existing.count(render_fol(*correct))) continue;
    if (entails(premises, *correct, backend) != EntailmentStatus::Yes) continue;
    if (!unique_support(premises, *correct, EntailmentStatus::Yes, backend)) continue;

    std::vector<Formula> options{*correct};
    std::set<std::string> used{render_fol(*correct)};
    for (int d = 0; d < kDistractorAttempts && options.size() < 4; ++d) {
      std::optional<Formula> cand;
      switch (rng.below(3)) {
        case 0: cand = mutate(*correct, premises, lexicon, rng); break;
        case 1: cand = refutation_of(*correct, rng); break;
        default: cand = random_goal(premises, lexicon, rng); break;
      }
      if (!cand || !renderable(*cand, lexicon) || used.count(render_fol(*cand))) continue;
      if (entails(premises, *cand, backend) == EntailmentStatus::Yes) continue;
      used.insert(render_fol(*cand));
      options.push_back(*cand);
    }
    if (options.size() < 4) continue;
    rng.shuffle(options);
    GeneratedQuestion q;
    q.spec.kind = QuestionKind::MultipleChoice;
    q.spec.options = options;
    q.text = question_text(q.spec, lexicon);
    q.solution = answer_question(premises, premises_nl, q.spec, backend);
    return q;
  }
  throw GenerationExhausted("no multiple-choice question after " + std::to_string(kQuestionAttempts) + " candidates");
}

NumericItem gen_numeric(Rng& rng, const Lexicon& lexicon, SolverBackend& backend, const NumericRanges& ranges,
                        int question_count) {
  if (ranges.min_terms < 1 || ranges.max_terms < ranges.min_terms || ranges.min_credits < 0 ||
      ranges.max_credits < ranges.min_credits || ranges.min_cap < 1 || ranges.max_cap < ranges.min_cap ||
      ranges.max_required < ranges.min_required || ranges.max_noise < 0)
    throw InvalidParams("inconsistent numeric ranges");
  std::vector<QuantityFact> facts;
  const int terms = rng.range(ranges.min_terms, ranges.max_terms);
  int total = 0;
  for (int t = 1; t <= terms; ++t) {
    const int credits = rng.range(ranges.min_credits, ranges.max_credits);
    total += credits;
    facts.push_back({QuantityFact::Kind::Earned, credits, t});
  }
  const int required = std::max(rng.range(ranges.min_required, ranges.max_required), total + rng.range(1, 30));
  facts.push_back({QuantityFact::Kind::Required, required, 0});
  facts.push_back({QuantityFact::Kind::PerTermCap, rng.range(ranges.min_cap, ranges.max_cap), 0});

  NumericItem item;
  for (const auto& f : facts) item.premises.push_back(f.to_formula());
  std::vector<std::string> names;
  for (const auto& e : lexicon.entries()) names.push_back(e.predicate);
  rng.shuffle(names);
  const int noise = rng.range(0, ranges.max_noise);
  for (int i = 0; i < noise && names.size() >= 3; ++i) {
    std::vector<std::string> three(names.end() - 3, names.end());
    names.resize(names.size() - 3);
    item.premises.push_back(generate_original(rng, three));
  }
  rng.shuffle(item.premises);
  for (const auto& f : item.premises) {
    const auto fact = quantity_fact(f);
    item.premises_nl.push_back(fact ? fact->to_nl() : render_nl(f, lexicon));
  }

  std::vector<NumericKind> kinds{NumericKind::TotalCredits, NumericKind::RemainingCredits, NumericKind::TermsNeeded};
  rng.shuffle(kinds);
  kinds.resize(std::clamp(question_count, 1, 3));
  for (NumericKind k : kinds) {
    GeneratedQuestion q;
    q.spec.kind = QuestionKind::Numerical;
    q.spec.numeric = k;
    q.text = question_text(q.spec, lexicon);
    q.solution = answer_question(item.premises, item.premises_nl, q.spec, backend);
    item.questions.push_back(q);
  }
  return item;
}

std::vector<Formula> ordered_premises(const PremisePool& pool, std::uint64_t shuffle_seed) {
  auto all = pool.all();
  Rng rng(shuffle_seed);
  rng.shuffle(all);
  return all;
}

Record assemble_record(std::span<const Formula> premises, const std::vector<std::string>& premises_nl,
                       const std::vector<QuestionSpec>& specs, const Lexicon& lexicon, SolverBackend& backend) {
  if (specs.empty()) throw InvalidParams("a record needs at least one question");
  Record r;
  r.premises_nl = premises_nl;
  for (const auto& f : premises) r.premises_fol.push_back(render_fol(f));
  for (const auto& spec : specs) {
    Solution s;
    try {
      s = answer_question(premises, premises_nl, spec, backend);
    } catch (const NoSupport& e) {
      throw RecordRejected(std::string("unanswerable question: ") + e.what());
    }
    r.questions.push_back(question_text(spec, lexicon));
    r.answers.push_back(s.answer);
    r.idx.push_back(s.idx);
    r.explanation.push_back(s.explanation);
  }
  const auto report = check_record(r, lexicon, backend);
  if (!report.ok()) throw RecordRejected(report.violations.front().kind);
  return r;
}

Record assemble_record(const PremisePool& pool, const std::vector<QuestionSpec>& specs, const Lexicon& lexicon,
                       SolverBackend& backend, std::uint64_t shuffle_seed) {
  const auto premises = ordered_premises(pool, shuffle_seed);
  std::vector<std::string> nl;
  for (const auto& f : premises) nl.push_back(render_nl(f, lexicon));
  return assemble_record(premises, nl, specs, lexicon, backend);
}

std::string Violation::to_string() const {
  std::string out = kind;
  if (question > 0) out += ", question " + std::to_string(question);
  if (!detail.empty()) out += ": " + detail;
  return out;
}

Lexicon lexicon_for(const Lexicon& base, std::span<const Formula> premises) {
  Lexicon out = base;
  for (const auto& f : premises) {
    if (quantity_fact(f)) continue;
    for (const auto& p : predicates(f))
      if (!out.contains(p)) out.add_synthetic(p);
  }
  return out;
}

namespace {

bool canonical_answer(const std::string& a, const QuestionSpec& spec) {
  switch (spec.kind) {
    case QuestionKind::YesNoUncertain: return a == "Yes" || a == "No" || a == "Uncertain";
    case QuestionKind::MultipleChoice:
      return a.size() == 1 && a[0] >= 'A' && a[0] < static_cast<char>('A' + spec.options.size()) && a[0] <= 'D';
    case QuestionKind::Numerical: {
      if (a.empty()) return false;
      const std::size_t start = a[0] == '-' ? 1 : 0;
      if (start == a.size()) return false;
      if (a.size() > start + 1 && a[start] == '0') return false;
      return std::all_of(a.begin() + static_cast<long>(start), a.end(), [](char c) { return std::isdigit(c); });
    }
  }
  return false;
}

std::string list_text(const std::vector<int>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + std::to_string(v[i]);
  return out + "]";
}

}  // namespace

ValidationReport check_record(const Record& r, const Lexicon& lexicon, SolverBackend& backend) {
  ValidationReport report;
  auto add = [&](int q, std::string kind, std::string detail = {}) {
    report.violations.push_back({q, std::move(kind), std::move(detail)});
  };
  if (r.premises_nl.size() != r.premises_fol.size()) {
    add(0, "premise lists misaligned",
        std::to_string(r.premises_nl.size()) + " NL vs " + std::to_string(r.premises_fol.size()) + " FOL");
  }
  const std::size_t nq = r.questions.size();
  if (r.answers.size() != nq || r.idx.size() != nq || r.explanation.size() != nq) {
    add(0, "question lists misaligned");
    return report;
  }
  if (nq == 0) add(0, "no questions");
  std::vector<Formula> premises;
  for (std::size_t i = 0; i < r.premises_fol.size(); ++i) {
    try {
      premises.push_back(parse_formula(r.premises_fol[i]));
    } catch (const Error& e) {
      add(0, "premise unparseable", "premise " + std::to_string(i + 1) + ": " + e.what());
      return report;
    }
    if (!is_closed(premises.back())) add(0, "premise not closed", "premise " + std::to_string(i + 1));
  }
  if (!report.ok()) return report;
  if (!is_satisfiable(premises, backend)) {
    add(0, "premises inconsistent");
    return report;
  }
  const Lexicon lex = lexicon_for(lexicon, premises);
  const int n = static_cast<int>(premises.size());

  for (std::size_t qi = 0; qi < nq; ++qi) {
    const int q = static_cast<int>(qi) + 1;
    QuestionSpec spec;
    try {
      spec = spec_from_text(r.questions[qi], lex);
    } catch (const Error& e) {
      add(q, "question unparseable", e.what());
      continue;
    }
    if (!canonical_answer(r.answers[qi], spec)) add(q, "answer not canonical", "'" + r.answers[qi] + "'");
    Solution expected;
    try {
      expected = answer_question(premises, r.premises_nl, spec, backend);
    } catch (const NoSupport& e) {
      add(q, "question unanswerable", e.what());
      continue;
    }
    if (r.answers[qi] != expected.answer) {
      add(q, "answer mismatch", "stored '" + r.answers[qi] + "', derived '" + expected.answer + "'");
    }

    const auto& idx = r.idx[qi];
    bool well_formed = true;
    for (std::size_t k = 0; k < idx.size(); ++k) {
      if (idx[k] < 1 || idx[k] > n || (k > 0 && idx[k] <= idx[k - 1])) well_formed = false;
    }
    if (!well_formed) {
      add(q, "idx malformed", list_text(idx));
    } else if (spec.kind == QuestionKind::Numerical ||
               (spec.kind == QuestionKind::YesNoUncertain && expected.status == EntailmentStatus::Uncertain)) {
      if (idx != expected.idx) {
        const bool superset = std::includes(idx.begin(), idx.end(), expected.idx.begin(), expected.idx.end());
        add(q, superset && spec.kind == QuestionKind::Numerical ? "idx not minimal" : "idx mismatch",
            "stored " + list_text(idx) + ", derived " + list_text(expected.idx));
      }
    } else {
      const Formula goal =
          spec.kind == QuestionKind::MultipleChoice ? spec.options[expected.answer[0] - 'A'] : *spec.goal;
      const auto minima = minimum_supports(premises, goal, expected.status, backend, 2);
      if (!supports(premises, idx, goal, expected.status, backend)) {
        add(q, "idx does not support answer", list_text(idx));
      } else if (!minima.empty() && idx.size() > minima.front().indices.size()) {
        add(q, "idx not minimal", list_text(idx) + " but " + list_text(minima.front().indices) + " suffices");
      }
      if (minima.size() > 1) {
        add(q, "minimal support not unique", list_text(minima[0].indices) + " and " + list_text(minima[1].indices));
      }
    }
    const auto cited = cited_premises(r.explanation[qi]);
    std::vector<int> sorted_idx = idx;
    std::sort(sorted_idx.begin(), sorted_idx.end());
    sorted_idx.erase(std::unique(sorted_idx.begin(), sorted_idx.end()), sorted_idx.end());
    if (cited != sorted_idx) {
      add(q, "explanation citations differ from idx", "cites " + list_text(cited) + ", idx " + list_text(idx));
    }
  }
  return report;
}

DatasetStats dataset_stats(const std::vector<Record>& records) {
  DatasetStats s;
  s.total_records = records.size();
  if (records.empty()) return s;
  std::size_t premises = 0, words = 0;
  for (const auto& r : records) {
    premises += r.premises_nl.size();
    s.max_premises_per_record = std::max(s.max_premises_per_record, r.premises_nl.size());
    for (const auto& p : r.premises_nl) {
      std::istringstream in(p);
      std::string w;
      while (in >> w) ++words;
    }
    bool ynu = false, mc = false, num = false;
    for (std::size_t i = 0; i < r.questions.size(); ++i) {
      const auto parsed = parse_question(r.questions[i]);
      QuestionKind kind;
      if (parsed) {
        kind = parsed->kind;
      } else {
        const std::string a = i < r.answers.size() ? r.answers[i] : "";
        kind = a.size() == 1 && std::isupper(static_cast<unsigned char>(a[0])) ? QuestionKind::MultipleChoice
               : !a.empty() && std::all_of(a.begin(), a.end(), [](char c) { return std::isdigit(c); })
                   ? QuestionKind::Numerical
                   : QuestionKind::YesNoUncertain;
      }
      ynu |= kind == QuestionKind::YesNoUncertain;
      mc |= kind == QuestionKind::MultipleChoice;
      num |= kind == QuestionKind::Numerical;
    }
    s.ynu_records += ynu;
    s.mc_records += mc;
    s.numerical_records += num;
    for (const auto& i : r.idx) s.max_inference_steps = std::max(s.max_inference_steps, i.size());
  }
  s.avg_premise_count = static_cast<double>(premises) / static_cast<double>(records.size());
  s.avg_premise_length_words = static_cast<double>(words) / static_cast<double>(records.size());
  return s;
}

std::string format_stats(const DatasetStats& s) {
  char buf[1024];
  std::snprintf(buf, sizeof buf,
                "%-40s %10zu\n%-40s %10.2f\n%-40s %10.2f\n%-40s %10zu\n%-40s %10zu\n%-40s %10zu\n%-40s %10zu\n"
                "%-40s %10zu\n",
                "Total Records", s.total_records, "Average Premise Count per Record", s.avg_premise_count,
                "Average Premise Length (Words)", s.avg_premise_length_words, "Yes/No/Uncertain Records",
                s.ynu_records, "Multiple-Choice Records", s.mc_records, "Numerical Records", s.numerical_records,
                "Maximum Inference Steps", s.max_inference_steps, "Maximum Premises per Record",
                s.max_premises_per_record);
  return buf;
}

}  // namespace pqa
