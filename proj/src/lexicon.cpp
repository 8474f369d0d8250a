#include "pqa/lexicon.hpp"

#include <cctype>
#include <sstream>

#include <json.hpp>

#include "pqa/errors.hpp"
#include "pqa/fol.hpp"

namespace pqa {

namespace {

const char* kReservedWords[] = {"and", "or", "also", "who"};

std::vector<std::string> split_words(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream in{std::string(s)};
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

std::string join(const std::vector<std::string>& words, std::size_t begin, std::size_t end) {
  std::string out;
  for (std::size_t i = begin; i < end; ++i) {
    if (i > begin) out += ' ';
    out += words[i];
  }
  return out;
}

void check_phrase(const std::string& predicate, const std::string& phrase) {
  if (phrase.empty()) throw ConfigError("empty phrase for predicate '" + predicate + "'");
  for (const auto& w : split_words(phrase)) {
    for (const char* r : kReservedWords) {
      if (w == r) throw ConfigError("phrase '" + phrase + "' uses reserved word '" + r + "'");
    }
  }
  if (split_words(phrase).size() == 0 || phrase != join(split_words(phrase), 0, split_words(phrase).size()))
    throw ConfigError("phrase '" + phrase + "' must be single-spaced without padding");
}

}  // namespace

Lexicon::Lexicon(std::vector<LexiconEntry> entries) {
  for (auto& e : entries) insert(std::move(e));
}

void Lexicon::insert(LexiconEntry e) {
  if (e.predicate.empty() || !std::isalpha(static_cast<unsigned char>(e.predicate[0])))
    throw ConfigError("invalid predicate name '" + e.predicate + "'");
  for (char c : e.predicate) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_')
      throw ConfigError("invalid predicate name '" + e.predicate + "'");
  }
  if (index_.count(e.predicate)) throw ConfigError("duplicate lexicon entry '" + e.predicate + "'");
  check_phrase(e.predicate, e.affirmative);
  check_phrase(e.predicate, e.negative);
  if (e.affirmative == e.negative) throw ConfigError("identical phrases for '" + e.predicate + "'");
  for (const auto* phrase : {&e.affirmative, &e.negative}) {
    if (phrases_.count(*phrase)) throw ConfigError("phrase '" + *phrase + "' is not unique");
  }
  phrases_[e.affirmative] = Literal{e.predicate, true};
  phrases_[e.negative] = Literal{e.predicate, false};
  index_[e.predicate] = entries_.size();
  entries_.push_back(std::move(e));
}

const LexiconEntry& Lexicon::at(const std::string& predicate) const {
  auto it = index_.find(predicate);
  if (it == index_.end()) throw MissingLexiconEntry(predicate);
  return entries_[it->second];
}

const LexiconEntry& Lexicon::add_synthetic(const std::string& predicate) {
  if (!contains(predicate)) {
    insert({predicate, "satisfies condition " + predicate, "does not satisfy condition " + predicate});
  }
  return at(predicate);
}

std::optional<Literal> Lexicon::literal_for(const std::string& phrase) const {
  auto it = phrases_.find(phrase);
  if (it == phrases_.end()) return std::nullopt;
  return it->second;
}

Lexicon Lexicon::from_json(std::string_view json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("lexicon is not valid JSON: ") + e.what());
  }
  if (!j.is_array()) throw ConfigError("lexicon must be a JSON array");
  std::vector<LexiconEntry> entries;
  for (const auto& item : j) {
    if (!item.is_object() || !item.contains("predicate") || !item.contains("affirmative") ||
        !item.contains("negative"))
      throw ConfigError("lexicon entries need predicate, affirmative and negative");
    entries.push_back({item.at("predicate").get<std::string>(), item.at("affirmative").get<std::string>(),
                       item.at("negative").get<std::string>()});
  }
  return Lexicon(std::move(entries));
}

std::string Lexicon::to_json() const {
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  for (const auto& e : entries_) {
    j.push_back({{"predicate", e.predicate}, {"affirmative", e.affirmative}, {"negative", e.negative}});
  }
  return j.dump(2);
}

Lexicon Lexicon::academic_policy() {
  return Lexicon({
      {"Student", "is enrolled in the course", "is not enrolled in the course"},
      {"Completed80PctAssignments", "completes at least 80% of the assignments",
       "does not complete at least 80% of the assignments"},
      {"PassCourse", "passes the course", "does not pass the course"},
      {"AttendsAllLectures", "attends all lectures", "does not attend all lectures"},
      {"HigherChancePassFinalExam", "has a higher chance of passing the final exam",
       "does not have a higher chance of passing the final exam"},
      {"AttendsTutoringSession", "attends a tutoring session", "does not attend a tutoring session"},
      {"CompletesExtraPractice", "completes extra practice problems", "does not complete extra practice problems"},
      {"MoreLikelyImproveGrades", "is more likely to improve their grades",
       "is not more likely to improve their grades"},
      {"SubmitsResearchPaper", "submits their research paper", "does not submit their research paper"},
      {"OnAcademicProbation", "is on academic probation", "is not on academic probation"},
      {"GraduatesWithHonors", "graduates with honors", "does not graduate with honors"},
      {"EnrollsInThesis", "enrolls in the thesis course", "does not enroll in the thesis course"},
      {"PassesPrerequisite", "passes the prerequisite course", "does not pass the prerequisite course"},
      {"MeetsCreditRequirement", "meets the credit requirement", "does not meet the credit requirement"},
      {"EligibleForGraduation", "is eligible for graduation", "is not eligible for graduation"},
      {"PaysTuition", "pays the tuition fee", "does not pay the tuition fee"},
      {"RegistersOnTime", "registers for courses on time", "does not register for courses on time"},
      {"ReceivesScholarship", "receives a scholarship", "does not receive a scholarship"},
      {"MaintainsHighGpa", "maintains a GPA above 3.5", "does not maintain a GPA above 3.5"},
      {"CompletesInternship", "completes an internship", "does not complete an internship"},
      {"SubmitsCapstone", "submits a capstone project", "does not submit a capstone project"},
      {"PassesEnglishTest", "passes the English proficiency test", "does not pass the English proficiency test"},
      {"AttendsOrientation", "attends the orientation session", "does not attend the orientation session"},
      {"JoinsResearchLab", "joins a research lab", "does not join a research lab"},
      {"TakesSummerCourse", "takes a summer course", "does not take a summer course"},
      {"ExceedsCreditLimit", "exceeds the credit limit", "does not exceed the credit limit"},
      {"ReceivesAcademicWarning", "receives an academic warning", "does not receive an academic warning"},
      {"FailsMidterm", "fails the midterm exam", "does not fail the midterm exam"},
      {"RetakesCourse", "retakes the course", "does not retake the course"},
      {"QualifiesForDeansList", "qualifies for the dean's list", "does not qualify for the dean's list"},
      {"CompletesLabWork", "completes all lab work", "does not complete all lab work"},
      {"SubmitsAssignmentsOnTime", "submits assignments on time", "does not submit assignments on time"},
      {"ViolatesIntegrityPolicy", "violates the academic integrity policy",
       "does not violate the academic integrity policy"},
      {"IsSuspended", "is suspended", "is not suspended"},
      {"AppliesForExemption", "applies for an exemption", "does not apply for an exemption"},
      {"HasMedicalCertificate", "has a medical certificate", "does not have a medical certificate"},
      {"GetsDeadlineExtension", "gets a deadline extension", "does not get a deadline extension"},
      {"PassesFinalExam", "passes the final exam", "does not pass the final exam"},
      {"ParticipatesInClass", "participates in class discussions", "does not participate in class discussions"},
      {"CompletesSafetyModule", "completes the online safety module", "does not complete the online safety module"},
      {"RegistersForElective", "registers for an elective", "does not register for an elective"},
      {"IsFullTimeStudent", "is a full-time student", "is not a full-time student"},
      {"WorksPartTime", "works part-time", "does not work part-time"},
      {"ReceivesFinancialAid", "receives financial aid", "does not receive financial aid"},
      {"AttendsStudyGroup", "attends a study group", "does not attend a study group"},
      {"PassesThesisDefense", "passes the thesis defense", "does not pass the thesis defense"},
      {"HasAdvisorApproval", "has advisor approval", "does not have advisor approval"},
      {"TransfersCredits", "transfers credits from another university",
       "does not transfer credits from another university"},
      {"CompletesCoreCurriculum", "completes the core curriculum", "does not complete the core curriculum"},
      {"WithdrawsFromCourse", "withdraws from the course", "does not withdraw from the course"},
      {"AccessesLibrary", "has access to the university library", "does not have access to the university library"},
      {"PublishesPaper", "publishes a conference paper", "does not publish a conference paper"},
  });
}

// ---------------------------------------------------------------------------
// Natural language

namespace {

struct Template {
  enum class Shape { Rule, Universal, Existential };
  Shape shape;
  LiteralChain first;
  LiteralChain second;  // Rule only
};

std::optional<Template> match_template(const Formula& f) {
  if (!f.is_quantifier()) return std::nullopt;
  const std::string& var = f.symbol();
  const Formula body = f.body();
  Template t;
  if (f.kind() == Formula::Kind::ForAll && body.kind() == Formula::Kind::Implies) {
    if (!as_chain(body.lhs(), var, t.first) || !as_chain(body.rhs(), var, t.second)) return std::nullopt;
    t.shape = Template::Shape::Rule;
    return t;
  }
  if (!as_chain(body, var, t.first)) return std::nullopt;
  t.shape = f.kind() == Formula::Kind::ForAll ? Template::Shape::Universal : Template::Shape::Existential;
  return t;
}

std::string phrase(const Literal& l, const Lexicon& lex) {
  const auto& e = lex.at(l.pred);
  return l.positive ? e.affirmative : e.negative;
}

std::string chain_text(const LiteralChain& c, const Lexicon& lex) {
  std::string out;
  for (std::size_t i = 0; i < c.literals.size(); ++i) {
    if (i) out += c.op == LiteralChain::Op::And ? " and " : " or ";
    out += phrase(c.literals[i], lex);
  }
  return out;
}

std::string generic(const Formula& f, const Lexicon& lex) {
  switch (f.kind()) {
    case Formula::Kind::Pred: {
      const auto& e = lex.at(f.symbol());
      return (f.term().is_var() ? std::string("the student") : f.term().name) + " " + e.affirmative;
    }
    case Formula::Kind::Not:
      if (f.operand().kind() == Formula::Kind::Pred) {
        const Formula a = f.operand();
        const auto& e = lex.at(a.symbol());
        return (a.term().is_var() ? std::string("the student") : a.term().name) + " " + e.negative;
      }
      return "it is not the case that " + generic(f.operand(), lex);
    case Formula::Kind::And:
      return "both " + generic(f.lhs(), lex) + " and " + generic(f.rhs(), lex);
    case Formula::Kind::Or:
      return "either " + generic(f.lhs(), lex) + " or " + generic(f.rhs(), lex);
    case Formula::Kind::Implies:
      return "if " + generic(f.lhs(), lex) + " then " + generic(f.rhs(), lex);
    case Formula::Kind::ForAll:
      return "for every student, " + generic(f.body(), lex);
    case Formula::Kind::Exists:
      return "for some student, " + generic(f.body(), lex);
  }
  return {};
}

LiteralChain parse_chain(const std::vector<std::string>& words, std::size_t begin, std::size_t end,
                         const Lexicon& lex) {
  LiteralChain chain;
  std::optional<std::string> sep;
  std::size_t start = begin;
  auto flush = [&](std::size_t stop) {
    if (stop <= start) throw NlParseError("empty literal in clause");
    const std::string text = join(words, start, stop);
    auto lit = lex.literal_for(text);
    if (!lit) throw NlParseError("unknown phrase '" + text + "'");
    chain.literals.push_back(*lit);
  };
  for (std::size_t i = begin; i < end; ++i) {
    if (words[i] == "and" || words[i] == "or") {
      if (sep && *sep != words[i]) throw NlParseError("clause mixes 'and' with 'or'");
      sep = words[i];
      flush(i);
      start = i + 1;
    }
  }
  flush(end);
  chain.op = sep && *sep == "or" ? LiteralChain::Op::Or : LiteralChain::Op::And;
  return chain;
}

bool starts_with(const std::vector<std::string>& words, std::initializer_list<const char*> prefix) {
  if (words.size() < prefix.size()) return false;
  std::size_t i = 0;
  for (const char* p : prefix) {
    if (words[i++] != p) return false;
  }
  return true;
}

}  // namespace

bool has_nl_template(const Formula& f) { return match_template(f).has_value(); }

std::string render_nl(const Formula& f, const Lexicon& lexicon) {
  if (auto t = match_template(f)) {
    switch (t->shape) {
      case Template::Shape::Rule:
        return "Every student who " + chain_text(t->first, lexicon) + " also " + chain_text(t->second, lexicon) + ".";
      case Template::Shape::Universal:
        return "Every student " + chain_text(t->first, lexicon) + ".";
      case Template::Shape::Existential:
        return "There exists a student who " + chain_text(t->first, lexicon) + ".";
    }
  }
  std::string s = generic(f, lexicon);
  if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s + ".";
}

Formula parse_nl(std::string_view sentence, const Lexicon& lexicon) {
  std::string text(sentence);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.pop_back();
  if (text.empty() || text.back() != '.') throw NlParseError("sentence must end with '.'");
  text.pop_back();
  const auto words = split_words(text);

  if (starts_with(words, {"Every", "student", "who"})) {
    std::size_t also = 0;
    for (std::size_t i = 3; i < words.size(); ++i) {
      if (words[i] == "also") {
        if (also) throw NlParseError("more than one 'also'");
        also = i;
      }
    }
    if (!also) throw NlParseError("rule sentence without 'also'");
    const LiteralChain lhs = parse_chain(words, 3, also, lexicon);
    const LiteralChain rhs = parse_chain(words, also + 1, words.size(), lexicon);
    return Formula::forall("x", Formula::implies(lhs.to_formula(), rhs.to_formula()));
  }
  if (starts_with(words, {"Every", "student"})) {
    return Formula::forall("x", parse_chain(words, 2, words.size(), lexicon).to_formula());
  }
  if (starts_with(words, {"There", "exists", "a", "student", "who"})) {
    return Formula::exists("x", parse_chain(words, 5, words.size(), lexicon).to_formula());
  }
  throw NlParseError("sentence does not match any template: '" + std::string(sentence) + "'");
}

std::string as_clause(std::string sentence) {
  if (!sentence.empty() && sentence.back() == '.') sentence.pop_back();
  if (!sentence.empty()) sentence[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(sentence[0])));
  return sentence;
}

}  // namespace pqa
