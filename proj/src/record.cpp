#include "pqa/record.hpp"

#include <cstdio>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include <json.hpp>

#include "pqa/errors.hpp"

namespace pqa {

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json to_json(const Record& r) {
  ordered_json j;
  j["premises-NL"] = r.premises_nl;
  j["premises-FOL"] = r.premises_fol;
  j["questions"] = r.questions;
  j["answers"] = r.answers;
  j["idx"] = r.idx;
  j["explanation"] = r.explanation;
  return j;
}

std::vector<std::string> strings(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) throw ConfigError(std::string("record lacks \"") + key + "\"");
  const auto& v = j.at(key);
  if (!v.is_array()) throw ConfigError(std::string("\"") + key + "\" must be an array");
  std::vector<std::string> out;
  for (const auto& s : v) {
    if (!s.is_string()) throw ConfigError(std::string("\"") + key + "\" must hold strings");
    out.push_back(s.get<std::string>());
  }
  return out;
}

Record from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("record must be a JSON object");
  Record r;
  r.premises_nl = strings(j, "premises-NL");
  r.premises_fol = strings(j, "premises-FOL");
  r.questions = strings(j, "questions");
  r.answers = strings(j, "answers");
  r.explanation = strings(j, "explanation");
  if (!j.contains("idx") || !j.at("idx").is_array()) throw ConfigError("record lacks an \"idx\" array");
  for (const auto& entry : j.at("idx")) {
    if (!entry.is_array()) throw ConfigError("\"idx\" entries must be arrays");
    std::vector<int> list;
    for (const auto& k : entry) {
      if (!k.is_number_integer()) throw ConfigError("\"idx\" entries must hold integers");
      list.push_back(k.get<int>());
    }
    r.idx.push_back(std::move(list));
  }
  return r;
}

nlohmann::json parse_json(std::string_view text) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
}

}  // namespace

std::string write_dataset(const std::vector<Record>& records) {
  ordered_json j = ordered_json::array();
  for (const auto& r : records) j.push_back(to_json(r));
  return j.dump(2) + "\n";
}

std::string write_record(const Record& record) { return to_json(record).dump(2) + "\n"; }

std::vector<Record> read_dataset(std::string_view json_text) {
  const auto j = parse_json(json_text);
  if (!j.is_array()) throw ConfigError("dataset must be a JSON array of records");
  std::vector<Record> out;
  for (const auto& item : j) out.push_back(from_json(item));
  return out;
}

Record read_record(std::string_view json_text) { return from_json(parse_json(json_text)); }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw ConfigError("cannot write '" + path + "'");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) throw ConfigError("cannot move '" + tmp + "' to '" + path + "'");
}

std::string_view to_string(QuestionKind k) {
  switch (k) {
    case QuestionKind::YesNoUncertain: return "yes-no-uncertain";
    case QuestionKind::MultipleChoice: return "multiple-choice";
    case QuestionKind::Numerical: return "numerical";
  }
  return "?";
}

namespace {

constexpr std::string_view kYesNoLead = "Is this statement true?\nStatement: ";
constexpr std::string_view kMcLead = "Which statement can be inferred?";

const std::pair<NumericKind, const char*> kNumericTexts[] = {
    {NumericKind::TotalCredits, "How many credits has the student completed so far?"},
    {NumericKind::RemainingCredits, "How many more credits does the student need to graduate?"},
    {NumericKind::TermsNeeded,
     "How many more terms does the student need to graduate if they take the maximum number of credits each term?"},
};

}  // namespace

std::string yesno_question(const std::string& statement) { return std::string(kYesNoLead) + statement; }

std::string mc_question(const std::vector<std::string>& options) {
  std::string out(kMcLead);
  for (std::size_t i = 0; i < options.size(); ++i) {
    out += "\n";
    out += static_cast<char>('A' + i);
    out += ". " + options[i];
  }
  return out;
}

std::string numeric_question(NumericKind kind) {
  for (const auto& [k, text] : kNumericTexts)
    if (k == kind) return text;
  return {};
}

std::optional<ParsedQuestion> parse_question(std::string_view text) {
  ParsedQuestion q;
  if (text.substr(0, kYesNoLead.size()) == kYesNoLead) {
    q.kind = QuestionKind::YesNoUncertain;
    q.statement = std::string(text.substr(kYesNoLead.size()));
    if (q.statement.empty()) return std::nullopt;
    return q;
  }
  if (text.substr(0, kMcLead.size()) == kMcLead) {
    q.kind = QuestionKind::MultipleChoice;
    std::istringstream lines{std::string(text.substr(kMcLead.size()))};
    std::string line;
    while (std::getline(lines, line)) {
      if (line.empty()) continue;
      const char expected = static_cast<char>('A' + q.options.size());
      if (line.size() < 4 || line[0] != expected || line[1] != '.' || line[2] != ' ') return std::nullopt;
      q.options.push_back(line.substr(3));
    }
    if (q.options.size() < 2) return std::nullopt;
    return q;
  }
  for (const auto& [k, t] : kNumericTexts) {
    if (text == t) {
      q.kind = QuestionKind::Numerical;
      q.numeric = k;
      return q;
    }
  }
  return std::nullopt;
}

Formula QuantityFact::to_formula() const {
  switch (kind) {
    case Kind::Earned:
      return ground("EarnedCreditsTerm" + std::to_string(term) + "_" + std::to_string(value), "student");
    case Kind::Required: return ground("RequiredCredits_" + std::to_string(value), "program");
    case Kind::PerTermCap: return ground("MaxCreditsPerTerm_" + std::to_string(value), "term");
  }
  return ground("Unknown", "student");
}

std::string QuantityFact::to_nl() const {
  switch (kind) {
    case Kind::Earned:
      return "The student earned " + std::to_string(value) + " credits in term " + std::to_string(term) + ".";
    case Kind::Required: return "The program requires " + std::to_string(value) + " credits to graduate.";
    case Kind::PerTermCap: return "A student can take at most " + std::to_string(value) + " credits per term.";
  }
  return {};
}

namespace {

int to_int(const std::string& digits) {
  if (digits.size() > 6) return -1;
  return std::stoi(digits);
}

std::optional<QuantityFact> make_fact(QuantityFact::Kind kind, const std::string& value, const std::string& term) {
  QuantityFact f;
  f.kind = kind;
  f.value = to_int(value);
  f.term = term.empty() ? 0 : to_int(term);
  if (f.value < 0 || f.term < 0) return std::nullopt;
  return f;
}

}  // namespace

std::optional<QuantityFact> quantity_fact(const Formula& f) {
  if (f.kind() != Formula::Kind::Pred || f.term().is_var()) return std::nullopt;
  static const std::regex earned(R"(EarnedCreditsTerm([0-9]+)_([0-9]+))");
  static const std::regex required(R"(RequiredCredits_([0-9]+))");
  static const std::regex cap(R"(MaxCreditsPerTerm_([0-9]+))");
  std::smatch m;
  const std::string& name = f.symbol();
  const std::string& arg = f.term().name;
  if (arg == "student" && std::regex_match(name, m, earned)) return make_fact(QuantityFact::Kind::Earned, m[2], m[1]);
  if (arg == "program" && std::regex_match(name, m, required)) return make_fact(QuantityFact::Kind::Required, m[1], "");
  if (arg == "term" && std::regex_match(name, m, cap)) return make_fact(QuantityFact::Kind::PerTermCap, m[1], "");
  return std::nullopt;
}

std::optional<QuantityFact> quantity_fact_from_nl(std::string_view sentence) {
  static const std::regex earned(R"(The student earned ([0-9]+) credits in term ([0-9]+)\.)");
  static const std::regex required(R"(The program requires ([0-9]+) credits to graduate\.)");
  static const std::regex cap(R"(A student can take at most ([0-9]+) credits per term\.)");
  std::smatch m;
  const std::string s(sentence);
  if (std::regex_match(s, m, earned)) return make_fact(QuantityFact::Kind::Earned, m[1], m[2]);
  if (std::regex_match(s, m, required)) return make_fact(QuantityFact::Kind::Required, m[1], "");
  if (std::regex_match(s, m, cap)) return make_fact(QuantityFact::Kind::PerTermCap, m[1], "");
  return std::nullopt;
}

std::vector<int> cited_premises(std::string_view explanation) {
  static const std::regex cite(R"(\bPremise ([0-9]+))");
  std::set<int> found;
  const std::string s(explanation);
  for (auto it = std::sregex_iterator(s.begin(), s.end(), cite); it != std::sregex_iterator(); ++it) {
    found.insert(to_int((*it)[1]));
  }
  return {found.begin(), found.end()};
}

}  // namespace pqa
