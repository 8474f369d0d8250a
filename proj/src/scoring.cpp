#include "pqa/scoring.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <regex>
#include <set>
#include <tuple>

#include <json.hpp>

#include "pqa/errors.hpp"

namespace pqa {

std::string_view to_string(Round r) { return r == Round::Selection ? "selection" : "final"; }

Round parse_round(std::string_view text) {
  if (text == "selection") return Round::Selection;
  if (text == "final") return Round::Final;
  throw ConfigError("round must be 'selection' or 'final', got '" + std::string(text) + "'");
}

namespace {

std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace

std::optional<std::string> normalize_answer(std::string_view raw, QuestionKind kind) {
  std::string t = trim(raw);
  switch (kind) {
    case QuestionKind::YesNoUncertain: {
      if (!t.empty() && t.back() == '.') t.pop_back();
      const std::string l = lower(t);
      if (l == "yes") return "Yes";
      if (l == "no") return "No";
      if (l == "uncertain") return "Uncertain";
      return std::nullopt;
    }
    case QuestionKind::MultipleChoice: {
      if (t.size() == 2 && t[1] == '.') t.pop_back();
      if (t.size() != 1) return std::nullopt;
      const char c = static_cast<char>(std::toupper(static_cast<unsigned char>(t[0])));
      if (c < 'A' || c > 'D') return std::nullopt;
      return std::string(1, c);
    }
    case QuestionKind::Numerical: {
      static const std::regex number(R"(([+-]?)0*([0-9]+)(\.0*)?)");
      std::smatch m;
      if (!std::regex_match(t, m, number)) return std::nullopt;
      const std::string digits = m[2];
      if (digits == "0") return "0";
      return (m[1] == "-" ? "-" : "") + digits;
    }
  }
  return std::nullopt;
}

InstanceScore score_instance(const Prediction& pred, const Truth& truth, Round round) {
  InstanceScore r;
  const auto answer = normalize_answer(pred.answer, truth.kind);
  r.p1 = answer && *answer == truth.answer ? 1 : 0;
  const std::set<int> a(pred.idx.begin(), pred.idx.end()), b(truth.idx.begin(), truth.idx.end());
  r.p2 = a == b ? 1 : 0;
  if (round == Round::Final) r.p3 = std::clamp(pred.p3, 0.0, 1.0);
  if (r.p1 * r.p2 == 0) return r;
  r.s = round == Round::Selection ? 0.5 * r.p1 + 0.5 * r.p2 : 0.5 * r.p1 + 0.3 * r.p2 + 0.2 * r.p3;
  return r;
}

double phase_score(std::span<const InstanceScore> instances) {
  double sum = 0;
  for (const auto& i : instances) sum += i.s;
  return sum;
}

double selection_score(double phase1, double phase2, double b1, double b2) {
  if (b1 < 0 || b2 < 0) throw NegativeBonus("bonus scores must be non-negative");
  return 0.6 * (0.7 * phase1 + 0.3 * b1) + 0.4 * (0.9 * phase2 + 0.1 * b2);
}

double selection_score(std::span<const InstanceScore> phase1, std::span<const InstanceScore> phase2, double b1,
                       double b2) {
  return selection_score(phase_score(phase1), phase_score(phase2), b1, b2);
}

double presentation_score(double r_pres, double r_qa) {
  for (double r : {r_pres, r_qa}) {
    if (!(r >= 1.0 && r <= 5.0)) throw RubricOutOfRange("rubric means must lie in [1, 5]");
  }
  return (r_pres + r_qa) / 10.0;
}

FinalScore final_score(std::span<const InstanceScore> instances, double r_pres, double r_qa, std::size_t n) {
  if (instances.size() != n) {
    throw InvalidParams("expected " + std::to_string(n) + " final-round instances, got " +
                        std::to_string(instances.size()));
  }
  FinalScore f;
  f.s2 = phase_score(instances);
  f.s3 = presentation_score(r_pres, r_qa);
  f.s = 0.5 * f.s2 + 0.5 * f.s3;
  return f;
}

std::vector<CampaignScore> leaderboard(std::vector<CampaignScore> teams, Round round) {
  auto key = [round](const CampaignScore& c) {
    return round == Round::Final ? std::make_tuple(c.s, c.s2) : std::make_tuple(c.s1, c.phase2);
  };
  std::stable_sort(teams.begin(), teams.end(), [&](const CampaignScore& a, const CampaignScore& b) {
    if (a.disqualified != b.disqualified) return !a.disqualified;
    if (key(a) != key(b)) return key(a) > key(b);
    return a.team < b.team;
  });
  return teams;
}

std::string question_id(std::size_t record, std::size_t question) {
  return std::to_string(record + 1) + "." + std::to_string(question + 1);
}

std::map<std::string, Truth> truth_table(const std::vector<Record>& dataset) {
  std::map<std::string, Truth> out;
  for (std::size_t r = 0; r < dataset.size(); ++r) {
    const auto& rec = dataset[r];
    for (std::size_t q = 0; q < rec.questions.size() && q < rec.answers.size(); ++q) {
      Truth t;
      if (const auto parsed = parse_question(rec.questions[q])) {
        t.kind = parsed->kind;
      } else if (normalize_answer(rec.answers[q], QuestionKind::Numerical)) {
        t.kind = QuestionKind::Numerical;
      } else if (normalize_answer(rec.answers[q], QuestionKind::MultipleChoice)) {
        t.kind = QuestionKind::MultipleChoice;
      }
      t.answer = normalize_answer(rec.answers[q], t.kind).value_or(rec.answers[q]);
      if (q < rec.idx.size()) t.idx = rec.idx[q];
      out[question_id(r, q)] = t;
    }
  }
  return out;
}

namespace {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

int phase_of(const json& j) {
  if (j.is_number_integer()) return j.get<int>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "final") return 0;
    if (s == "1" || s == "2") return s[0] - '0';
  }
  throw ConfigError("phase must be 1, 2 or \"final\"");
}

}  // namespace

std::vector<SubmissionResult> read_results(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid results JSON: ") + e.what());
  }
  if (!j.is_array()) throw ConfigError("results must be a JSON array");
  std::vector<SubmissionResult> out;
  for (const auto& row : j) {
    try {
      SubmissionResult r;
      r.team = row.at("team").get<std::string>();
      r.phase = row.contains("phase") ? phase_of(row.at("phase")) : 1;
      r.question_id = row.at("question_id").get<std::string>();
      r.prediction.answer = row.at("answer").get<std::string>();
      r.prediction.idx = row.at("idx").get<std::vector<int>>();
      if (row.contains("explanation")) r.explanation = row.at("explanation").get<std::string>();
      if (row.contains("p3")) r.prediction.p3 = row.at("p3").get<double>();
      out.push_back(std::move(r));
    } catch (const json::exception& e) {
      throw ConfigError(std::string("malformed result row: ") + e.what());
    }
  }
  return out;
}

std::string write_results(const std::vector<SubmissionResult>& results) {
  ordered_json j = ordered_json::array();
  for (const auto& r : results) {
    ordered_json row;
    row["team"] = r.team;
    if (r.phase == 0) row["phase"] = "final";
    else row["phase"] = r.phase;
    row["question_id"] = r.question_id;
    row["answer"] = r.prediction.answer;
    row["idx"] = r.prediction.idx;
    row["explanation"] = r.explanation;
    if (r.prediction.p3 != 0) row["p3"] = r.prediction.p3;
    j.push_back(row);
  }
  return j.dump(2) + "\n";
}

std::map<std::string, TeamInputs> read_team_inputs(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid team inputs JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("team inputs must be a JSON object");
  std::map<std::string, TeamInputs> out;
  try {
    if (j.contains("bonuses")) {
      for (const auto& [team, v] : j.at("bonuses").items()) {
        out[team].b1 = v.value("b1", 0.0);
        out[team].b2 = v.value("b2", 0.0);
      }
    }
    if (j.contains("rubric")) {
      for (const auto& [team, v] : j.at("rubric").items()) {
        out[team].r_pres = v.at("r_pres").get<double>();
        out[team].r_qa = v.at("r_qa").get<double>();
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed team inputs: ") + e.what());
  }
  return out;
}

ScoreReport score_results(const std::vector<SubmissionResult>& results, const std::map<std::string, Truth>& truth,
                          Round round, const std::map<std::string, TeamInputs>& inputs, std::size_t final_n) {
  ScoreReport report;
  report.round = round;
  std::set<std::tuple<std::string, int, std::string>> seen;
  std::map<std::string, std::map<int, std::vector<InstanceScore>>> by_team;
  for (const auto& r : results) {
    const auto it = truth.find(r.question_id);
    if (it == truth.end()) throw ConfigError("unknown question id '" + r.question_id + "'");
    if (round == Round::Selection && r.phase != 1 && r.phase != 2) {
      throw ConfigError("selection-round rows need phase 1 or 2 (" + r.team + ", " + r.question_id + ")");
    }
    if (!seen.insert({r.team, r.phase, r.question_id}).second) {
      throw ConfigError("duplicate result for " + r.team + ", question " + r.question_id);
    }
    const auto score = score_instance(r.prediction, it->second, round);
    report.instances.push_back({r, score});
    by_team[r.team][round == Round::Final ? 0 : r.phase].push_back(score);
  }
  for (const auto& [team, in] : inputs) by_team[team];

  std::vector<CampaignScore> teams;
  for (auto& [team, phases] : by_team) {
    CampaignScore c;
    c.team = team;
    const auto in = inputs.count(team) ? inputs.at(team) : TeamInputs{};
    c.disqualified = in.disqualified;
    if (round == Round::Selection) {
      c.phase1 = phase_score(phases[1]);
      c.phase2 = phase_score(phases[2]);
      c.b1 = in.b1;
      c.b2 = in.b2;
      c.s1 = selection_score(c.phase1, c.phase2, c.b1, c.b2);
    } else {
      auto& inst = phases[0];
      if (inst.size() > final_n) {
        throw ConfigError(team + " has " + std::to_string(inst.size()) + " final-round results, expected " +
                          std::to_string(final_n));
      }
      inst.resize(final_n);  // unanswered cases score zero
      const auto f = final_score(inst, in.r_pres, in.r_qa, final_n);
      c.s2 = f.s2;
      c.s3 = f.s3;
      c.s = f.s;
    }
    teams.push_back(c);
  }
  report.standings = leaderboard(std::move(teams), round);
  return report;
}

std::string report_json(const ScoreReport& report) {
  ordered_json j;
  j["round"] = std::string(to_string(report.round));
  ordered_json standings = ordered_json::array();
  int rank = 0;
  for (const auto& c : report.standings) {
    ordered_json t;
    t["rank"] = ++rank;
    t["team"] = c.team;
    if (report.round == Round::Selection) {
      t["phase1"] = c.phase1;
      t["phase2"] = c.phase2;
      t["b1"] = c.b1;
      t["b2"] = c.b2;
      t["selection_score"] = c.s1;
    } else {
      t["s2"] = c.s2;
      t["s3"] = c.s3;
      t["s"] = c.s;
    }
    t["disqualified"] = c.disqualified;
    standings.push_back(t);
  }
  j["standings"] = standings;
  ordered_json inst = ordered_json::array();
  for (const auto& i : report.instances) {
    ordered_json row;
    row["team"] = i.result.team;
    if (report.round == Round::Final) row["phase"] = "final";
    else row["phase"] = i.result.phase;
    row["question_id"] = i.result.question_id;
    row["p1"] = i.score.p1;
    row["p2"] = i.score.p2;
    row["p3"] = i.score.p3;
    row["s"] = i.score.s;
    inst.push_back(row);
  }
  j["instances"] = inst;
  return j.dump(2) + "\n";
}

std::string report_table(const ScoreReport& report) {
  std::string out;
  char line[256];
  if (report.round == Round::Selection) {
    std::snprintf(line, sizeof line, "%-20s %14s %14s %22s %6s\n", "Team", "Phase 1 Score", "Phase 2 Score",
                  "Final Selection Score", "Rank");
    out += line;
    int rank = 0;
    for (const auto& c : report.standings) {
      std::snprintf(line, sizeof line, "%-20s %14.2f %14.2f %22.2f %6d%s\n", c.team.c_str(), c.phase1, c.phase2,
                    c.s1, ++rank, c.disqualified ? "  disqualified" : "");
      out += line;
    }
  } else {
    std::snprintf(line, sizeof line, "%-20s %10s %10s %10s %6s\n", "Team", "S2", "S3", "S", "Rank");
    out += line;
    int rank = 0;
    for (const auto& c : report.standings) {
      std::snprintf(line, sizeof line, "%-20s %10.2f %10.2f %10.2f %6d%s\n", c.team.c_str(), c.s2, c.s3, c.s,
                    ++rank, c.disqualified ? "  disqualified" : "");
      out += line;
    }
  }
  return out;
}

}  // namespace pqa
