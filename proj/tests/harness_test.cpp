#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "pqa/dataset.hpp"
#include "pqa/errors.hpp"
#include "pqa/harness.hpp"
#include "support/stub_server.hpp"

namespace pqa {
namespace {

using namespace std::chrono_literals;
using testing::StubServer;

Record fixture() { return read_record(read_file(std::string(PQA_FIXTURES) + "/course_policy_record.json")); }

std::vector<TestItem> yes_items(int n) {
  std::vector<TestItem> items;
  for (int i = 0; i < n; ++i) {
    TestItem t;
    t.question_id = "1." + std::to_string(i + 1);
    t.question = yesno_question("Every student passes the course.");
    t.premises = {"Every student passes the course."};
    t.truth = {QuestionKind::YesNoUncertain, "Yes", {1}};
    items.push_back(t);
  }
  return items;
}

// Largest number of starts in any window [t, t + 1 s].
int max_starts_per_second(const AvailabilityLedger& ledger) {
  std::vector<Clock::time_point> starts;
  for (const auto& e : ledger.entries) starts.push_back(e.start);
  std::sort(starts.begin(), starts.end());
  int best = 0;
  for (std::size_t i = 0; i < starts.size(); ++i) {
    std::size_t j = i;
    while (j < starts.size() && starts[j] - starts[i] <= 1s) ++j;
    best = std::max(best, static_cast<int>(j - i));
  }
  return best;
}

TEST(Rfc3339, RoundTrip) {
  const auto t = Clock::time_point(std::chrono::microseconds(1760616000123456LL));
  const auto text = format_rfc3339(t);
  EXPECT_EQ(text, "2025-10-16T12:00:00.123456Z");
  EXPECT_EQ(parse_rfc3339(text), t);
  EXPECT_EQ(parse_rfc3339("2025-10-16T14:00:00.123456+02:00"), t);
  EXPECT_THROW(parse_rfc3339("yesterday"), ConfigError);
}

LedgerEntry entry(Outcome o, double start_s, double end_s) {
  const auto base = Clock::time_point(std::chrono::seconds(1700000000));
  LedgerEntry e;
  e.question_id = "1.1";
  e.outcome = o;
  e.start = base + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(start_s));
  e.end = base + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(end_s));
  return e;
}

TEST(Ledger, FailureFraction) {
  AvailabilityLedger ledger;
  for (int i = 0; i < 50; ++i) ledger.entries.push_back(entry(i < 6 ? Outcome::HttpError : Outcome::Ok, i, i + 0.5));
  EXPECT_NEAR(ledger.failure_fraction(), 0.12, 1e-12);
  EXPECT_TRUE(ledger.disqualified());
  ledger.entries.resize(45);  // 6 of 45 is still above 10%
  EXPECT_TRUE(ledger.disqualified());
  for (int i = 0; i < 6; ++i) ledger.entries[i].outcome = i < 5 ? Outcome::Ok : Outcome::Timeout;
  EXPECT_FALSE(ledger.disqualified());
}

TEST(Ledger, OfflineSpan) {
  AvailabilityLedger ledger;
  ledger.entries.push_back(entry(Outcome::Ok, 0, 1));
  for (int i = 0; i < 3; ++i) ledger.entries.push_back(entry(Outcome::Timeout, 10 + i * 600.0, 70 + i * 600.0));
  ledger.entries.push_back(entry(Outcome::Ok, 1900, 1902));
  for (int i = 0; i < 40; ++i) ledger.entries.push_back(entry(Outcome::Ok, 1903 + i, 1904 + i));
  EXPECT_NEAR(ledger.offline_span_s(), 1901, 1e-6);
  EXPECT_LT(ledger.failure_fraction(), 0.10);
  EXPECT_TRUE(ledger.disqualified());
  EXPECT_FALSE(ledger.disqualified(2000, 0.10));
}

TEST(Ledger, JsonLinesRoundTrip) {
  AvailabilityLedger ledger;
  ledger.entries.push_back(entry(Outcome::Ok, 0, 0.25));
  ledger.entries.push_back(entry(Outcome::Malformed, 1, 1.5));
  ledger.entries.back().detail = "response lacks answer";
  const auto back = read_ledger(write_ledger(ledger));
  ASSERT_EQ(back.entries.size(), 2u);
  EXPECT_EQ(write_ledger(back), write_ledger(ledger));
  EXPECT_EQ(back.disqualified(), ledger.disqualified());
  EXPECT_THROW(read_ledger("{\"outcome\": \"ok\"}\n"), ConfigError);
}

TEST(RateGate, NoWindowExceedsRate) {
  RateGate gate(5);
  AvailabilityLedger ledger;
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<std::thread> threads;
  std::mutex mu;
  for (int t = 0; t < 4; ++t) {
    threads.emplace_back([&] {
      for (int i = 0; i < 4; ++i) {
        const auto s = gate.acquire();
        std::lock_guard lock(mu);
        ledger.entries.push_back({"x", Outcome::Ok, s, s, 200, ""});
      }
    });
  }
  for (auto& t : threads) t.join();
  EXPECT_LE(max_starts_per_second(ledger), 5);
  // 16 starts at 5 per second need at least three full windows.
  EXPECT_GE(std::chrono::steady_clock::now() - t0, 3s);
}

TEST(Evaluate, CompliantStub) {
  StubServer stub([](int, const httplib::Request&, httplib::Response& res, StubServer&) { StubServer::ok(res); });
  EndpointConfig cfg;
  cfg.base_url = stub.url();
  const auto items = yes_items(25);
  std::ostringstream ledger_text;
  const auto t0 = std::chrono::steady_clock::now();
  const auto ev = evaluate_endpoint(cfg, items, Round::Selection, "A", 1, &ledger_text);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  EXPECT_GE(wall, 3.0);
  EXPECT_EQ(stub.requests(), 25);
  EXPECT_NEAR(ev.phase_score, 25.0, 1e-9);
  EXPECT_FALSE(ev.disqualified);
  EXPECT_LE(max_starts_per_second(ev.ledger), 10);
  // The streamed ledger recomputes the same verdict.
  const auto streamed = read_ledger(ledger_text.str());
  EXPECT_EQ(streamed.entries.size(), 25u);
  EXPECT_EQ(streamed.disqualified(), ev.disqualified);
  EXPECT_LE(max_starts_per_second(streamed), 10);
}

TEST(Evaluate, FailuresTimeoutsAndMalformed) {
  StubServer stub([](int n, const httplib::Request&, httplib::Response& res, StubServer& self) {
    if (n % 10 == 3) {
      res.status = 500;
    } else if (n % 10 == 5) {
      res.set_content(R"({"answer": "Yes"})", "application/json");
    } else if (n == 7) {
      self.sleep(3000ms);
      StubServer::ok(res);
    } else {
      StubServer::ok(res);
    }
  });
  EndpointConfig cfg;
  cfg.base_url = stub.url();
  cfg.timeout_s = 1;
  const auto t0 = std::chrono::steady_clock::now();
  const auto ev = evaluate_endpoint(cfg, yes_items(20), Round::Selection);
  // No request is awaited much beyond the timeout.
  EXPECT_LT(std::chrono::steady_clock::now() - t0, 6s);
  std::map<Outcome, int> counts;
  for (const auto& e : ev.ledger.entries) ++counts[e.outcome];
  EXPECT_EQ(counts[Outcome::HttpError], 2);
  EXPECT_EQ(counts[Outcome::Malformed], 2);
  EXPECT_EQ(counts[Outcome::Timeout], 1);
  EXPECT_NEAR(ev.ledger.failure_fraction(), 0.25, 1e-12);
  EXPECT_TRUE(ev.disqualified);
  EXPECT_NEAR(ev.phase_score, 15.0, 1e-9);
}

TEST(Evaluate, UnreachableEndpoint) {
  EndpointConfig cfg;
  cfg.base_url = "http://127.0.0.1:1";
  cfg.timeout_s = 1;
  const auto ev = evaluate_endpoint(cfg, yes_items(3), Round::Selection);
  EXPECT_TRUE(ev.ledger.unreachable());
  EXPECT_TRUE(ev.disqualified);
  EXPECT_EQ(ev.phase_score, 0.0);
}

TEST(Evaluate, ConfigChecks) {
  EndpointConfig cfg;
  EXPECT_THROW(evaluate_endpoint(cfg, yes_items(1), Round::Selection), ConfigError);
  cfg.base_url = "http://127.0.0.1:1";
  cfg.rate = 0;
  EXPECT_THROW(evaluate_endpoint(cfg, yes_items(1), Round::Selection), ConfigError);
  cfg.rate = 10;
  EXPECT_THROW(evaluate_endpoint(cfg, {}, Round::Selection), ConfigError);
}

nlohmann::json ask(const ReferenceSolver& solver, const std::string& question, const std::vector<std::string>& premises,
                   int expected_status = 200) {
  nlohmann::json req;
  req["question"] = question;
  req["premises"] = premises;
  const auto reply = solver.handle(req.dump());
  EXPECT_EQ(reply.status, expected_status) << reply.body;
  return nlohmann::json::parse(reply.body);
}

TEST(ReferenceSolver, AnswersFixtureQuestions) {
  const Record r = fixture();
  const ReferenceSolver solver({r}, Lexicon::academic_policy(), BackendSpec{});
  auto out = ask(solver, r.questions[1], r.premises_nl);
  EXPECT_EQ(out["answer"], "Yes");
  EXPECT_EQ(out["idx"], nlohmann::json::array({2, 4}));
  out = ask(solver, r.questions[0], r.premises_nl);
  EXPECT_EQ(out["answer"], "B");
  EXPECT_EQ(out["idx"], nlohmann::json::array({1, 3}));
}

TEST(ReferenceSolver, WorksWithoutDatasetPairs) {
  const ReferenceSolver solver({}, Lexicon::academic_policy(), BackendSpec{});
  auto out = ask(solver, yesno_question("Every student who attends all lectures also passes the course."), {});
  EXPECT_EQ(out["answer"], "Uncertain");
  EXPECT_EQ(out["idx"], nlohmann::json::array());
  out = ask(solver, yesno_question("Every student who attends all lectures also passes the course."),
            {"Every student who attends all lectures also submits their research paper.",
             "Every student who submits their research paper also passes the course."});
  EXPECT_EQ(out["answer"], "Yes");
  out = ask(solver, numeric_question(NumericKind::RemainingCredits),
            {"The student earned 24 credits in term 1.", "The student earned 30 credits in term 2.",
             "The program requires 120 credits to graduate."});
  EXPECT_EQ(out["answer"], "66");
  EXPECT_EQ(out["idx"], nlohmann::json::array({1, 2, 3}));
}

TEST(ReferenceSolver, RejectsBadRequests) {
  const ReferenceSolver solver({}, Lexicon::academic_policy(), BackendSpec{});
  EXPECT_EQ(solver.handle("not json").status, 400);
  EXPECT_EQ(solver.handle(R"({"question": 3, "premises": []})").status, 400);
  EXPECT_EQ(solver.handle(R"({"question": "x"})").status, 400);
  ask(solver, yesno_question("Every student passes the course."), {"Students like pizza."}, 422);
  ask(solver, "What is the meaning of this?", {}, 422);
}

TEST(ClosedLoop, ReferenceServerScoresPerfectly) {
  GenerationConfig config;
  config.seed = 17;
  config.records = 6;
  const auto dataset = generate_dataset(config).records;
  auto solver = std::make_shared<ReferenceSolver>(dataset, config.lexicon, BackendSpec{});
  ReferenceServer server(solver);
  const int port = server.start("127.0.0.1", 0);
  EndpointConfig cfg;
  cfg.base_url = "http://127.0.0.1:" + std::to_string(port);
  const auto items = test_items(dataset);
  const auto t0 = std::chrono::steady_clock::now();
  const auto ev = evaluate_endpoint(cfg, items, Round::Selection);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  EXPECT_GE(wall, std::ceil(items.size() / 10.0));
  for (std::size_t i = 0; i < items.size(); ++i) {
    EXPECT_EQ(ev.scores[i].p1, 1) << items[i].question_id << " " << ev.ledger.entries[i].detail;
    EXPECT_EQ(ev.scores[i].p2, 1) << items[i].question_id;
  }
  EXPECT_NEAR(ev.phase_score, static_cast<double>(items.size()), 1e-9);
  EXPECT_FALSE(ev.disqualified);
  server.stop();
}

}  // namespace
}  // namespace pqa
