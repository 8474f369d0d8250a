#pragma once

// HTTP evaluation of contestant endpoints: rate-limited querying, the
// availability ledger, and the built-in reference contestant.

#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>
#include <string>
#include <vector>

#include "pqa/engine.hpp"
#include "pqa/lexicon.hpp"
#include "pqa/record.hpp"
#include "pqa/scoring.hpp"

namespace pqa {

struct EndpointConfig {
  std::string base_url;  // http://host:port
  std::string path = "/query";
  int rate = 10;         // request starts per second, also the in-flight cap
  double timeout_s = 60;
  std::string auth_header;  // "Name: value"
  double offline_limit_s = 30 * 60;
  double failure_limit = 0.10;

  void validate() const;  // ConfigError
};

enum class Outcome { Ok, Timeout, HttpError, Malformed };
std::string_view to_string(Outcome o);
Outcome parse_outcome(std::string_view text);

using Clock = std::chrono::system_clock;

struct LedgerEntry {
  std::string question_id;
  Outcome outcome = Outcome::Ok;
  Clock::time_point start;
  Clock::time_point end;
  int http_status = 0;
  std::string detail;
};

std::string format_rfc3339(Clock::time_point t);
Clock::time_point parse_rfc3339(std::string_view text);  // ConfigError

struct AvailabilityLedger {
  std::vector<LedgerEntry> entries;

  // Longest stretch of the campaign, from the first start to the last end,
  // without a successful response.
  double offline_span_s() const;
  double failure_fraction() const;
  bool unreachable() const;  // nothing succeeded
  bool disqualified(double offline_limit_s = 30 * 60, double failure_limit = 0.10) const;
};

std::string ledger_line(const LedgerEntry& e);
// JSON lines, one entry per line. Throws ConfigError.
AvailabilityLedger read_ledger(std::string_view jsonl);
std::string write_ledger(const AvailabilityLedger& ledger);

struct TestItem {
  std::string question_id;
  std::string question;
  std::vector<std::string> premises;
  Truth truth;
};

std::vector<TestItem> test_items(const std::vector<Record>& dataset);

// Hands out request start times so that no 1000 ms window holds more than
// `rate` starts.
class RateGate {
 public:
  explicit RateGate(int rate);
  // Blocks until the caller may start; returns the wall-clock start, taken
  // under the same lock that admitted it.
  Clock::time_point acquire();
  std::chrono::steady_clock::time_point last_start() const;

 private:
  int rate_;
  mutable std::mutex mu_;
  std::vector<std::chrono::steady_clock::time_point> recent_;  // ring of the last `rate` starts
  std::size_t head_ = 0;
  std::chrono::steady_clock::time_point last_{};
};

struct Evaluation {
  std::vector<SubmissionResult> results;
  std::vector<InstanceScore> scores;
  AvailabilityLedger ledger;
  double phase_score = 0;
  bool disqualified = false;
};

// One POST per item on up to `rate` workers, no retries. Each completed
// request is appended to `ledger_out` as it happens when given.
Evaluation evaluate_endpoint(const EndpointConfig& cfg, const std::vector<TestItem>& items, Round round,
                             const std::string& team = "team", int phase = 1, std::ostream* ledger_out = nullptr);

// Answers {question, premises} from the premises alone. Premise sentences
// are mapped back to formulas through the dataset's NL/FOL pairs, then the
// lexicon templates, then the quantity sentence forms.
class ReferenceSolver {
 public:
  ReferenceSolver(const std::vector<Record>& dataset, Lexicon lexicon, BackendSpec backend);

  struct Reply {
    int status = 200;
    std::string body;  // JSON
  };
  Reply handle(std::string_view request_body) const;

 private:
  std::map<std::string, std::string> fol_by_nl_;
  Lexicon lexicon_;
  BackendSpec backend_;
};

class ReferenceServer {
 public:
  ReferenceServer(std::shared_ptr<const ReferenceSolver> solver, std::string path = "/query");
  ~ReferenceServer();
  ReferenceServer(const ReferenceServer&) = delete;
  ReferenceServer& operator=(const ReferenceServer&) = delete;

  // Binds and serves on a background thread; port 0 picks a free port.
  // Returns the bound port or throws ConfigError.
  int start(const std::string& host, int port);
  // Blocks serving on the calling thread.
  void run(const std::string& host, int port);
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace pqa
