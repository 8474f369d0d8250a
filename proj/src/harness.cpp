#include "pqa/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <ctime>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "pqa/errors.hpp"
#include "pqa/fol.hpp"
#include "pqa/qa_gen.hpp"

namespace pqa {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

void EndpointConfig::validate() const {
  if (base_url.empty()) throw ConfigError("endpoint URL is empty");
  if (rate < 1) throw ConfigError("rate must be at least 1 request per second");
  if (timeout_s < 1) throw ConfigError("timeout must be at least 1 s");
  if (path.empty() || path[0] != '/') throw ConfigError("endpoint path must start with '/'");
  if (!auth_header.empty() && auth_header.find(':') == std::string::npos) {
    throw ConfigError("auth header must look like 'Name: value'");
  }
}

std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::Ok: return "ok";
    case Outcome::Timeout: return "timeout";
    case Outcome::HttpError: return "http-error";
    case Outcome::Malformed: return "malformed";
  }
  return "?";
}

Outcome parse_outcome(std::string_view text) {
  for (Outcome o : {Outcome::Ok, Outcome::Timeout, Outcome::HttpError, Outcome::Malformed})
    if (to_string(o) == text) return o;
  throw ConfigError("unknown outcome '" + std::string(text) + "'");
}

std::string format_rfc3339(Clock::time_point t) {
  const auto us = std::chrono::duration_cast<std::chrono::microseconds>(t.time_since_epoch()).count();
  std::time_t secs = static_cast<std::time_t>(us / 1000000);
  long frac = static_cast<long>(us % 1000000);
  if (frac < 0) {
    frac += 1000000;
    --secs;
  }
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%06ldZ", tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday,
                tm.tm_hour, tm.tm_min, tm.tm_sec, frac);
  return buf;
}

Clock::time_point parse_rfc3339(std::string_view text) {
  const std::string s(text);
  std::tm tm{};
  int consumed = 0;
  if (std::sscanf(s.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d%n", &tm.tm_year, &tm.tm_mon, &tm.tm_mday, &tm.tm_hour,
                  &tm.tm_min, &tm.tm_sec, &consumed) != 6) {
    throw ConfigError("bad timestamp '" + s + "'");
  }
  tm.tm_year -= 1900;
  tm.tm_mon -= 1;
  std::size_t pos = static_cast<std::size_t>(consumed);
  long long micros = 0;
  if (pos < s.size() && s[pos] == '.') {
    int digits = 0;
    ++pos;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
      if (digits < 6) {
        micros = micros * 10 + (s[pos] - '0');
        ++digits;
      }
      ++pos;
    }
    while (digits++ < 6) micros *= 10;
  }
  long offset = 0;
  if (pos < s.size() && (s[pos] == 'Z' || s[pos] == 'z')) {
    ++pos;
  } else if (pos + 6 == s.size() && (s[pos] == '+' || s[pos] == '-') && s[pos + 3] == ':') {
    const int h = std::stoi(s.substr(pos + 1, 2)), m = std::stoi(s.substr(pos + 4, 2));
    offset = (s[pos] == '+' ? 1 : -1) * (h * 3600L + m * 60L);
    pos = s.size();
  }
  if (pos != s.size()) throw ConfigError("bad timestamp '" + s + "'");
  const std::time_t secs = timegm(&tm) - offset;
  return Clock::time_point(std::chrono::duration_cast<Clock::duration>(std::chrono::seconds(secs) +
                                                                       std::chrono::microseconds(micros)));
}

namespace {

double seconds_between(Clock::time_point a, Clock::time_point b) {
  return std::chrono::duration<double>(b - a).count();
}

}  // namespace

double AvailabilityLedger::offline_span_s() const {
  if (entries.empty()) return 0;
  Clock::time_point first = entries.front().start, last = entries.front().end;
  std::vector<Clock::time_point> ok;
  for (const auto& e : entries) {
    first = std::min(first, e.start);
    last = std::max(last, e.end);
    if (e.outcome == Outcome::Ok) ok.push_back(e.end);
  }
  std::sort(ok.begin(), ok.end());
  double worst = 0;
  Clock::time_point prev = first;
  for (const auto& t : ok) {
    worst = std::max(worst, seconds_between(prev, t));
    prev = t;
  }
  return std::max(worst, seconds_between(prev, last));
}

double AvailabilityLedger::failure_fraction() const {
  if (entries.empty()) return 0;
  const auto failed = std::count_if(entries.begin(), entries.end(), [](const auto& e) { return e.outcome != Outcome::Ok; });
  return static_cast<double>(failed) / static_cast<double>(entries.size());
}

bool AvailabilityLedger::unreachable() const {
  return !entries.empty() &&
         std::none_of(entries.begin(), entries.end(), [](const auto& e) { return e.outcome == Outcome::Ok; });
}

bool AvailabilityLedger::disqualified(double offline_limit_s, double failure_limit) const {
  return offline_span_s() > offline_limit_s || failure_fraction() > failure_limit;
}

std::string ledger_line(const LedgerEntry& e) {
  ordered_json j;
  j["question_id"] = e.question_id;
  j["outcome"] = std::string(to_string(e.outcome));
  j["start"] = format_rfc3339(e.start);
  j["end"] = format_rfc3339(e.end);
  j["status"] = e.http_status;
  if (!e.detail.empty()) j["detail"] = e.detail;
  return j.dump();
}

std::string write_ledger(const AvailabilityLedger& ledger) {
  std::string out;
  for (const auto& e : ledger.entries) out += ledger_line(e) + "\n";
  return out;
}

AvailabilityLedger read_ledger(std::string_view jsonl) {
  AvailabilityLedger ledger;
  std::istringstream in{std::string(jsonl)};
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = json::parse(line);
      LedgerEntry e;
      e.question_id = j.at("question_id").get<std::string>();
      e.outcome = parse_outcome(j.at("outcome").get<std::string>());
      e.start = parse_rfc3339(j.at("start").get<std::string>());
      e.end = parse_rfc3339(j.at("end").get<std::string>());
      e.http_status = j.value("status", 0);
      e.detail = j.value("detail", "");
      ledger.entries.push_back(std::move(e));
    } catch (const json::exception& ex) {
      throw ConfigError("ledger line " + std::to_string(n) + ": " + ex.what());
    }
  }
  return ledger;
}

std::vector<TestItem> test_items(const std::vector<Record>& dataset) {
  const auto truth = truth_table(dataset);
  std::vector<TestItem> out;
  for (std::size_t r = 0; r < dataset.size(); ++r) {
    for (std::size_t q = 0; q < dataset[r].questions.size(); ++q) {
      TestItem t;
      t.question_id = question_id(r, q);
      t.question = dataset[r].questions[q];
      t.premises = dataset[r].premises_nl;
      t.truth = truth.at(t.question_id);
      out.push_back(std::move(t));
    }
  }
  return out;
}

RateGate::RateGate(int rate) : rate_(std::max(1, rate)) {}

Clock::time_point RateGate::acquire() {
  using namespace std::chrono;
  // A small margin keeps starts that land exactly one second apart out of
  // the same window.
  constexpr auto kWindow = milliseconds(1000) + microseconds(500);
  std::unique_lock lock(mu_);
  for (;;) {
    const auto now = steady_clock::now();
    if (recent_.size() < static_cast<std::size_t>(rate_) || recent_[head_] + kWindow <= now) {
      const auto wall = Clock::now();
      if (recent_.size() < static_cast<std::size_t>(rate_)) {
        recent_.push_back(now);
      } else {
        recent_[head_] = now;
        head_ = (head_ + 1) % recent_.size();
      }
      last_ = now;
      return wall;
    }
    const auto wake = recent_[head_] + kWindow;
    lock.unlock();
    std::this_thread::sleep_until(wake);
    lock.lock();
  }
}

std::chrono::steady_clock::time_point RateGate::last_start() const {
  std::lock_guard lock(mu_);
  return last_;
}

namespace {

struct Attempt {
  LedgerEntry entry;
  Prediction prediction;
  std::string explanation;
};

// Fills prediction fields from a 200 response; false when malformed.
bool parse_response(const std::string& body, Attempt& a) {
  json j;
  try {
    j = json::parse(body);
  } catch (const json::exception&) {
    a.entry.detail = "response is not JSON";
    return false;
  }
  if (!j.is_object() || !j.contains("answer") || !j.contains("idx") || !j.contains("explanation")) {
    a.entry.detail = "response lacks answer, idx or explanation";
    return false;
  }
  const auto& ans = j.at("answer");
  if (ans.is_string()) a.prediction.answer = ans.get<std::string>();
  else if (ans.is_number_integer()) a.prediction.answer = std::to_string(ans.get<long long>());
  else {
    a.entry.detail = "answer must be a string";
    return false;
  }
  if (!j.at("idx").is_array()) {
    a.entry.detail = "idx must be an array";
    return false;
  }
  for (const auto& k : j.at("idx")) {
    if (!k.is_number_integer()) {
      a.entry.detail = "idx must hold integers";
      return false;
    }
    a.prediction.idx.push_back(k.get<int>());
  }
  if (!j.at("explanation").is_string()) {
    a.entry.detail = "explanation must be a string";
    return false;
  }
  a.explanation = j.at("explanation").get<std::string>();
  return true;
}

Attempt query(const EndpointConfig& cfg, const TestItem& item, RateGate& gate) {
  Attempt a;
  a.entry.question_id = item.question_id;
  httplib::Client client(cfg.base_url);
  const auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(std::chrono::duration<double>(cfg.timeout_s));
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);
  httplib::Headers headers;
  if (!cfg.auth_header.empty()) {
    const auto colon = cfg.auth_header.find(':');
    std::string value = cfg.auth_header.substr(colon + 1);
    value.erase(0, value.find_first_not_of(' '));
    headers.emplace(cfg.auth_header.substr(0, colon), value);
  }
  json payload;
  payload["question"] = item.question;
  payload["premises"] = item.premises;
  const std::string body = payload.dump();

  a.entry.start = gate.acquire();
  const auto t0 = std::chrono::steady_clock::now();
  const auto res = client.Post(cfg.path, headers, body, "application/json");
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  a.entry.end = Clock::now();
  if (!res) {
    const auto err = res.error();
    const bool timed_out = err == httplib::Error::ConnectionTimeout ||
                           ((err == httplib::Error::Read || err == httplib::Error::Write) && elapsed >= cfg.timeout_s - 0.5);
    a.entry.outcome = timed_out ? Outcome::Timeout : Outcome::HttpError;
    a.entry.detail = httplib::to_string(err);
    return a;
  }
  a.entry.http_status = res->status;
  if (res->status != 200) {
    a.entry.outcome = Outcome::HttpError;
    a.entry.detail = "HTTP " + std::to_string(res->status);
    return a;
  }
  if (!parse_response(res->body, a)) {
    a.entry.outcome = Outcome::Malformed;
    a.prediction = {};
    a.explanation.clear();
    return a;
  }
  a.entry.outcome = Outcome::Ok;
  return a;
}

}  // namespace

Evaluation evaluate_endpoint(const EndpointConfig& cfg, const std::vector<TestItem>& items, Round round,
                             const std::string& team, int phase, std::ostream* ledger_out) {
  cfg.validate();
  if (items.empty()) throw ConfigError("test set is empty");
  RateGate gate(cfg.rate);
  std::vector<Attempt> attempts(items.size());
  std::atomic<std::size_t> next{0};
  std::mutex ledger_mu;

  auto worker = [&] {
    for (std::size_t i = next++; i < items.size(); i = next++) {
      attempts[i] = query(cfg, items[i], gate);
      if (ledger_out) {
        std::lock_guard lock(ledger_mu);
        *ledger_out << ledger_line(attempts[i].entry) << '\n' << std::flush;
      }
    }
  };
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(cfg.rate), items.size());
  std::vector<std::thread> threads;
  for (std::size_t t = 0; t < workers; ++t) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
  // The last admitted start still owns its one-second window.
  std::this_thread::sleep_until(gate.last_start() + std::chrono::seconds(1));

  Evaluation ev;
  for (std::size_t i = 0; i < items.size(); ++i) {
    auto& a = attempts[i];
    SubmissionResult r;
    r.team = team;
    r.phase = round == Round::Final ? 0 : phase;
    r.question_id = items[i].question_id;
    r.prediction = a.prediction;
    r.explanation = a.explanation;
    const auto score = score_instance(a.prediction, items[i].truth, round);
    ev.scores.push_back(score);
    ev.phase_score += score.s;
    ev.results.push_back(std::move(r));
    ev.ledger.entries.push_back(a.entry);
  }
  std::stable_sort(ev.ledger.entries.begin(), ev.ledger.entries.end(),
                   [](const auto& x, const auto& y) { return x.start < y.start; });
  ev.disqualified = ev.ledger.disqualified(cfg.offline_limit_s, cfg.failure_limit);
  return ev;
}

ReferenceSolver::ReferenceSolver(const std::vector<Record>& dataset, Lexicon lexicon, BackendSpec backend)
    : backend_(std::move(backend)) {
  std::vector<Formula> all;
  for (const auto& r : dataset) {
    for (std::size_t i = 0; i < r.premises_nl.size() && i < r.premises_fol.size(); ++i) {
      try {
        all.push_back(parse_formula(r.premises_fol[i]));
        fol_by_nl_.emplace(r.premises_nl[i], r.premises_fol[i]);
      } catch (const Error&) {
        // Pairs that do not parse are simply not used.
      }
    }
  }
  lexicon_ = lexicon_for(lexicon, all);
}

namespace {

ReferenceSolver::Reply error_reply(int status, const std::string& message) {
  json j;
  j["error"] = message;
  return {status, j.dump()};
}

}  // namespace

ReferenceSolver::Reply ReferenceSolver::handle(std::string_view request_body) const {
  json req;
  try {
    req = json::parse(request_body);
  } catch (const json::exception&) {
    return error_reply(400, "request body is not JSON");
  }
  if (!req.is_object() || !req.contains("question") || !req.at("question").is_string() ||
      !req.contains("premises") || !req.at("premises").is_array()) {
    return error_reply(400, "expected {\"question\": string, \"premises\": [string]}");
  }
  std::vector<std::string> nl;
  for (const auto& p : req.at("premises")) {
    if (!p.is_string()) return error_reply(400, "premises must be strings");
    nl.push_back(p.get<std::string>());
  }
  std::vector<Formula> premises;
  for (std::size_t i = 0; i < nl.size(); ++i) {
    const auto known = fol_by_nl_.find(nl[i]);
    if (known != fol_by_nl_.end()) {
      premises.push_back(parse_formula(known->second));
      continue;
    }
    try {
      premises.push_back(parse_nl(nl[i], lexicon_));
      continue;
    } catch (const Error&) {
    }
    if (const auto fact = quantity_fact_from_nl(nl[i])) {
      premises.push_back(fact->to_formula());
      continue;
    }
    return error_reply(422, "cannot read premise " + std::to_string(i + 1));
  }
  QuestionSpec spec;
  try {
    spec = spec_from_text(req.at("question").get<std::string>(), lexicon_);
  } catch (const Error& e) {
    return error_reply(422, std::string("cannot read question: ") + e.what());
  }
  try {
    const auto backend = make_backend(backend_);
    const auto s = answer_question(premises, nl, spec, *backend);
    ordered_json out;
    out["answer"] = s.answer;
    out["idx"] = s.idx;
    out["explanation"] = s.explanation;
    return {200, out.dump()};
  } catch (const BackendFailure& e) {
    return error_reply(500, e.what());
  } catch (const Error& e) {
    return error_reply(422, e.what());
  }
}

struct ReferenceServer::Impl {
  std::shared_ptr<const ReferenceSolver> solver;
  httplib::Server server;
  std::thread thread;
};

ReferenceServer::ReferenceServer(std::shared_ptr<const ReferenceSolver> solver, std::string path)
    : impl_(std::make_unique<Impl>()) {
  impl_->solver = std::move(solver);
  impl_->server.new_task_queue = [] { return new httplib::ThreadPool(16); };
  auto* s = impl_->solver.get();
  impl_->server.Post(path, [s](const httplib::Request& req, httplib::Response& res) {
    const auto reply = s->handle(req.body);
    res.status = reply.status;
    res.set_content(reply.body, "application/json");
  });
}

ReferenceServer::~ReferenceServer() { stop(); }

int ReferenceServer::start(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = impl_->server.bind_to_any_port(host);
  } else if (!impl_->server.bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound < 0) throw ConfigError("cannot bind " + host + ":" + std::to_string(port));
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return bound;
}

void ReferenceServer::run(const std::string& host, int port) {
  if (!impl_->server.listen(host, port)) throw ConfigError("cannot serve on " + host + ":" + std::to_string(port));
}

void ReferenceServer::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace pqa
