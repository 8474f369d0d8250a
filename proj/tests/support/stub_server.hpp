#pragma once

// Minimal scripted HTTP endpoint for harness tests.

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <functional>
#include <mutex>
#include <string>
#include <thread>

#include <httplib.h>

namespace pqa::testing {

class StubServer {
 public:
  // Called with the zero-based request number.
  using Handler = std::function<void(int n, const httplib::Request&, httplib::Response&, StubServer&)>;

  explicit StubServer(Handler h) : handler_(std::move(h)) {
    server_.new_task_queue = [] { return new httplib::ThreadPool(32); };
    server_.Post("/query", [this](const httplib::Request& req, httplib::Response& res) {
      handler_(count_++, req, res, *this);
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~StubServer() {
    {
      std::lock_guard lock(mu_);
      stopping_ = true;
    }
    cv_.notify_all();
    server_.stop();
    thread_.join();
  }

  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }
  int requests() const { return count_; }

  // Sleeps unless the server is shutting down.
  void sleep(std::chrono::milliseconds d) {
    std::unique_lock lock(mu_);
    cv_.wait_for(lock, d, [this] { return stopping_; });
  }

  static void ok(httplib::Response& res, const std::string& answer = "Yes", const std::string& idx = "[1]") {
    res.set_content(R"({"answer": ")" + answer + R"(", "idx": )" + idx + R"(, "explanation": "Premise 1."})",
                    "application/json");
  }

 private:
  Handler handler_;
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::atomic<int> count_{0};
  std::mutex mu_;
  std::condition_variable cv_;
  bool stopping_ = false;
};

}  // namespace pqa::testing
