#pragma once

#include <mutex>
#include <span>
#include <string>

#include "pqa/engine.hpp"

namespace pqa {

// SMT-LIB 2 rendering of a satisfiability query: one uninterpreted sort U,
// a Bool-valued function per predicate, a U constant per individual
// constant, the asserted formulas and (check-sat). Names are prefixed to
// stay clear of SMT-LIB reserved words.
std::string to_smtlib(std::span<const Formula> formulas);

// Drives an SMT-LIB 2 solver (e.g. "z3 -in") over its stdio. The process is
// started lazily and reused; each query runs inside push/pop. One instance
// must not be shared across concurrent callers.
class ExternalBackend final : public SolverBackend {
 public:
  explicit ExternalBackend(std::string command);
  ~ExternalBackend() override;
  ExternalBackend(const ExternalBackend&) = delete;
  ExternalBackend& operator=(const ExternalBackend&) = delete;

  bool satisfiable(std::span<const Formula> formulas) override;
  std::string name() const override { return "external:" + command_; }

 private:
  void start();
  void stop();
  void write_all(const std::string& text);
  std::string read_line();

  std::string command_;
  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
  std::mutex mutex_;
};

}  // namespace pqa
