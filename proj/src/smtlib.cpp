#include "pqa/smtlib.hpp"

#include <csignal>
#include <cerrno>
#include <cstring>

#include <fcntl.h>
#include <sys/wait.h>
#include <unistd.h>

#include "pqa/errors.hpp"

namespace pqa {

namespace {

void emit(const Formula& f, std::string& out) {
  switch (f.kind()) {
    case Formula::Kind::Pred:
      out += "(p_" + f.symbol() + " " + (f.term().is_var() ? "v_" : "c_") + f.term().name + ")";
      return;
    case Formula::Kind::Not:
      out += "(not ";
      emit(f.operand(), out);
      out += ")";
      return;
    case Formula::Kind::And:
    case Formula::Kind::Or:
    case Formula::Kind::Implies:
      out += f.kind() == Formula::Kind::And ? "(and " : f.kind() == Formula::Kind::Or ? "(or " : "(=> ";
      emit(f.lhs(), out);
      out += " ";
      emit(f.rhs(), out);
      out += ")";
      return;
    case Formula::Kind::ForAll:
    case Formula::Kind::Exists:
      out += f.kind() == Formula::Kind::ForAll ? "(forall ((v_" : "(exists ((v_";
      out += f.symbol() + " U)) ";
      emit(f.body(), out);
      out += ")";
      return;
  }
}

}  // namespace

std::string to_smtlib(std::span<const Formula> formulas) {
  std::vector<Formula> fs(formulas.begin(), formulas.end());
  std::string out;
  for (const auto& p : predicates(fs)) out += "(declare-fun p_" + p + " (U) Bool)\n";
  for (const auto& c : constants(fs)) out += "(declare-const c_" + c + " U)\n";
  for (const auto& f : fs) {
    out += "(assert ";
    emit(f, out);
    out += ")\n";
  }
  out += "(check-sat)\n";
  return out;
}

ExternalBackend::ExternalBackend(std::string command) : command_(std::move(command)) {}

ExternalBackend::~ExternalBackend() { stop(); }

void ExternalBackend::start() {
  int in_pipe[2], out_pipe[2];
  if (pipe(in_pipe) != 0 || pipe(out_pipe) != 0) throw BackendFailure("pipe: " + std::string(std::strerror(errno)));
  const pid_t pid = fork();
  if (pid < 0) throw BackendFailure("fork: " + std::string(std::strerror(errno)));
  if (pid == 0) {
    dup2(in_pipe[0], STDIN_FILENO);
    dup2(out_pipe[1], STDOUT_FILENO);
    close(in_pipe[0]);
    close(in_pipe[1]);
    close(out_pipe[0]);
    close(out_pipe[1]);
    execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  close(in_pipe[0]);
  close(out_pipe[1]);
  pid_ = pid;
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
  fcntl(to_child_, F_SETFD, FD_CLOEXEC);
  fcntl(from_child_, F_SETFD, FD_CLOEXEC);
  buffer_.clear();
  write_all("(set-option :print-success false)\n(declare-sort U 0)\n");
}

void ExternalBackend::stop() {
  if (pid_ < 0) return;
  close(to_child_);
  close(from_child_);
  kill(pid_, SIGTERM);
  waitpid(pid_, nullptr, 0);
  pid_ = -1;
  to_child_ = from_child_ = -1;
}

void ExternalBackend::write_all(const std::string& text) {
  // A solver that exited leaves a closed pipe; report it instead of dying.
  std::signal(SIGPIPE, SIG_IGN);
  std::size_t done = 0;
  while (done < text.size()) {
    const ssize_t n = write(to_child_, text.data() + done, text.size() - done);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw BackendFailure("write to solver failed: " + std::string(std::strerror(errno)));
    }
    done += static_cast<std::size_t>(n);
  }
}

std::string ExternalBackend::read_line() {
  while (true) {
    const auto nl = buffer_.find('\n');
    if (nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
      if (line.empty()) continue;
      return line;
    }
    char chunk[4096];
    const ssize_t n = read(from_child_, chunk, sizeof chunk);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) throw BackendFailure("solver process closed its output");
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

bool ExternalBackend::satisfiable(std::span<const Formula> formulas) {
  std::lock_guard lock(mutex_);
  if (pid_ < 0) start();
  try {
    write_all("(push 1)\n" + to_smtlib(formulas) + "(pop 1)\n");
    const std::string reply = read_line();
    if (reply == "sat") return true;
    if (reply == "unsat") return false;
    throw BackendFailure("solver replied '" + reply + "'");
  } catch (const BackendFailure&) {
    stop();
    throw;
  }
}

}  // namespace pqa
