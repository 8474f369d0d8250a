#pragma once

// Small CDCL SAT solver: two watched literals, first-UIP learning,
// activity-based branching and Luby restarts. Sized for the grounded
// instances produced by the logic engine (a few thousand variables).

#include <cstdint>
#include <vector>

namespace pqa::sat {

// Literal encoding: 2*var for positive, 2*var+1 for negative.
struct Lit {
  int code = 0;

  static Lit pos(int var) { return {2 * var}; }
  static Lit neg(int var) { return {2 * var + 1}; }
  int var() const { return code >> 1; }
  bool negative() const { return code & 1; }
  Lit operator~() const { return {code ^ 1}; }
  friend bool operator==(Lit a, Lit b) { return a.code == b.code; }
};

class Solver {
 public:
  int new_var();
  int num_vars() const { return static_cast<int>(assign_.size()); }

  // Returns false once the clause set is known to be unsatisfiable.
  bool add_clause(std::vector<Lit> lits);
  bool solve();

  // Valid after solve() returned true.
  bool value(int var) const { return model_[var]; }

  std::uint64_t conflicts() const { return conflicts_; }

 private:
  enum : std::int8_t { kFalse = -1, kUndef = 0, kTrue = 1 };

  std::int8_t lit_value(Lit l) const {
    const std::int8_t v = assign_[l.var()];
    return l.negative() ? static_cast<std::int8_t>(-v) : v;
  }
  void enqueue(Lit l, int reason);
  int propagate();  // conflicting clause index or -1
  void analyze(int conflict, std::vector<Lit>& learnt, int& backtrack_level);
  void backtrack(int level);
  int pick_branch() const;
  void bump(int var);
  int level() const { return static_cast<int>(trail_lim_.size()); }

  std::vector<std::vector<Lit>> clauses_;
  std::vector<std::vector<int>> watches_;  // per literal code: clause indices
  std::vector<std::int8_t> assign_;
  std::vector<int> levels_;
  std::vector<int> reasons_;
  std::vector<double> activity_;
  std::vector<bool> phase_;
  std::vector<bool> seen_;
  std::vector<Lit> trail_;
  std::vector<int> trail_lim_;
  std::vector<bool> model_;
  std::size_t qhead_ = 0;
  double var_inc_ = 1.0;
  bool inconsistent_ = false;
  std::uint64_t conflicts_ = 0;
};

}  // namespace pqa::sat
