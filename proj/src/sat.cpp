#include "pqa/sat.hpp"

#include <algorithm>

namespace pqa::sat {

namespace {

double luby(double y, int x) {
  int size = 1, seq = 0;
  for (; size < x + 1; seq++, size = 2 * size + 1) {
  }
  while (size - 1 != x) {
    size = (size - 1) >> 1;
    seq--;
    x = x % size;
  }
  double r = 1;
  for (int i = 0; i < seq; ++i) r *= y;
  return r;
}

}  // namespace

int Solver::new_var() {
  const int v = num_vars();
  assign_.push_back(kUndef);
  levels_.push_back(0);
  reasons_.push_back(-1);
  activity_.push_back(0.0);
  phase_.push_back(false);
  seen_.push_back(false);
  watches_.emplace_back();
  watches_.emplace_back();
  return v;
}

bool Solver::add_clause(std::vector<Lit> lits) {
  if (inconsistent_) return false;
  // Clauses are only added at level 0.
  backtrack(0);
  std::sort(lits.begin(), lits.end(), [](Lit a, Lit b) { return a.code < b.code; });
  std::vector<Lit> kept;
  for (std::size_t i = 0; i < lits.size(); ++i) {
    if (i + 1 < lits.size() && lits[i + 1] == ~lits[i]) return true;  // tautology
    if (!kept.empty() && kept.back() == lits[i]) continue;
    const auto v = lit_value(lits[i]);
    if (v == kTrue) return true;
    if (v == kFalse) continue;
    kept.push_back(lits[i]);
  }
  if (kept.empty()) {
    inconsistent_ = true;
    return false;
  }
  if (kept.size() == 1) {
    enqueue(kept[0], -1);
    if (propagate() >= 0) inconsistent_ = true;
    return !inconsistent_;
  }
  const int idx = static_cast<int>(clauses_.size());
  watches_[kept[0].code].push_back(idx);
  watches_[kept[1].code].push_back(idx);
  clauses_.push_back(std::move(kept));
  return true;
}

void Solver::enqueue(Lit l, int reason) {
  assign_[l.var()] = l.negative() ? kFalse : kTrue;
  levels_[l.var()] = level();
  reasons_[l.var()] = reason;
  trail_.push_back(l);
}

// Watches are kept on clause positions 0 and 1; a watch list for literal L
// holds clauses watching L, visited when L becomes false.
int Solver::propagate() {
  while (qhead_ < trail_.size()) {
    const Lit p = trail_[qhead_++];
    const Lit false_lit = ~p;
    auto& ws = watches_[false_lit.code];
    std::size_t i = 0, j = 0;
    int conflict = -1;
    while (i < ws.size()) {
      const int ci = ws[i++];
      auto& c = clauses_[ci];
      if (c[0] == false_lit) std::swap(c[0], c[1]);
      if (lit_value(c[0]) == kTrue) {
        ws[j++] = ci;
        continue;
      }
      bool moved = false;
      for (std::size_t k = 2; k < c.size(); ++k) {
        if (lit_value(c[k]) != kFalse) {
          std::swap(c[1], c[k]);
          watches_[c[1].code].push_back(ci);
          moved = true;
          break;
        }
      }
      if (moved) continue;
      ws[j++] = ci;
      if (lit_value(c[0]) == kFalse) {
        conflict = ci;
        while (i < ws.size()) ws[j++] = ws[i++];
      } else {
        enqueue(c[0], ci);
      }
    }
    ws.resize(j);
    if (conflict >= 0) return conflict;
  }
  return -1;
}

void Solver::bump(int var) {
  activity_[var] += var_inc_;
  if (activity_[var] > 1e100) {
    for (auto& a : activity_) a *= 1e-100;
    var_inc_ *= 1e-100;
  }
}

void Solver::analyze(int conflict, std::vector<Lit>& learnt, int& backtrack_level) {
  learnt.clear();
  learnt.push_back({});  // slot for the asserting literal
  int pending = 0;
  Lit p{-1};
  int index = static_cast<int>(trail_.size()) - 1;
  int ci = conflict;
  do {
    const auto& c = clauses_[ci];
    for (std::size_t k = (p.code == -1 ? 0 : 1); k < c.size(); ++k) {
      const Lit q = c[k];
      const int v = q.var();
      if (seen_[v] || levels_[v] == 0) continue;
      seen_[v] = true;
      bump(v);
      if (levels_[v] >= level()) ++pending;
      else learnt.push_back(q);
    }
    while (!seen_[trail_[index].var()]) --index;
    p = trail_[index--];
    ci = reasons_[p.var()];
    seen_[p.var()] = false;
    --pending;
    // Reason clauses keep their implied literal at position 0.
    if (ci >= 0 && !(clauses_[ci][0] == p)) {
      auto& rc = clauses_[ci];
      for (std::size_t k = 1; k < rc.size(); ++k) {
        if (rc[k] == p) {
          std::swap(rc[0], rc[k]);
          break;
        }
      }
    }
  } while (pending > 0);
  learnt[0] = ~p;

  backtrack_level = 0;
  std::size_t max_i = 1;
  for (std::size_t k = 1; k < learnt.size(); ++k) {
    if (levels_[learnt[k].var()] > backtrack_level) {
      backtrack_level = levels_[learnt[k].var()];
      max_i = k;
    }
  }
  if (learnt.size() > 1) std::swap(learnt[1], learnt[max_i]);
  for (const auto& l : learnt) seen_[l.var()] = false;
  var_inc_ /= 0.95;
}

void Solver::backtrack(int lvl) {
  if (level() <= lvl) return;
  for (int i = static_cast<int>(trail_.size()) - 1; i >= trail_lim_[lvl]; --i) {
    const int v = trail_[i].var();
    phase_[v] = assign_[v] == kTrue;
    assign_[v] = kUndef;
    reasons_[v] = -1;
  }
  trail_.resize(trail_lim_[lvl]);
  trail_lim_.resize(lvl);
  qhead_ = trail_.size();
}

int Solver::pick_branch() const {
  int best = -1;
  double best_act = -1.0;
  for (int v = 0; v < num_vars(); ++v) {
    if (assign_[v] == kUndef && activity_[v] > best_act) {
      best = v;
      best_act = activity_[v];
    }
  }
  return best;
}

bool Solver::solve() {
  if (inconsistent_) return false;
  backtrack(0);
  if (propagate() >= 0) {
    inconsistent_ = true;
    return false;
  }
  int restart = 0;
  std::vector<Lit> learnt;
  while (true) {
    const double budget = luby(2.0, restart++) * 100;
    int local_conflicts = 0;
    while (true) {
      const int conflict = propagate();
      if (conflict >= 0) {
        ++conflicts_;
        ++local_conflicts;
        if (level() == 0) {
          inconsistent_ = true;
          return false;
        }
        int bt = 0;
        analyze(conflict, learnt, bt);
        backtrack(bt);
        if (learnt.size() == 1) {
          enqueue(learnt[0], -1);
        } else {
          const int idx = static_cast<int>(clauses_.size());
          watches_[learnt[0].code].push_back(idx);
          watches_[learnt[1].code].push_back(idx);
          clauses_.push_back(learnt);
          enqueue(learnt[0], idx);
        }
        continue;
      }
      if (local_conflicts >= budget) {
        backtrack(0);
        break;
      }
      const int v = pick_branch();
      if (v < 0) {
        model_.assign(num_vars(), false);
        for (int u = 0; u < num_vars(); ++u) model_[u] = assign_[u] == kTrue;
        backtrack(0);
        return true;
      }
      trail_lim_.push_back(static_cast<int>(trail_.size()));
      enqueue(phase_[v] ? Lit::pos(v) : Lit::neg(v), -1);
    }
  }
}

}  // namespace pqa::sat
