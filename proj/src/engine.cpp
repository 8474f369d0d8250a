#include "pqa/engine.hpp"

#include <algorithm>
#include <charconv>

#include "pqa/errors.hpp"
#include "pqa/fol.hpp"
#include "pqa/sat.hpp"
#include "pqa/smtlib.hpp"

namespace pqa {

std::string_view to_string(EntailmentStatus s) {
  switch (s) {
    case EntailmentStatus::Yes: return "Yes";
    case EntailmentStatus::No: return "No";
    case EntailmentStatus::Uncertain: return "Uncertain";
  }
  return "Uncertain";
}

namespace {

int count_exists(const Formula& f) {
  switch (f.kind()) {
    case Formula::Kind::Pred:
      return 0;
    case Formula::Kind::Not:
      return count_exists(f.operand());
    case Formula::Kind::Exists:
      return 1 + count_exists(f.body());
    case Formula::Kind::ForAll:
      return count_exists(f.body());
    default:
      return count_exists(f.lhs()) + count_exists(f.rhs());
  }
}

class Grounder {
 public:
  Grounder(sat::Solver& solver, int domain, const std::set<std::string>& consts) : solver_(solver), domain_(domain) {
    int e = 0;
    for (const auto& c : consts) constants_[c] = e++;
  }

  sat::Lit encode(const Formula& f) {
    switch (f.kind()) {
      case Formula::Kind::Pred: {
        const Term& t = f.term();
        int element;
        if (t.is_var()) {
          auto it = std::find_if(env_.rbegin(), env_.rend(), [&](const auto& b) { return b.first == t.name; });
          if (it == env_.rend()) throw Error("free variable '" + t.name + "' in grounded formula");
          element = it->second;
        } else {
          element = constants_.at(t.name);
        }
        auto [it, fresh] = atoms_.try_emplace({f.symbol(), element}, 0);
        if (fresh) it->second = solver_.new_var();
        return sat::Lit::pos(it->second);
      }
      case Formula::Kind::Not:
        return ~encode(f.operand());
      case Formula::Kind::And:
        return gate(true, {encode(f.lhs()), encode(f.rhs())});
      case Formula::Kind::Or:
        return gate(false, {encode(f.lhs()), encode(f.rhs())});
      case Formula::Kind::Implies:
        return gate(false, {~encode(f.lhs()), encode(f.rhs())});
      case Formula::Kind::ForAll:
      case Formula::Kind::Exists: {
        std::vector<sat::Lit> parts;
        parts.reserve(domain_);
        for (int e = 0; e < domain_; ++e) {
          env_.emplace_back(f.symbol(), e);
          parts.push_back(encode(f.body()));
          env_.pop_back();
        }
        return gate(f.kind() == Formula::Kind::ForAll, parts);
      }
    }
    throw Error("unreachable");
  }

 private:
  // Fresh variable g with g <-> AND(parts) (or OR).
  sat::Lit gate(bool is_and, const std::vector<sat::Lit>& parts) {
    if (parts.size() == 1) return parts[0];
    const sat::Lit g = sat::Lit::pos(solver_.new_var());
    std::vector<sat::Lit> big;
    big.reserve(parts.size() + 1);
    if (is_and) {
      big.push_back(g);
      for (auto p : parts) {
        solver_.add_clause({~g, p});
        big.push_back(~p);
      }
    } else {
      big.push_back(~g);
      for (auto p : parts) {
        solver_.add_clause({g, ~p});
        big.push_back(p);
      }
    }
    solver_.add_clause(std::move(big));
    return g;
  }

  sat::Solver& solver_;
  int domain_;
  std::map<std::string, int> constants_;
  std::map<std::pair<std::string, int>, int> atoms_;
  std::vector<std::pair<std::string, int>> env_;
};

std::vector<Formula> subset_of(std::span<const Formula> premises, const std::vector<int>& subset) {
  std::vector<Formula> out;
  out.reserve(subset.size());
  for (int i : subset) out.push_back(premises[i - 1]);
  return out;
}

// Calls visit(combination) for every k-subset of {1..n} in lexicographic
// order until visit returns false.
template <typename Visit>
bool for_each_combination(int n, int k, Visit&& visit) {
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i + 1;
  while (true) {
    if (!visit(idx)) return false;
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i + 1) --i;
    if (i < 0) return true;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace

int InternalBackend::domain_size(std::span<const Formula> formulas) const {
  std::set<std::string> preds, consts;
  bool nested = false;
  int witnesses = 0;
  for (const auto& f : formulas) {
    preds.merge(predicates(f));
    consts.merge(constants(f));
    if (quantifier_depth(f) > 1) nested = true;
    witnesses += count_exists(to_nnf(f));
  }
  const int p = static_cast<int>(preds.size());
  if (p > max_predicates_) {
    throw CapacityExceeded(std::to_string(p) + " predicates exceed the internal backend limit of " +
                           std::to_string(max_predicates_));
  }
  const int k = static_cast<int>(consts.size());
  if (nested) {
    if (p > kMaxNestedPredicates) {
      throw CapacityExceeded("nested quantifiers over " + std::to_string(p) +
                             " predicates need a 2^p grounding beyond the internal limit of " +
                             std::to_string(kMaxNestedPredicates));
    }
    return k + (1 << p);
  }
  return std::max(1, k + witnesses);
}

bool InternalBackend::satisfiable(std::span<const Formula> formulas) {
  for (const auto& f : formulas) {
    if (!is_closed(f)) throw Error("formula is not closed: " + render_fol(f));
  }
  const int domain = domain_size(formulas);
  sat::Solver solver;
  Grounder grounder(solver, domain, constants(std::vector<Formula>(formulas.begin(), formulas.end())));
  for (const auto& f : formulas) {
    if (!solver.add_clause({grounder.encode(f)})) return false;
  }
  return solver.solve();
}

BackendSpec BackendSpec::parse(std::string_view text) {
  BackendSpec spec;
  if (text == "internal") return spec;
  if (text.starts_with("internal:")) {
    const auto digits = text.substr(9);
    int n = 0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), n);
    if (ec != std::errc() || ptr != digits.data() + digits.size() || n < 1)
      throw ConfigError("bad internal backend capacity in '" + std::string(text) + "'");
    spec.max_predicates = n;
    return spec;
  }
  if (text.starts_with("external:") && text.size() > 9) {
    spec.kind = Kind::External;
    spec.command = std::string(text.substr(9));
    return spec;
  }
  throw ConfigError("backend must be 'internal' or 'external:<command>', got '" + std::string(text) + "'");
}

std::string BackendSpec::to_string() const {
  if (kind == Kind::External) return "external:" + command;
  if (max_predicates == InternalBackend::kDefaultMaxPredicates) return "internal";
  return "internal:" + std::to_string(max_predicates);
}

std::unique_ptr<SolverBackend> make_backend(const BackendSpec& spec) {
  if (spec.kind == BackendSpec::Kind::External) return std::make_unique<ExternalBackend>(spec.command);
  return std::make_unique<InternalBackend>(spec.max_predicates);
}

bool is_satisfiable(std::span<const Formula> premises, SolverBackend& backend) {
  return backend.satisfiable(premises);
}

EntailmentStatus entails(std::span<const Formula> premises, const Formula& goal, SolverBackend& backend) {
  if (!backend.satisfiable(premises)) throw InconsistentPremises();
  std::vector<Formula> with(premises.begin(), premises.end());
  with.push_back(Formula::negate(goal));
  if (!backend.satisfiable(with)) return EntailmentStatus::Yes;
  with.back() = goal;
  if (!backend.satisfiable(with)) return EntailmentStatus::No;
  return EntailmentStatus::Uncertain;
}

bool supports(std::span<const Formula> premises, const std::vector<int>& subset, const Formula& goal,
              EntailmentStatus status, SolverBackend& backend) {
  if (status == EntailmentStatus::Uncertain) throw NoSupport("Uncertain answers have no entailment support");
  auto formulas = subset_of(premises, subset);
  formulas.push_back(status == EntailmentStatus::Yes ? Formula::negate(goal) : goal);
  return !backend.satisfiable(formulas);
}

std::vector<SupportSet> minimum_supports(std::span<const Formula> premises, const Formula& goal,
                                         EntailmentStatus status, SolverBackend& backend, std::size_t limit) {
  if (status == EntailmentStatus::Uncertain) throw NoSupport("Uncertain answers have no entailment support");
  const int n = static_cast<int>(premises.size());
  std::vector<SupportSet> found;
  for (int k = 0; k <= n && found.empty(); ++k) {
    if (k == 0) {
      if (supports(premises, {}, goal, status, backend)) found.push_back({});
      continue;
    }
    for_each_combination(n, k, [&](const std::vector<int>& combo) {
      if (supports(premises, combo, goal, status, backend)) found.push_back({combo, true});
      return found.size() < limit;
    });
  }
  return found;
}

SupportSet minimal_support(std::span<const Formula> premises, const Formula& goal, EntailmentStatus status,
                           SolverBackend& backend, SupportOptions options) {
  if (status == EntailmentStatus::Uncertain) throw NoSupport("Uncertain answers have no entailment support");
  if (entails(premises, goal, backend) != status) throw NoSupport("premises do not yield the given status");
  const int n = static_cast<int>(premises.size());
  if (premises.size() > options.size_cap) {
    std::vector<int> kept(n);
    for (int i = 0; i < n; ++i) kept[i] = i + 1;
    for (int i = 1; i <= n; ++i) {
      std::vector<int> trial;
      std::copy_if(kept.begin(), kept.end(), std::back_inserter(trial), [&](int j) { return j != i; });
      if (supports(premises, trial, goal, status, backend)) kept = std::move(trial);
    }
    return {kept, false};
  }
  auto all = minimum_supports(premises, goal, status, backend, 1);
  if (all.empty()) throw NoSupport("no subset supports the goal");
  return all.front();
}

std::vector<int> related_premises(std::span<const Formula> premises, const Formula& goal) {
  const auto goal_preds = predicates(goal);
  std::vector<int> out;
  for (std::size_t i = 0; i < premises.size(); ++i) {
    for (const auto& p : predicates(premises[i])) {
      if (goal_preds.count(p)) {
        out.push_back(static_cast<int>(i) + 1);
        break;
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Model enumeration

namespace {

bool eval(const Model& m, const Formula& f, std::vector<std::pair<std::string, int>>& env) {
  switch (f.kind()) {
    case Formula::Kind::Pred: {
      const Term& t = f.term();
      int element;
      if (t.is_var()) {
        auto it = std::find_if(env.rbegin(), env.rend(), [&](const auto& b) { return b.first == t.name; });
        if (it == env.rend()) throw Error("free variable '" + t.name + "'");
        element = it->second;
      } else {
        auto it = m.constants.find(t.name);
        if (it == m.constants.end()) throw Error("constant '" + t.name + "' not interpreted");
        element = it->second;
      }
      auto it = m.extension.find(f.symbol());
      return it != m.extension.end() && ((it->second >> element) & 1u);
    }
    case Formula::Kind::Not:
      return !eval(m, f.operand(), env);
    case Formula::Kind::And:
      return eval(m, f.lhs(), env) && eval(m, f.rhs(), env);
    case Formula::Kind::Or:
      return eval(m, f.lhs(), env) || eval(m, f.rhs(), env);
    case Formula::Kind::Implies:
      return !eval(m, f.lhs(), env) || eval(m, f.rhs(), env);
    case Formula::Kind::ForAll:
    case Formula::Kind::Exists: {
      const bool universal = f.kind() == Formula::Kind::ForAll;
      for (int e = 0; e < m.domain_size; ++e) {
        env.emplace_back(f.symbol(), e);
        const bool v = eval(m, f.body(), env);
        env.pop_back();
        if (universal && !v) return false;
        if (!universal && v) return true;
      }
      return universal;
    }
  }
  return false;
}

}  // namespace

bool holds(const Model& model, const Formula& f) {
  std::vector<std::pair<std::string, int>> env;
  return eval(model, f, env);
}

std::vector<Model> enumerate_models(std::span<const Formula> premises, int domain_size,
                                    const std::vector<std::string>& extra_predicates,
                                    const std::vector<std::string>& extra_constants) {
  std::vector<Formula> fs(premises.begin(), premises.end());
  auto preds = predicates(fs);
  preds.insert(extra_predicates.begin(), extra_predicates.end());
  auto consts = constants(fs);
  consts.insert(extra_constants.begin(), extra_constants.end());
  const int p = static_cast<int>(preds.size());
  if (p > 4) throw CapacityExceeded("model enumeration supports at most 4 predicates");
  if (domain_size < 1 || domain_size > (1 << p) || domain_size > 16)
    throw CapacityExceeded("domain size must lie in [1, 2^p]");

  const std::vector<std::string> pred_list(preds.begin(), preds.end());
  const std::vector<std::string> const_list(consts.begin(), consts.end());
  const std::uint64_t masks = 1ull << domain_size;
  std::uint64_t ext_total = 1;
  for (int i = 0; i < p; ++i) ext_total *= masks;
  std::uint64_t const_total = 1;
  for (std::size_t i = 0; i < const_list.size(); ++i) const_total *= static_cast<std::uint64_t>(domain_size);

  std::vector<Model> out;
  Model m;
  m.domain_size = domain_size;
  for (std::uint64_t ci = 0; ci < const_total; ++ci) {
    std::uint64_t c = ci;
    for (const auto& name : const_list) {
      m.constants[name] = static_cast<int>(c % domain_size);
      c /= domain_size;
    }
    for (std::uint64_t ei = 0; ei < ext_total; ++ei) {
      std::uint64_t e = ei;
      for (const auto& name : pred_list) {
        m.extension[name] = static_cast<std::uint32_t>(e % masks);
        e /= masks;
      }
      if (std::all_of(fs.begin(), fs.end(), [&](const Formula& f) { return holds(m, f); })) out.push_back(m);
    }
  }
  return out;
}

}  // namespace pqa
