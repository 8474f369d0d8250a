#include "pqa/formula.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

#include "pqa/errors.hpp"

namespace pqa {

struct Formula::Node {
  Kind kind;
  std::string symbol;
  Term term;
  std::shared_ptr<const Node> lhs;
  std::shared_ptr<const Node> rhs;
};

Formula Formula::pred(std::string name, Term arg) {
  if (name.empty()) throw Error("predicate name must be nonempty");
  if (arg.name.empty()) throw Error("term name must be nonempty");
  return Formula(std::make_shared<const Node>(Node{Kind::Pred, std::move(name), std::move(arg), nullptr, nullptr}));
}

Formula Formula::negate(Formula operand) {
  return Formula(std::make_shared<const Node>(Node{Kind::Not, {}, {}, std::move(operand.node_), nullptr}));
}

Formula Formula::conj(Formula lhs, Formula rhs) {
  return Formula(std::make_shared<const Node>(Node{Kind::And, {}, {}, std::move(lhs.node_), std::move(rhs.node_)}));
}

Formula Formula::disj(Formula lhs, Formula rhs) {
  return Formula(std::make_shared<const Node>(Node{Kind::Or, {}, {}, std::move(lhs.node_), std::move(rhs.node_)}));
}

Formula Formula::implies(Formula lhs, Formula rhs) {
  return Formula(
      std::make_shared<const Node>(Node{Kind::Implies, {}, {}, std::move(lhs.node_), std::move(rhs.node_)}));
}

Formula Formula::forall(std::string var, Formula body) {
  if (var.empty()) throw Error("bound variable must be nonempty");
  return Formula(std::make_shared<const Node>(Node{Kind::ForAll, std::move(var), {}, std::move(body.node_), nullptr}));
}

Formula Formula::exists(std::string var, Formula body) {
  if (var.empty()) throw Error("bound variable must be nonempty");
  return Formula(std::make_shared<const Node>(Node{Kind::Exists, std::move(var), {}, std::move(body.node_), nullptr}));
}

Formula::Kind Formula::kind() const { return node_->kind; }

bool Formula::is_binary() const {
  const Kind k = kind();
  return k == Kind::And || k == Kind::Or || k == Kind::Implies;
}

bool Formula::is_quantifier() const { return kind() == Kind::ForAll || kind() == Kind::Exists; }

const std::string& Formula::symbol() const { return node_->symbol; }
const Term& Formula::term() const { return node_->term; }

Formula Formula::lhs() const {
  assert(node_->lhs);
  return Formula(node_->lhs);
}

Formula Formula::rhs() const {
  assert(node_->rhs);
  return Formula(node_->rhs);
}

bool operator==(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Formula::Kind::Pred:
      return a.symbol() == b.symbol() && a.term() == b.term();
    case Formula::Kind::Not:
      return a.operand() == b.operand();
    case Formula::Kind::ForAll:
    case Formula::Kind::Exists:
      return a.symbol() == b.symbol() && a.body() == b.body();
    default:
      return a.lhs() == b.lhs() && a.rhs() == b.rhs();
  }
}

Formula conj_chain(const std::vector<Formula>& parts) {
  if (parts.empty()) throw Error("empty conjunction");
  Formula acc = parts.front();
  for (std::size_t i = 1; i < parts.size(); ++i) acc = Formula::conj(acc, parts[i]);
  return acc;
}

Formula disj_chain(const std::vector<Formula>& parts) {
  if (parts.empty()) throw Error("empty disjunction");
  Formula acc = parts.front();
  for (std::size_t i = 1; i < parts.size(); ++i) acc = Formula::disj(acc, parts[i]);
  return acc;
}

namespace {

template <typename Visit>
void walk(const Formula& f, Visit&& visit) {
  visit(f);
  switch (f.kind()) {
    case Formula::Kind::Pred:
      return;
    case Formula::Kind::Not:
    case Formula::Kind::ForAll:
    case Formula::Kind::Exists:
      walk(f.lhs(), visit);
      return;
    default:
      walk(f.lhs(), visit);
      walk(f.rhs(), visit);
  }
}

void collect_free(const Formula& f, std::set<std::string>& bound, std::set<std::string>& out) {
  switch (f.kind()) {
    case Formula::Kind::Pred:
      if (f.term().is_var() && !bound.count(f.term().name)) out.insert(f.term().name);
      return;
    case Formula::Kind::Not:
      collect_free(f.operand(), bound, out);
      return;
    case Formula::Kind::ForAll:
    case Formula::Kind::Exists: {
      const bool fresh = bound.insert(f.symbol()).second;
      collect_free(f.body(), bound, out);
      if (fresh) bound.erase(f.symbol());
      return;
    }
    default:
      collect_free(f.lhs(), bound, out);
      collect_free(f.rhs(), bound, out);
  }
}

}  // namespace

std::set<std::string> predicates(const Formula& f) {
  std::set<std::string> out;
  walk(f, [&](const Formula& g) {
    if (g.kind() == Formula::Kind::Pred) out.insert(g.symbol());
  });
  return out;
}

std::set<std::string> predicates(const std::vector<Formula>& fs) {
  std::set<std::string> out;
  for (const auto& f : fs) out.merge(predicates(f));
  return out;
}

std::set<std::string> constants(const Formula& f) {
  std::set<std::string> out;
  walk(f, [&](const Formula& g) {
    if (g.kind() == Formula::Kind::Pred && !g.term().is_var()) out.insert(g.term().name);
  });
  return out;
}

std::set<std::string> constants(const std::vector<Formula>& fs) {
  std::set<std::string> out;
  for (const auto& f : fs) out.merge(constants(f));
  return out;
}

std::set<std::string> free_variables(const Formula& f) {
  std::set<std::string> bound, out;
  collect_free(f, bound, out);
  return out;
}

bool is_closed(const Formula& f) { return free_variables(f).empty(); }

int quantifier_depth(const Formula& f) {
  switch (f.kind()) {
    case Formula::Kind::Pred:
      return 0;
    case Formula::Kind::Not:
      return quantifier_depth(f.operand());
    case Formula::Kind::ForAll:
    case Formula::Kind::Exists:
      return 1 + quantifier_depth(f.body());
    default:
      return std::max(quantifier_depth(f.lhs()), quantifier_depth(f.rhs()));
  }
}

std::size_t node_count(const Formula& f) {
  std::size_t n = 0;
  walk(f, [&](const Formula&) { ++n; });
  return n;
}

Formula Literal::to_formula(const std::string& var) const {
  Formula a = atom(pred, var);
  return positive ? a : Formula::negate(a);
}

Formula LiteralChain::to_formula(const std::string& var) const {
  std::vector<Formula> parts;
  parts.reserve(literals.size());
  for (const auto& l : literals) parts.push_back(l.to_formula(var));
  return op == Op::And ? conj_chain(parts) : disj_chain(parts);
}

bool as_literal(const Formula& f, const std::string& var, Literal& out) {
  if (f.kind() == Formula::Kind::Pred) {
    if (!f.term().is_var() || f.term().name != var) return false;
    out = {f.symbol(), true};
    return true;
  }
  if (f.kind() == Formula::Kind::Not && f.operand().kind() == Formula::Kind::Pred) {
    const Formula a = f.operand();
    if (!a.term().is_var() || a.term().name != var) return false;
    out = {a.symbol(), false};
    return true;
  }
  return false;
}

namespace {

bool flatten(const Formula& f, Formula::Kind op, const std::string& var, std::vector<Literal>& out) {
  if (f.kind() == op) return flatten(f.lhs(), op, var, out) && flatten(f.rhs(), op, var, out);
  Literal l;
  if (!as_literal(f, var, l)) return false;
  out.push_back(l);
  return true;
}

}  // namespace

bool as_chain(const Formula& f, const std::string& var, LiteralChain& out) {
  out.literals.clear();
  if (f.kind() == Formula::Kind::Or) {
    out.op = LiteralChain::Op::Or;
    return flatten(f, Formula::Kind::Or, var, out.literals);
  }
  out.op = LiteralChain::Op::And;
  return flatten(f, Formula::Kind::And, var, out.literals);
}

}  // namespace pqa
