#pragma once

// AST for the monadic first-order fragment used by the dataset: unary
// predicates over variables or constants, the usual connectives, and the
// two quantifiers. Formulas are immutable and share structure.

#include <cstddef>
#include <memory>
#include <set>
#include <string>
#include <vector>

namespace pqa {

struct Term {
  enum class Kind { Var, Const };

  static Term var(std::string name) { return {Kind::Var, std::move(name)}; }
  static Term constant(std::string name) { return {Kind::Const, std::move(name)}; }

  bool is_var() const { return kind == Kind::Var; }

  Kind kind = Kind::Var;
  std::string name;

  friend bool operator==(const Term&, const Term&) = default;
};

class Formula {
 public:
  enum class Kind { Pred, Not, And, Or, Implies, ForAll, Exists };

  static Formula pred(std::string name, Term arg);
  static Formula negate(Formula operand);
  static Formula conj(Formula lhs, Formula rhs);
  static Formula disj(Formula lhs, Formula rhs);
  static Formula implies(Formula lhs, Formula rhs);
  static Formula forall(std::string var, Formula body);
  static Formula exists(std::string var, Formula body);

  Kind kind() const;
  bool is_binary() const;
  bool is_quantifier() const;

  // Predicate name (Pred) or bound variable (ForAll/Exists).
  const std::string& symbol() const;
  const Term& term() const;
  // Not: operand; quantifiers: body; binary: left operand.
  Formula lhs() const;
  Formula rhs() const;
  Formula operand() const { return lhs(); }
  Formula body() const { return lhs(); }

  // Identity of the underlying node, for caches keyed by subformula.
  const void* id() const { return node_.get(); }

  friend bool operator==(const Formula& a, const Formula& b);

 private:
  struct Node;
  explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

// Shorthand used heavily by the generator and the tests.
inline Formula atom(const std::string& pred, const std::string& var = "x") {
  return Formula::pred(pred, Term::var(var));
}
inline Formula ground(const std::string& pred, const std::string& constant) {
  return Formula::pred(pred, Term::constant(constant));
}

// Left-associated chains; `parts` must be nonempty.
Formula conj_chain(const std::vector<Formula>& parts);
Formula disj_chain(const std::vector<Formula>& parts);

std::set<std::string> predicates(const Formula& f);
std::set<std::string> predicates(const std::vector<Formula>& fs);
std::set<std::string> constants(const Formula& f);
std::set<std::string> constants(const std::vector<Formula>& fs);
std::set<std::string> free_variables(const Formula& f);
bool is_closed(const Formula& f);

// Maximum number of quantifiers on any root-to-leaf path.
int quantifier_depth(const Formula& f);
std::size_t node_count(const Formula& f);

// Literal view used by generation and natural-language templates.
struct Literal {
  std::string pred;
  bool positive = true;

  Formula to_formula(const std::string& var = "x") const;
  friend bool operator==(const Literal&, const Literal&) = default;
  friend auto operator<=>(const Literal&, const Literal&) = default;
};

// A pure conjunction or disjunction of literals over one variable. A single
// literal is reported as a conjunction.
struct LiteralChain {
  enum class Op { And, Or };
  Op op = Op::And;
  std::vector<Literal> literals;

  Formula to_formula(const std::string& var = "x") const;
};

// Recognizes `f` as a literal chain over variable `var`.
bool as_literal(const Formula& f, const std::string& var, Literal& out);
bool as_chain(const Formula& f, const std::string& var, LiteralChain& out);

}  // namespace pqa
