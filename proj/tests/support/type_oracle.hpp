#pragma once

// Brute-force entailment oracle for small monadic signatures.
//
// Without equality, every structure is elementarily equivalent to the one
// whose elements are its realized predicate types. Enumerating every
// nonempty set of types (and every placement of the constants on realized
// types) therefore enumerates all models up to equivalence. Evaluation is a
// direct recursive interpretation over those elements; nothing here shares
// code with the engine.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pqa/formula.hpp"

namespace pqa::testing {

enum class OracleVerdict { Yes, No, Uncertain, Inconsistent };

class TypeSetOracle {
 public:
  TypeSetOracle(const std::vector<Formula>& premises, const Formula& goal) {
    std::vector<Formula> all = premises;
    all.push_back(goal);
    int next = 0;
    for (const auto& p : predicates(all)) pred_bit_[p] = next++;
    p_ = next;
    int c = 0;
    for (const auto& k : constants(all)) const_slot_[k] = c++;
    k_ = c;
    for (const auto& f : premises) premises_.push_back(compile(f, {}));
    goal_ = compile(goal, {});
  }

  OracleVerdict verdict() {
    const int types = 1 << p_;
    bool any_model = false, goal_true = false, goal_false = false;
    std::vector<int> elements;
    std::vector<int> placement(k_);
    for (std::uint32_t set = 1; set < (1u << types); ++set) {
      elements.clear();
      for (int t = 0; t < types; ++t) {
        if (set >> t & 1u) elements.push_back(t);
      }
      // Constants range over the realized types.
      std::uint64_t combos = 1;
      for (int i = 0; i < k_; ++i) combos *= elements.size();
      for (std::uint64_t c = 0; c < combos; ++c) {
        std::uint64_t rest = c;
        for (int i = 0; i < k_; ++i) {
          placement[i] = elements[rest % elements.size()];
          rest /= elements.size();
        }
        bool ok = true;
        for (const auto& prem : premises_) {
          if (!eval(prem, elements, placement)) {
            ok = false;
            break;
          }
        }
        if (!ok) continue;
        any_model = true;
        (eval(goal_, elements, placement) ? goal_true : goal_false) = true;
        if (goal_true && goal_false) return OracleVerdict::Uncertain;
      }
    }
    if (!any_model) return OracleVerdict::Inconsistent;
    return goal_true ? OracleVerdict::Yes : OracleVerdict::No;
  }

 private:
  enum class Op { Atom, Not, And, Or, Implies, ForAll, Exists };
  struct Node {
    Op op;
    int bit = 0;       // Atom: predicate bit
    int slot = -1;     // Atom: bound-variable slot (de Bruijn level) or -1
    int constant = -1; // Atom: constant slot
    int a = -1, b = -1;
  };
  struct Compiled {
    std::vector<Node> nodes;
    int root = -1;
  };

  Compiled compile(const Formula& f, std::vector<std::string> scope) {
    Compiled c;
    c.root = build(f, scope, c.nodes);
    return c;
  }

  int build(const Formula& f, std::vector<std::string>& scope, std::vector<Node>& nodes) {
    Node n{};
    switch (f.kind()) {
      case Formula::Kind::Pred: {
        n.op = Op::Atom;
        n.bit = pred_bit_.at(f.symbol());
        if (f.term().is_var()) {
          for (int i = static_cast<int>(scope.size()) - 1; i >= 0; --i) {
            if (scope[i] == f.term().name) {
              n.slot = i;
              break;
            }
          }
        } else {
          n.constant = const_slot_.at(f.term().name);
        }
        break;
      }
      case Formula::Kind::Not:
        n.op = Op::Not;
        n.a = build(f.operand(), scope, nodes);
        break;
      case Formula::Kind::ForAll:
      case Formula::Kind::Exists:
        n.op = f.kind() == Formula::Kind::ForAll ? Op::ForAll : Op::Exists;
        n.slot = static_cast<int>(scope.size());
        scope.push_back(f.symbol());
        n.a = build(f.body(), scope, nodes);
        scope.pop_back();
        break;
      default:
        n.op = f.kind() == Formula::Kind::And ? Op::And : f.kind() == Formula::Kind::Or ? Op::Or : Op::Implies;
        n.a = build(f.lhs(), scope, nodes);
        n.b = build(f.rhs(), scope, nodes);
    }
    nodes.push_back(n);
    return static_cast<int>(nodes.size()) - 1;
  }

  bool eval(const Compiled& c, const std::vector<int>& elements, const std::vector<int>& placement) {
    return eval_node(c, c.root, elements, placement);
  }

  bool eval_node(const Compiled& c, int i, const std::vector<int>& elements, const std::vector<int>& placement) {
    const Node& n = c.nodes[i];
    switch (n.op) {
      case Op::Atom: {
        const int type = n.constant >= 0 ? placement[n.constant] : env_[n.slot];
        return type >> n.bit & 1;
      }
      case Op::Not:
        return !eval_node(c, n.a, elements, placement);
      case Op::And:
        return eval_node(c, n.a, elements, placement) && eval_node(c, n.b, elements, placement);
      case Op::Or:
        return eval_node(c, n.a, elements, placement) || eval_node(c, n.b, elements, placement);
      case Op::Implies:
        return !eval_node(c, n.a, elements, placement) || eval_node(c, n.b, elements, placement);
      case Op::ForAll:
        for (int e : elements) {
          env_[n.slot] = e;
          if (!eval_node(c, n.a, elements, placement)) return false;
        }
        return true;
      case Op::Exists:
        for (int e : elements) {
          env_[n.slot] = e;
          if (eval_node(c, n.a, elements, placement)) return true;
        }
        return false;
    }
    return false;
  }

  std::map<std::string, int> pred_bit_;
  std::map<std::string, int> const_slot_;
  int p_ = 0;
  int k_ = 0;
  std::vector<Compiled> premises_;
  Compiled goal_;
  std::vector<int> env_ = std::vector<int>(8, 0);
};

}  // namespace pqa::testing
