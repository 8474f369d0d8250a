#include "pqa/fol.hpp"

#include <cctype>
#include <map>
#include <optional>
#include <vector>

#include "pqa/errors.hpp"

namespace pqa {

SyntaxError::SyntaxError(std::size_t offset, std::vector<std::string> expected, const std::string& detail)
    : Error([&] {
        std::string msg = "syntax error at offset " + std::to_string(offset) + ": " + detail;
        if (!expected.empty()) {
          msg += " (expected ";
          for (std::size_t i = 0; i < expected.size(); ++i) msg += (i ? ", " : "") + expected[i];
          msg += ")";
        }
        return msg;
      }()),
      offset(offset),
      expected(std::move(expected)) {}

ArityError::ArityError(std::size_t offset, const std::string& predicate, std::size_t arity)
    : Error("predicate '" + predicate + "' at offset " + std::to_string(offset) + " applied to " +
            std::to_string(arity) + " arguments; only unary predicates are supported"),
      offset(offset),
      predicate(predicate),
      arity(arity) {}

namespace {

enum class Tok { Ident, LParen, RParen, Comma, Arrow, Not, And, Or, ForAll, Exists, End };

struct Token {
  Tok kind;
  std::string text;
  std::size_t offset;  // one-based
};

const char* describe(Tok t) {
  switch (t) {
    case Tok::Ident: return "identifier";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::Comma: return "','";
    case Tok::Arrow: return "'->'";
    case Tok::Not: return "NOT";
    case Tok::And: return "AND";
    case Tok::Or: return "OR";
    case Tok::ForAll: return "ForAll";
    case Tok::Exists: return "Exists";
    case Tok::End: return "end of input";
  }
  return "?";
}

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  int depth = 0;
  std::vector<std::size_t> open;
  while (true) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    if (i >= s.size()) break;
    const std::size_t at = i + 1;
    const char c = s[i];
    if (c == '(') {
      out.push_back({Tok::LParen, "(", at});
      open.push_back(at);
      ++depth;
      ++i;
    } else if (c == ')') {
      if (depth == 0) throw SyntaxError(at, {describe(Tok::End)}, "unbalanced ')'");
      out.push_back({Tok::RParen, ")", at});
      open.pop_back();
      --depth;
      ++i;
    } else if (c == ',') {
      out.push_back({Tok::Comma, ",", at});
      ++i;
    } else if (c == '-' && i + 1 < s.size() && s[i + 1] == '>') {
      out.push_back({Tok::Arrow, "->", at});
      i += 2;
    } else if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
      std::string word(s.substr(i, j - i));
      Tok kind = Tok::Ident;
      if (word == "NOT") kind = Tok::Not;
      else if (word == "AND") kind = Tok::And;
      else if (word == "OR") kind = Tok::Or;
      else if (word == "ForAll") kind = Tok::ForAll;
      else if (word == "Exists") kind = Tok::Exists;
      out.push_back({kind, std::move(word), at});
      i = j;
    } else {
      throw SyntaxError(at, {}, std::string("unexpected character '") + c + "'");
    }
  }
  out.push_back({Tok::End, "", s.size() + 1});
  if (depth != 0) {
    // Report at end of input; the diagnostic names the unmatched '('.
    throw SyntaxError(s.size() + 1, {describe(Tok::RParen)},
                      "unbalanced '(' opened at offset " + std::to_string(open.back()));
  }
  return out;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  Formula parse_all() {
    Formula f = formula();
    if (peek().kind != Tok::End) fail({Tok::Arrow, Tok::Or, Tok::And, Tok::End});
    return f;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& advance() { return toks_[pos_++]; }

  [[noreturn]] void fail(std::initializer_list<Tok> expected) const {
    std::vector<std::string> names;
    for (Tok t : expected) names.emplace_back(describe(t));
    const Token& t = peek();
    throw SyntaxError(t.offset, std::move(names),
                      t.kind == Tok::End ? "unexpected end of input" : "unexpected token '" + t.text + "'");
  }

  const Token& expect(Tok kind) {
    if (peek().kind != kind) fail({kind});
    return advance();
  }

  Formula formula() {
    Formula lhs = disjunction();
    if (peek().kind == Tok::Arrow) {
      advance();
      return Formula::implies(lhs, formula());
    }
    return lhs;
  }

  Formula disjunction() {
    Formula acc = conjunction();
    while (peek().kind == Tok::Or) {
      advance();
      acc = Formula::disj(acc, conjunction());
    }
    return acc;
  }

  Formula conjunction() {
    Formula acc = unary();
    while (peek().kind == Tok::And) {
      advance();
      acc = Formula::conj(acc, unary());
    }
    return acc;
  }

  Formula unary() {
    if (peek().kind == Tok::Not) {
      advance();
      return Formula::negate(unary());
    }
    return primary();
  }

  Formula primary() {
    switch (peek().kind) {
      case Tok::ForAll:
      case Tok::Exists: {
        const bool universal = advance().kind == Tok::ForAll;
        expect(Tok::LParen);
        const std::string var = expect(Tok::Ident).text;
        expect(Tok::Comma);
        ++bound_[var];
        Formula body = formula();
        if (--bound_[var] == 0) bound_.erase(var);
        expect(Tok::RParen);
        return universal ? Formula::forall(var, body) : Formula::exists(var, body);
      }
      case Tok::Ident: {
        const Token name = advance();
        expect(Tok::LParen);
        if (peek().kind == Tok::RParen) throw ArityError(name.offset, name.text, 0);
        const std::string arg = expect(Tok::Ident).text;
        std::size_t arity = 1;
        while (peek().kind == Tok::Comma) {
          advance();
          expect(Tok::Ident);
          ++arity;
        }
        if (arity != 1) throw ArityError(name.offset, name.text, arity);
        expect(Tok::RParen);
        return Formula::pred(name.text, bound_.count(arg) ? Term::var(arg) : Term::constant(arg));
      }
      case Tok::LParen: {
        advance();
        Formula inner = formula();
        expect(Tok::RParen);
        return inner;
      }
      default:
        fail({Tok::ForAll, Tok::Exists, Tok::Not, Tok::Ident, Tok::LParen});
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::map<std::string, int> bound_;
};

const char* connective(Formula::Kind k) {
  switch (k) {
    case Formula::Kind::And: return " AND ";
    case Formula::Kind::Or: return " OR ";
    default: return " -> ";
  }
}

void print(const Formula& f, std::string& out) {
  switch (f.kind()) {
    case Formula::Kind::Pred:
      out += f.symbol();
      out += '(';
      out += f.term().name;
      out += ')';
      return;
    case Formula::Kind::Not: {
      out += "NOT ";
      const Formula g = f.operand();
      if (g.is_binary()) {
        out += '(';
        print(g, out);
        out += ')';
      } else {
        print(g, out);
      }
      return;
    }
    case Formula::Kind::ForAll:
    case Formula::Kind::Exists:
      out += f.kind() == Formula::Kind::ForAll ? "ForAll(" : "Exists(";
      out += f.symbol();
      out += ", ";
      print(f.body(), out);
      out += ')';
      return;
    default: {
      auto side = [&](const Formula& g) {
        if (g.is_binary()) {
          out += '(';
          print(g, out);
          out += ')';
        } else {
          print(g, out);
        }
      };
      side(f.lhs());
      out += connective(f.kind());
      side(f.rhs());
    }
  }
}

std::string binder_name(int depth) {
  static const char* base[] = {"x", "y", "z", "u", "v", "w"};
  if (depth < 6) return base[depth];
  return "x" + std::to_string(depth);
}

Formula rename(const Formula& f, int depth, std::map<std::string, std::string>& scope,
               const std::set<std::string>& reserved) {
  switch (f.kind()) {
    case Formula::Kind::Pred: {
      if (!f.term().is_var()) return f;
      auto it = scope.find(f.term().name);
      if (it == scope.end()) return f;
      return Formula::pred(f.symbol(), Term::var(it->second));
    }
    case Formula::Kind::Not:
      return Formula::negate(rename(f.operand(), depth, scope, reserved));
    case Formula::Kind::ForAll:
    case Formula::Kind::Exists: {
      std::string fresh;
      int d = depth;
      do fresh = binder_name(d++);
      while (reserved.count(fresh));
      auto saved = scope.find(f.symbol()) == scope.end() ? std::optional<std::string>() : scope[f.symbol()];
      scope[f.symbol()] = fresh;
      Formula body = rename(f.body(), d, scope, reserved);
      if (saved) scope[f.symbol()] = *saved;
      else scope.erase(f.symbol());
      return f.kind() == Formula::Kind::ForAll ? Formula::forall(fresh, body) : Formula::exists(fresh, body);
    }
    case Formula::Kind::And:
      return Formula::conj(rename(f.lhs(), depth, scope, reserved), rename(f.rhs(), depth, scope, reserved));
    case Formula::Kind::Or:
      return Formula::disj(rename(f.lhs(), depth, scope, reserved), rename(f.rhs(), depth, scope, reserved));
    case Formula::Kind::Implies:
      return Formula::implies(rename(f.lhs(), depth, scope, reserved), rename(f.rhs(), depth, scope, reserved));
  }
  return f;
}

Formula nnf(const Formula& f, bool negated) {
  switch (f.kind()) {
    case Formula::Kind::Pred:
      return negated ? Formula::negate(f) : f;
    case Formula::Kind::Not:
      return nnf(f.operand(), !negated);
    case Formula::Kind::And:
      return negated ? Formula::disj(nnf(f.lhs(), true), nnf(f.rhs(), true))
                     : Formula::conj(nnf(f.lhs(), false), nnf(f.rhs(), false));
    case Formula::Kind::Or:
      return negated ? Formula::conj(nnf(f.lhs(), true), nnf(f.rhs(), true))
                     : Formula::disj(nnf(f.lhs(), false), nnf(f.rhs(), false));
    case Formula::Kind::Implies:
      return negated ? Formula::conj(nnf(f.lhs(), false), nnf(f.rhs(), true))
                     : Formula::disj(nnf(f.lhs(), true), nnf(f.rhs(), false));
    case Formula::Kind::ForAll:
      return negated ? Formula::exists(f.symbol(), nnf(f.body(), true))
                     : Formula::forall(f.symbol(), nnf(f.body(), false));
    case Formula::Kind::Exists:
      return negated ? Formula::forall(f.symbol(), nnf(f.body(), true))
                     : Formula::exists(f.symbol(), nnf(f.body(), false));
  }
  return f;
}

}  // namespace

Formula parse_formula(std::string_view text) { return Parser(tokenize(text)).parse_all(); }

Formula canonicalize_bound_vars(const Formula& f) {
  std::map<std::string, std::string> scope;
  std::set<std::string> reserved = constants(f);
  reserved.merge(free_variables(f));
  return rename(f, 0, scope, reserved);
}

std::string render_fol(const Formula& f) {
  std::string out;
  print(canonicalize_bound_vars(f), out);
  return out;
}

Formula to_nnf(const Formula& f) { return nnf(f, false); }

}  // namespace pqa
