#include "pqa/premise_gen.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <stdexcept>

#include "pqa/errors.hpp"
#include "pqa/fol.hpp"

namespace pqa {

std::string_view to_string(InferenceRule r) {
  switch (r) {
    case InferenceRule::ModusPonens: return "modus-ponens";
    case InferenceRule::HypotheticalSyllogism: return "hypothetical-syllogism";
    case InferenceRule::DeMorgan: return "de-morgan";
    case InferenceRule::Existential: return "existential";
  }
  return "?";
}

Formula PremiseShape::to_formula() const {
  switch (kind) {
    case Kind::Rule: return Formula::forall("x", Formula::implies(lhs.to_formula(), rhs.to_formula()));
    case Kind::Universal: return Formula::forall("x", lhs.to_formula());
    case Kind::Existential: return Formula::exists("x", lhs.to_formula());
  }
  return lhs.to_formula();
}

std::optional<PremiseShape> premise_shape(const Formula& f) {
  if (!f.is_quantifier()) return std::nullopt;
  const std::string& var = f.symbol();
  const Formula body = f.body();
  PremiseShape s;
  if (f.kind() == Formula::Kind::ForAll && body.kind() == Formula::Kind::Implies) {
    if (!as_chain(body.lhs(), var, s.lhs) || !as_chain(body.rhs(), var, s.rhs)) return std::nullopt;
    s.kind = PremiseShape::Kind::Rule;
    return s;
  }
  if (!as_chain(body, var, s.lhs)) return std::nullopt;
  s.kind = f.kind() == Formula::Kind::ForAll ? PremiseShape::Kind::Universal : PremiseShape::Kind::Existential;
  return s;
}

std::vector<Formula> PremisePool::chainable() const {
  std::vector<Formula> out;
  for (const auto& o : original) out.push_back(o.formula);
  for (const auto& d : derived) out.push_back(d.formula);
  return out;
}

std::vector<Formula> PremisePool::all() const {
  auto out = chainable();
  out.insert(out.end(), unrelated.begin(), unrelated.end());
  return out;
}

int PremisePool::depth(std::size_t chainable_index) const {
  if (chainable_index < original.size()) return 1;
  return derived.at(chainable_index - original.size()).depth;
}

namespace {

using Op = LiteralChain::Op;

constexpr std::size_t kMaxChain = 4;
constexpr int kSlotRetries = 100;
constexpr int kPoolAttempts = 32;

Literal negated(Literal l) { return {l.pred, !l.positive}; }

bool single(const LiteralChain& c) { return c.literals.size() == 1; }
bool conjunctive(const LiteralChain& c) { return c.op == Op::And || single(c); }
bool contains(const LiteralChain& c, const Literal& l) {
  return std::find(c.literals.begin(), c.literals.end(), l) != c.literals.end();
}

LiteralChain chain(Op op, std::vector<Literal> lits) {
  LiteralChain c;
  c.op = op;
  for (const auto& l : lits) {
    if (std::find(c.literals.begin(), c.literals.end(), l) == c.literals.end()) c.literals.push_back(l);
  }
  if (c.literals.size() == 1) c.op = Op::And;
  return c;
}

// The negation of a chain, pushed through by De Morgan.
LiteralChain negate_chain(const LiteralChain& c) {
  std::vector<Literal> lits;
  for (const auto& l : c.literals) lits.push_back(negated(l));
  return chain(conjunctive(c) && !single(c) ? Op::Or : Op::And, lits);
}

bool has_complement(const std::vector<Literal>& lits) {
  for (const auto& l : lits) {
    if (std::find(lits.begin(), lits.end(), negated(l)) != lits.end()) return true;
  }
  return false;
}

// Syntactic entailment between chains: every model of m satisfies n.
bool chain_entails(const LiteralChain& m, const LiteralChain& n) {
  if (conjunctive(m)) {
    if (conjunctive(n)) {
      return std::all_of(n.literals.begin(), n.literals.end(), [&](const Literal& l) { return contains(m, l); });
    }
    return std::any_of(n.literals.begin(), n.literals.end(), [&](const Literal& l) { return contains(m, l); });
  }
  if (conjunctive(n)) return false;
  return std::all_of(m.literals.begin(), m.literals.end(), [&](const Literal& l) { return contains(n, l); });
}

// Builds a well-formed rule or nothing: literals deduplicated, consequent
// literals already in a conjunctive antecedent dropped, and no
// complementary pairs anywhere.
std::optional<PremiseShape> make_rule(LiteralChain lhs, LiteralChain rhs) {
  lhs = chain(lhs.op, lhs.literals);
  rhs = chain(rhs.op, rhs.literals);
  if (conjunctive(lhs) && conjunctive(rhs)) {
    std::vector<Literal> kept;
    for (const auto& l : rhs.literals)
      if (!contains(lhs, l)) kept.push_back(l);
    rhs = chain(Op::And, kept);
  }
  if (lhs.literals.empty() || rhs.literals.empty()) return std::nullopt;
  if (lhs.literals.size() > kMaxChain || rhs.literals.size() > kMaxChain) return std::nullopt;
  std::vector<Literal> both = lhs.literals;
  both.insert(both.end(), rhs.literals.begin(), rhs.literals.end());
  if (has_complement(both)) return std::nullopt;
  for (const auto& l : lhs.literals)
    if (contains(rhs, l)) return std::nullopt;
  return PremiseShape{PremiseShape::Kind::Rule, lhs, rhs};
}

std::optional<PremiseShape> make_body(PremiseShape::Kind kind, LiteralChain body) {
  body = chain(body.op, body.literals);
  if (body.literals.empty() || body.literals.size() > kMaxChain || has_complement(body.literals)) return std::nullopt;
  return PremiseShape{kind, body, {}};
}

LiteralChain concat(const LiteralChain& a, const LiteralChain& b, Op op) {
  std::vector<Literal> lits = a.literals;
  lits.insert(lits.end(), b.literals.begin(), b.literals.end());
  return chain(op, lits);
}

// Antecedent contribution for conjunction introduction: a disjunctive
// antecedent is strengthened to one of its disjuncts.
LiteralChain conjunct_part(const LiteralChain& c, Rng& rng) {
  if (conjunctive(c)) return c;
  return chain(Op::And, {rng.pick(c.literals)});
}

using Shape = PremiseShape;
using Kind = PremiseShape::Kind;

std::optional<Shape> syllogism(const Shape& x, const Shape& y) {
  if (x.kind != Kind::Rule || y.kind != Kind::Rule) return std::nullopt;
  if (!chain_entails(x.rhs, y.lhs)) return std::nullopt;
  return make_rule(x.lhs, y.rhs);
}

std::optional<Shape> conjunction(const Shape& x, const Shape& y, Rng& rng) {
  if (x.kind == Kind::Rule && y.kind == Kind::Rule) {
    if (!conjunctive(x.rhs) || !conjunctive(y.rhs)) return std::nullopt;
    return make_rule(concat(conjunct_part(x.lhs, rng), conjunct_part(y.lhs, rng), Op::And),
                     concat(x.rhs, y.rhs, Op::And));
  }
  if (x.kind == Kind::Universal && y.kind == Kind::Universal) {
    if (!conjunctive(x.lhs) || !conjunctive(y.lhs)) return std::nullopt;
    return make_body(Kind::Universal, concat(x.lhs, y.lhs, Op::And));
  }
  return std::nullopt;
}

// From A -> B and C -> D: (NOT B OR NOT D) -> (NOT A OR NOT C).
std::optional<Shape> contraposition(const Shape& x, const Shape& y) {
  if (x.kind != Kind::Rule || y.kind != Kind::Rule) return std::nullopt;
  for (const auto* c : {&x.lhs, &x.rhs, &y.lhs, &y.rhs})
    if (!conjunctive(*c)) return std::nullopt;
  return make_rule(concat(negate_chain(x.rhs), negate_chain(y.rhs), Op::Or),
                   concat(negate_chain(x.lhs), negate_chain(y.lhs), Op::Or));
}

// From Exists(L) and ForAll(L' -> R) with L entailing L': Exists(L AND R).
std::optional<Shape> existential(const Shape& x, const Shape& y) {
  if (x.kind != Kind::Existential || y.kind != Kind::Rule) return std::nullopt;
  if (!conjunctive(x.lhs) || !conjunctive(y.rhs) || !chain_entails(x.lhs, y.lhs)) return std::nullopt;
  LiteralChain body = concat(x.lhs, y.rhs, Op::And);
  if (body.literals.size() == x.lhs.literals.size()) return std::nullopt;
  return make_body(Kind::Existential, body);
}

std::optional<Shape> self_contraposition(const Shape& x) {
  if (x.kind != Kind::Rule) return std::nullopt;
  return make_rule(negate_chain(x.rhs), negate_chain(x.lhs));
}

std::optional<Shape> simplification(const Shape& x, Rng& rng) {
  switch (x.kind) {
    case Kind::Rule: {
      const bool can_rhs = conjunctive(x.rhs) && x.rhs.literals.size() > 1;
      const bool can_lhs = !conjunctive(x.lhs);
      if (!can_rhs && !can_lhs) return std::nullopt;
      if (can_rhs && (!can_lhs || rng.chance(0.5))) return make_rule(x.lhs, chain(Op::And, {rng.pick(x.rhs.literals)}));
      return make_rule(chain(Op::And, {rng.pick(x.lhs.literals)}), x.rhs);
    }
    case Kind::Universal:
    case Kind::Existential:
      if (!conjunctive(x.lhs) || x.lhs.literals.size() < 2) return std::nullopt;
      return make_body(x.kind, chain(Op::And, {rng.pick(x.lhs.literals)}));
  }
  return std::nullopt;
}

}  // namespace

std::optional<Formula> derive(const Formula& a, const Formula& b, Rng& rng) {
  const auto sa = premise_shape(a), sb = premise_shape(b);
  if (!sa || !sb) return std::nullopt;
  const std::string ra = render_fol(a), rb = render_fol(b);
  std::vector<std::function<std::optional<Shape>()>> combinators;
  if (ra == rb) {
    combinators = {[&] { return self_contraposition(*sa); }, [&] { return simplification(*sa, rng); }};
  } else {
    combinators = {
        [&] {
          auto r = syllogism(*sa, *sb);
          return r ? r : syllogism(*sb, *sa);
        },
        [&] { return conjunction(*sa, *sb, rng); },
        [&] { return contraposition(*sa, *sb); },
        [&] {
          auto r = existential(*sa, *sb);
          return r ? r : existential(*sb, *sa);
        },
    };
  }
  std::vector<std::size_t> order(combinators.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  rng.shuffle(order);
  for (std::size_t i : order) {
    const auto shape = combinators[i]();
    if (!shape) continue;
    const Formula f = shape->to_formula();
    const std::string text = render_fol(f);
    if (text != ra && text != rb) return f;
  }
  return std::nullopt;
}

namespace {

// Builds a template instance, drawing predicate names through `next`.
// `chain_from`, when set, is an existing consequent literal that the
// hypothetical-syllogism template continues from.
Formula instantiate(InferenceRule rule, Rng& rng, const std::function<std::string()>& next,
                    const std::optional<Literal>& chain_from) {
  auto lit = [&](bool positive) { return Literal{next(), positive}; };
  auto one = [](Literal l) { return chain(Op::And, {l}); };
  switch (rule) {
    case InferenceRule::ModusPonens: {
      if (rng.chance(0.5)) {
        const Literal a = lit(true), b = lit(true);
        return make_rule(one(a), one(b))->to_formula();
      }
      const Literal a = lit(true), b = lit(true);
      return make_rule(chain(Op::And, {a, b}), one(lit(true)))->to_formula();
    }
    case InferenceRule::HypotheticalSyllogism: {
      const Literal from = chain_from ? *chain_from : lit(true);
      return make_rule(one(from), one(lit(rng.chance(0.8))))->to_formula();
    }
    case InferenceRule::DeMorgan: {
      switch (rng.below(3)) {
        case 0: {
          const Literal a = lit(true), b = lit(true);
          return make_rule(chain(Op::Or, {a, b}), one(lit(true)))->to_formula();
        }
        case 1: {
          const Literal a = lit(false);
          return make_rule(one(a), one(lit(false)))->to_formula();
        }
        default: {
          const Literal a = lit(false), b = lit(false);
          return make_rule(chain(Op::Or, {a, b}), one(lit(false)))->to_formula();
        }
      }
    }
    case InferenceRule::Existential: {
      const Literal a = lit(true), b = lit(true);
      return make_body(Kind::Existential, chain(Op::And, {a, b}))->to_formula();
    }
  }
  throw std::logic_error("unknown inference rule");
}

InferenceRule random_rule(Rng& rng) { return static_cast<InferenceRule>(rng.below(4)); }

// Pool-wide state for one generation attempt.
class PoolBuilder {
 public:
  PoolBuilder(int s, int c, int d, std::uint64_t seed, std::uint64_t attempt_seed, SolverBackend& backend,
              Lexicon& lexicon)
      : rng_(attempt_seed), backend_(backend), lexicon_(lexicon) {
    pool_.seed = seed;
    pool_.params = {s, c, d};
    for (const auto& e : lexicon.entries()) vocabulary_.push_back(e.predicate);
    rng_.shuffle(vocabulary_);
  }

  PremisePool build() {
    const auto& p = pool_.params;
    for (int i = 0; i < p.s; ++i) fill_slot("original", [&] { return try_original(); });
    for (int i = 0; i < p.d; ++i) fill_slot("derived", [&] { return try_derived(); });
    for (int i = 0; i < p.s - p.c; ++i) fill_slot("unrelated", [&] { return try_unrelated(); });
    return pool_;
  }

 private:
  void fill_slot(const char* what, const std::function<bool()>& attempt) {
    for (int i = 0; i < kSlotRetries; ++i) {
      if (attempt()) return;
    }
    throw GenerationExhausted(std::string("no valid ") + what + " premise after " + std::to_string(kSlotRetries) +
                              " draws");
  }

  // First name, in this attempt's vocabulary order, that the pool has not
  // used and the current draw has not taken.
  std::string fresh_name(const std::set<std::string>& taken) {
    for (const auto& name : vocabulary_) {
      if (!used_.count(name) && !taken.count(name)) return name;
    }
    for (int k = 1;; ++k) {
      const std::string name = "P" + std::to_string(k);
      if (used_.count(name) || taken.count(name)) continue;
      if (!lexicon_.contains(name)) lexicon_.add_synthetic(name);
      return name;
    }
  }

  bool accept(const Formula& f) {
    const std::string text = render_fol(f);
    if (seen_.count(text)) return false;
    auto all = pool_.all();
    all.push_back(f);
    if (!is_satisfiable(std::span<const Formula>(&f, 1), backend_)) return false;
    if (!is_satisfiable(all, backend_)) return false;
    seen_.insert(text);
    for (const auto& name : predicates(f)) used_.insert(name);
    return true;
  }

  bool try_original() {
    const InferenceRule rule = random_rule(rng_);
    std::set<std::string> taken;
    std::optional<Literal> chain_from;
    if (rule == InferenceRule::HypotheticalSyllogism && !consequents_.empty()) chain_from = rng_.pick(consequents_);
    if (chain_from) taken.insert(chain_from->pred);
    auto next = [&]() -> std::string {
      std::vector<std::string> reusable;
      for (const auto& name : chain_preds_)
        if (!taken.count(name)) reusable.push_back(name);
      const std::string name = !reusable.empty() && rng_.chance(0.35) ? rng_.pick(reusable) : fresh_name(taken);
      taken.insert(name);
      return name;
    };
    const Formula f = instantiate(rule, rng_, next, chain_from);
    if (!accept(f)) return false;
    pool_.original.push_back({f, rule});
    note_chainable(f);
    return true;
  }

  bool try_derived() {
    const auto chainable = pool_.chainable();
    const auto i = rng_.below(chainable.size()), j = rng_.below(chainable.size());
    const auto g = derive(chainable[i], chainable[j], rng_);
    if (!g) return false;
    const std::vector<Formula> parents = i == j ? std::vector<Formula>{chainable[i]}
                                                : std::vector<Formula>{chainable[i], chainable[j]};
    if (entails(parents, *g, backend_) != EntailmentStatus::Yes) {
      throw std::logic_error("derived premise is not entailed by its parents: " + render_fol(*g));
    }
    if (!accept(*g)) return false;
    const std::vector<int> parent_idx =
        i == j ? std::vector<int>{static_cast<int>(i)}
               : std::vector<int>{static_cast<int>(std::min(i, j)), static_cast<int>(std::max(i, j))};
    pool_.derived.push_back({*g, parent_idx, 1 + std::max(pool_.depth(i), pool_.depth(j))});
    note_chainable(*g);
    return true;
  }

  bool try_unrelated() {
    const InferenceRule rule = random_rule(rng_);
    std::set<std::string> taken;
    auto next = [&] {
      const std::string name = fresh_name(taken);
      taken.insert(name);
      return name;
    };
    const Formula f = instantiate(rule, rng_, next, std::nullopt);
    if (!accept(f)) return false;
    pool_.unrelated.push_back(f);
    return true;
  }

  void note_chainable(const Formula& f) {
    for (const auto& name : predicates(f)) chain_preds_.insert(name);
    const auto shape = premise_shape(f);
    if (shape && shape->kind == Kind::Rule && conjunctive(shape->rhs)) {
      for (const auto& l : shape->rhs.literals)
        if (std::find(consequents_.begin(), consequents_.end(), l) == consequents_.end()) consequents_.push_back(l);
    }
  }

  Rng rng_;
  SolverBackend& backend_;
  Lexicon& lexicon_;
  PremisePool pool_;
  std::vector<std::string> vocabulary_;
  std::set<std::string> used_;
  std::set<std::string> chain_preds_;
  std::vector<Literal> consequents_;
  std::set<std::string> seen_;
};

}  // namespace

Formula generate_original(Rng& rng, const std::vector<std::string>& predicates, InferenceRule rule) {
  if (predicates.size() < 3) throw InvalidParams("generate_original needs at least three predicate names");
  std::size_t next_name = 0;
  auto next = [&] { return predicates[next_name++]; };
  return instantiate(rule, rng, next, std::nullopt);
}

Formula generate_original(Rng& rng, const std::vector<std::string>& predicates) {
  return generate_original(rng, predicates, random_rule(rng));
}

PremisePool generate_premises(int s, int c, int d, std::uint64_t seed, SolverBackend& backend, Lexicon& lexicon) {
  if (s < 1) throw InvalidParams("s must be at least 1");
  if (c < 0 || c > s) throw InvalidParams("c must lie in [0, s]");
  if (d < 0) throw InvalidParams("d must be non-negative");
  std::string last_error;
  for (int attempt = 0; attempt < kPoolAttempts; ++attempt) {
    Lexicon scratch = lexicon;
    try {
      PoolBuilder builder(s, c, d, seed, derive_seed(seed, 0x706f6f6cu, attempt), backend, scratch);
      PremisePool pool = builder.build();
      lexicon = std::move(scratch);
      return pool;
    } catch (const GenerationExhausted& e) {
      last_error = e.what();
    }
  }
  throw GenerationExhausted("premise pool (s=" + std::to_string(s) + ", c=" + std::to_string(c) +
                            ", d=" + std::to_string(d) + "): " + last_error);
}

PremisePool generate_premises(int s, int c, int d, std::uint64_t seed) {
  InternalBackend backend;
  Lexicon lexicon = Lexicon::academic_policy();
  return generate_premises(s, c, d, seed, backend, lexicon);
}

}  // namespace pqa
