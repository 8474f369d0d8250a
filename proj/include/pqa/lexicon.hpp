#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pqa/formula.hpp"

namespace pqa {

// Verb phrases for one predicate, both written for a singular subject:
// "attends all lectures" / "does not attend all lectures".
struct LexiconEntry {
  std::string predicate;
  std::string affirmative;
  std::string negative;
};

class Lexicon {
 public:
  Lexicon() = default;
  // Validates entries: unique predicate names and phrases, and no phrase
  // containing the template words "and", "or", "also" or "who".
  explicit Lexicon(std::vector<LexiconEntry> entries);

  static Lexicon academic_policy();
  static Lexicon from_json(std::string_view json_text);
  std::string to_json() const;

  bool contains(const std::string& predicate) const { return index_.count(predicate) > 0; }
  const LexiconEntry& at(const std::string& predicate) const;
  const std::vector<LexiconEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

  // Registers a synthesized predicate (P1, P2, ...) with generic phrases.
  // Returns the stored entry.
  const LexiconEntry& add_synthetic(const std::string& predicate);

  // Reverse lookup of a phrase to a literal.
  std::optional<Literal> literal_for(const std::string& phrase) const;

 private:
  void insert(LexiconEntry e);

  std::vector<LexiconEntry> entries_;
  std::map<std::string, std::size_t> index_;
  std::map<std::string, Literal> phrases_;
};

// Natural-language rendering. Template shapes (x is the only variable):
//   ForAll(x, L -> R)   "Every student who <L> also <R>."
//   ForAll(x, L)        "Every student <L>."
//   Exists(x, L)        "There exists a student who <L>."
// where L and R are literal chains joined by "and" or "or", and a negated
// literal uses the entry's negative phrase. Other shapes get a generic
// compositional rendering that parse_nl does not invert.
std::string render_nl(const Formula& f, const Lexicon& lexicon);

// Inverse of render_nl on the template shapes; throws NlParseError.
Formula parse_nl(std::string_view sentence, const Lexicon& lexicon);

// True when render_nl uses one of the invertible templates for `f`.
bool has_nl_template(const Formula& f);

// Lowercases the first letter and drops a trailing period, for embedding a
// rendered sentence inside another sentence.
std::string as_clause(std::string sentence);

}  // namespace pqa
