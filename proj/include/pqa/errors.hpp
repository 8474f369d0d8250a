#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace pqa {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Offsets are one-based byte positions into the parsed text.
struct SyntaxError : Error {
  SyntaxError(std::size_t offset, std::vector<std::string> expected, const std::string& detail);
  std::size_t offset;
  std::vector<std::string> expected;
};

struct ArityError : Error {
  ArityError(std::size_t offset, const std::string& predicate, std::size_t arity);
  std::size_t offset;
  std::string predicate;
  std::size_t arity;
};

struct MissingLexiconEntry : Error {
  explicit MissingLexiconEntry(const std::string& predicate)
      : Error("no lexicon entry for predicate '" + predicate + "'"), predicate(predicate) {}
  std::string predicate;
};

struct NlParseError : Error {
  using Error::Error;
};

struct CapacityExceeded : Error {
  using Error::Error;
};

struct BackendFailure : Error {
  using Error::Error;
};

struct InconsistentPremises : Error {
  InconsistentPremises() : Error("premises are jointly unsatisfiable") {}
};

struct NoSupport : Error {
  using Error::Error;
};

struct InvalidParams : Error {
  using Error::Error;
};

struct GenerationExhausted : Error {
  using Error::Error;
};

struct RecordRejected : Error {
  explicit RecordRejected(const std::string& reason) : Error("record rejected: " + reason), reason(reason) {}
  std::string reason;
};

struct NegativeBonus : Error {
  using Error::Error;
};

struct RubricOutOfRange : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

}  // namespace pqa
