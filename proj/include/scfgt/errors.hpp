#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace scfgt {

/// Grammar file problems: syntax errors, failed validation, bad macro expansion.
struct GrammarError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent data: records, queries, predictions, manifests.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Filesystem or stream failure.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Input sentence rejected by the grammar. Carries the longest recognized
/// prefix length and the token the recognizer stopped at.
struct NoParseError : DataError {
  NoParseError(const std::string& msg, std::size_t prefix, std::string token)
      : DataError(msg), prefixLen(prefix), failToken(std::move(token)) {}
  std::size_t prefixLen = 0;
  std::string failToken;
};

/// A preterminal tag has no lexicon entry for the source span it covers.
struct LexiconGapError : DataError {
  LexiconGapError(const std::string& msg, std::string tag, std::string source)
      : DataError(msg), tag(std::move(tag)), source(std::move(source)) {}
  std::string tag;
  std::string source;
};

}  // namespace scfgt
