#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "scfgt/grammar.hpp"
#include "scfgt/labels.hpp"
#include "scfgt/records.hpp"

namespace scfgt {

struct TranslateOptions {
  std::string lang;             // defaults to the grammar's target language
  std::uint64_t seed = 0;
  int workers = 1;
  bool skipUnparsed = false;    // count and log instead of failing
  const LabelCache* labels = nullptr;
};

struct RunSummary {
  std::size_t records = 0;
  std::size_t translated = 0;
  std::size_t ambiguous = 0;       // more than one derivation
  std::size_t lexiconGaps = 0;
  std::size_t unparsed = 0;
  std::vector<std::string> skippedIds;
  std::vector<std::string> warnings;
};

/// Translates every record's question pattern and fills the _<lang> fields:
/// the pattern itself and, via the entity bindings, the bracketed question.
/// Output is a pure function of (grammar, records, lang, seed); the worker
/// count never changes a byte. Parse failures and lexicon gaps abort unless
/// skipUnparsed is set, in which case the record is left untranslated.
RunSummary translate_records(const GrammarSpec& spec, std::vector<QuestionRecord>& records,
                             const TranslateOptions& options);

}  // namespace scfgt
