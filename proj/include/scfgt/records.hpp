#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "scfgt/errors.hpp"

namespace scfgt {

/// One placeholder bound to a knowledge-base item and its per-language
/// labels, e.g. M0 -> Q829979 with en "Friedemann Bach".
struct EntityBinding {
  std::string placeholder;
  std::string qid;
  std::map<std::string, std::string> labels;
};

/// One dataset record. The original document is kept as parsed so that
/// unknown fields and field order survive a read/write cycle; the named
/// members mirror the fields the tools work with. Translations are keyed by
/// language tag and hold (pattern, bracketed question) pairs taken from the
/// _<lang>-suffixed fields.
struct QuestionRecord {
  nlohmann::ordered_json raw;
  std::string id;
  std::string questionPatternModEntities;
  std::string questionWithBrackets;
  std::string sparqlPatternModEntities;
  std::string sparql;
  std::optional<std::int64_t> complexity;
  std::map<std::string, std::pair<std::string, std::string>> translations;
  std::vector<EntityBinding> bindings;
  bool bindingsExplicit = false;
};

std::vector<QuestionRecord> parse_records(std::istream& in, const std::string& what);
std::vector<QuestionRecord> read_records(const std::string& path);

/// Serializes one record per line, folding translations back into the
/// _<lang> fields. Records read and rewritten unchanged are byte-identical.
void write_records(const std::vector<QuestionRecord>& records, std::ostream& out);
void write_records(const std::vector<QuestionRecord>& records, const std::string& path);

/// Replaces each bracketed surface form with its placeholder. Every binding
/// label must occur exactly once; spans must not nest.
std::string extract_pattern(std::string_view questionWithBrackets,
                            const std::vector<EntityBinding>& bindings);

/// Replaces standalone placeholders with bracketed labels for the given
/// language. A placeholder without a binding is an error; a binding without
/// a label in that language falls back to the bare item id and records a
/// warning. Inputs without placeholders come back untouched.
std::string reinsert_entities(std::string_view pattern,
                              const std::vector<EntityBinding>& bindings,
                              const std::string& lang,
                              std::vector<std::string>* warnings = nullptr);

/// Fills bindings by aligning the pattern fields with their concrete
/// counterparts: qids from the query pair, labels from the question pairs.
void derive_bindings(QuestionRecord& record);

}  // namespace scfgt
