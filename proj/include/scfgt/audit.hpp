#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "scfgt/records.hpp"

namespace scfgt {

/// Distinct-count summary of a corpus. All counting runs over normalized
/// strings (NFC, trimmed, whitespace collapsed). For each language the
/// paired count treats (question pattern, query pattern) as the unit; its
/// difference against the plain pattern count is the number of question
/// patterns that map to more than one query pattern, so zero means the
/// translation kept the pattern-to-query mapping a function.
struct StatsReport {
  std::size_t records = 0;
  std::size_t uniqueQuestions = 0;
  std::size_t uniqueQueries = 0;
  std::size_t queryPatterns = 0;
  struct LangRow {
    std::string lang;             // "en" for the base fields
    std::size_t questionPatterns = 0;
    std::size_t pairedPatterns = 0;
    std::int64_t delta = 0;
  };
  std::vector<LangRow> perLang;

  nlohmann::ordered_json to_json() const;
  std::string to_table() const;
};

StatsReport compute_stats(const std::vector<QuestionRecord>& records,
                          const std::vector<std::string>& langs);

/// Train/dev/test id lists for one split, read from <dir>/<name>.train,
/// .dev (optional) and .test. Ids must be pairwise disjoint and resolve to
/// records.
struct SplitManifest {
  std::string name;
  std::vector<std::string> train, dev, test;

  static SplitManifest load(const std::string& dir, const std::string& name);
};

/// Question patterns (in one language) occurring in both train and test.
/// An overlap is harmless when both sides pair the pattern with exactly the
/// same set of query patterns, and conflicting otherwise.
struct OverlapReport {
  std::string split;
  std::string lang;
  struct Entry {
    std::string pattern;
    bool consistent = false;
    std::vector<std::string> trainQueryPatterns, testQueryPatterns;
  };
  std::vector<Entry> entries;
  std::size_t consistent = 0;
  std::size_t conflicting = 0;

  nlohmann::ordered_json to_json() const;
  std::string to_table() const;
};

OverlapReport train_test_overlap(const std::vector<QuestionRecord>& records,
                                 const SplitManifest& split, const std::string& lang);

struct Prediction {
  std::string id;
  std::string lang;
  std::string text;
};

/// Reads "id<TAB>lang<TAB>prediction" rows.
std::vector<Prediction> read_predictions(const std::string& path);

/// For each watched item, the share of wrong predictions per language that
/// assert it as the object of some triple. Predictions that parse neither
/// as the intermediate representation nor as a query count in a malformed
/// bucket, never silently dropped; "others" covers wrong predictions whose
/// asserted items are all off the watchlist.
struct HallucinationReport {
  struct Watched {
    std::string qid;
    std::string note;  // e.g. a country code
  };
  std::vector<Watched> watchlist;
  std::vector<std::string> langs;
  // counts[qid or "others" or "malformed"][lang] = wrong predictions
  std::map<std::string, std::map<std::string, std::size_t>> counts;
  std::map<std::string, std::size_t> wrongTotal;  // per lang
  std::map<std::string, std::size_t> total;       // per lang, all predictions

  nlohmann::ordered_json to_json() const;
  std::string to_table() const;
};

std::vector<HallucinationReport::Watched> read_watchlist(const std::string& path);

HallucinationReport hallucination_count(const std::vector<QuestionRecord>& records,
                                        const std::vector<Prediction>& predictions,
                                        const std::vector<HallucinationReport::Watched>& watchlist);

/// Accuracy grouped into fixed-width complexity buckets.
struct ComplexityCurve {
  int bucketSize = 3;
  struct Bucket {
    std::int64_t lo = 0, hi = 0;
    std::size_t total = 0, correct = 0;
    double accuracy = 0.0;
  };
  std::vector<Bucket> buckets;

  nlohmann::ordered_json to_json() const;
  std::string to_table() const;
};

ComplexityCurve accuracy_by_complexity(
    const std::vector<std::pair<std::int64_t, bool>>& rows, int bucketSize);

/// Reference text a prediction is scored against: the reversible form of
/// the record's query pattern, or the normalized raw pattern when it is
/// outside the supported fragment.
std::string gold_target(const QuestionRecord& record);

}  // namespace scfgt
