#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "scfgt/errors.hpp"
#include "scfgt/records.hpp"

namespace scfgt {

/// On-disk label store: one "qid<TAB>lang<TAB>label" row per line, kept
/// sorted. Values are never overwritten once present.
class LabelCache {
 public:
  static LabelCache load(const std::string& path);
  void save(const std::string& path) const;

  std::optional<std::string> get(const std::string& qid, const std::string& lang) const;
  bool insert(const std::string& qid, const std::string& lang, const std::string& label);
  std::size_t size() const { return entries_.size(); }

 private:
  std::map<std::pair<std::string, std::string>, std::string> entries_;
};

struct FetchConfig {
  std::string endpoint;          // empty = offline, cache only
  double requestsPerSecond = 1.0;
  int idsPerRequest = 50;
};

struct FetchOutcome {
  std::map<std::string, std::string> labels;  // qid -> label, for resolved ids
  std::map<std::string, std::string> status;  // qid -> cached|fetched|missing|offline|error:...
};

/// Resolves labels cache-first; only cache misses go to the endpoint, in
/// batches, throttled. Fetched labels are inserted into the cache. With no
/// endpoint configured every miss is reported as offline instead of failing.
FetchOutcome fetch_labels(const std::vector<std::string>& qids, const std::string& lang,
                          const FetchConfig& config, LabelCache& cache);

/// Copies cached labels for the given language into bindings that lack one.
void merge_labels(std::vector<EntityBinding>& bindings, const LabelCache& cache,
                  const std::string& lang);

}  // namespace scfgt
