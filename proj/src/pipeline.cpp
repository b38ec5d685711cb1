#include "scfgt/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>

#include "scfgt/parser.hpp"
#include "scfgt/text.hpp"
#include "scfgt/transducer.hpp"

namespace scfgt {

namespace {

struct PerRecord {
  bool translated = false;
  bool ambiguous = false;
  bool lexiconGap = false;
  bool unparsed = false;
  std::string pattern;
  std::string error;
  std::exception_ptr fatal;
};

}  // namespace

RunSummary translate_records(const GrammarSpec& spec, std::vector<QuestionRecord>& records,
                             const TranslateOptions& options) {
  std::string lang = options.lang.empty() ? spec.targetLanguage : options.lang;
  if (lang.empty())
    throw DataError("no target language: pass one or set it in the grammar");

  Parser parser(spec);
  std::vector<PerRecord> results(records.size());

  auto work = [&](std::size_t index) {
    PerRecord& r = results[index];
    try {
      TokenSequence input = tokenize(records[index].questionPatternModEntities);
      Translation t =
          translate_tokens(parser, spec, input, options.seed, static_cast<std::uint64_t>(index));
      r.pattern = detokenize(t.sequence, spec.detokenizePolicy);
      r.ambiguous = t.candidateCount > 1;
      r.translated = true;
    } catch (const LexiconGapError& e) {
      r.lexiconGap = true;
      r.error = e.what();
    } catch (const NoParseError& e) {
      r.unparsed = true;
      r.error = e.what();
    } catch (const DataError& e) {
      r.unparsed = true;
      r.error = e.what();
    } catch (...) {
      r.fatal = std::current_exception();
    }
  };

  int workers = std::max(1, options.workers);
  if (workers == 1 || records.size() < 2) {
    for (std::size_t i = 0; i < records.size(); ++i) work(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        while (true) {
          std::size_t i = next.fetch_add(1);
          if (i >= records.size()) return;
          work(i);
        }
      });
    for (auto& t : pool) t.join();
  }

  RunSummary summary;
  summary.records = records.size();
  for (std::size_t i = 0; i < records.size(); ++i) {
    PerRecord& r = results[i];
    if (r.fatal) std::rethrow_exception(r.fatal);
    if (r.lexiconGap) ++summary.lexiconGaps;
    if (r.unparsed) ++summary.unparsed;
    if (!r.translated) {
      if (!options.skipUnparsed)
        throw DataError("record " + records[i].id + ": " + r.error);
      summary.skippedIds.push_back(records[i].id);
      continue;
    }
    if (r.ambiguous) ++summary.ambiguous;
    ++summary.translated;

    QuestionRecord& rec = records[i];
    if (options.labels) merge_labels(rec.bindings, *options.labels, lang);
    std::vector<std::string> warnings;
    std::string bracketed = reinsert_entities(r.pattern, rec.bindings, lang, &warnings);
    for (auto& w : warnings)
      summary.warnings.push_back("record " + rec.id + ": " + w);
    rec.translations[lang] = {r.pattern, bracketed};
  }
  return summary;
}

}  // namespace scfgt
