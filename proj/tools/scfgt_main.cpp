#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "scfgt/audit.hpp"
#include "scfgt/grammar.hpp"
#include "scfgt/labels.hpp"
#include "scfgt/metrics.hpp"
#include "scfgt/parser.hpp"
#include "scfgt/pipeline.hpp"
#include "scfgt/records.hpp"
#include "scfgt/sparql.hpp"
#include "scfgt/text.hpp"
#include "scfgt/transducer.hpp"

namespace fs = std::filesystem;
using namespace scfgt;

namespace {

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

void write_text(const std::string& path, const std::string& content) {
  if (path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open output: " + path);
  out << content;
  if (!out) throw IoError("failed writing: " + path);
}

void write_json(const std::string& path, const nlohmann::ordered_json& j) {
  write_text(path, j.dump(2) + "\n");
}

std::vector<std::string> default_stats_langs(const std::vector<QuestionRecord>& records) {
  std::vector<std::string> langs{"en"};
  if (records.empty()) return langs;
  std::set<std::string> common;
  for (const auto& [lang, pair] : records.front().translations)
    if (!pair.first.empty()) common.insert(lang);
  for (const auto& r : records) {
    std::set<std::string> keep;
    for (const auto& lang : common) {
      auto it = r.translations.find(lang);
      if (it != r.translations.end() && !it->second.first.empty()) keep.insert(lang);
    }
    common = std::move(keep);
  }
  langs.insert(langs.end(), common.begin(), common.end());
  return langs;
}

std::vector<std::string> discover_splits(const std::string& dir) {
  std::vector<std::string> names;
  if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir);
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    auto p = entry.path();
    if (p.extension() == ".train") names.push_back(p.stem().string());
  }
  std::sort(names.begin(), names.end());
  return names;
}

struct TranslateArgs {
  std::string grammar, in, out = "-", lang, labels;
  std::uint64_t seed = 0;
  int workers = 1;
  bool skipUnparsed = false;
};

void run_translate(const TranslateArgs& a) {
  GrammarSpec spec = load_grammar_file(a.grammar);
  auto records = read_records(a.in);
  LabelCache cache;
  TranslateOptions opts;
  opts.lang = a.lang;
  opts.seed = a.seed;
  opts.workers = a.workers;
  opts.skipUnparsed = a.skipUnparsed;
  if (!a.labels.empty()) {
    cache = LabelCache::load(a.labels);
    opts.labels = &cache;
  }
  RunSummary summary = translate_records(spec, records, opts);
  if (a.out == "-") {
    write_records(records, std::cout);
  } else {
    write_records(records, a.out);
  }
  for (const auto& id : summary.skippedIds) std::cerr << "skipped " << id << "\n";
  for (const auto& w : summary.warnings) std::cerr << "warning: " << w << "\n";
  std::cerr << "translated " << summary.translated << "/" << summary.records << " records ("
            << summary.ambiguous << " ambiguous, " << summary.lexiconGaps << " lexicon gaps, "
            << summary.unparsed << " unparsed)\n";
}

struct StatsArgs {
  std::string in, out = "-", json;
  std::vector<std::string> langs;
};

void run_stats(const StatsArgs& a) {
  auto records = read_records(a.in);
  auto langs = a.langs.empty() ? default_stats_langs(records) : a.langs;
  StatsReport report = compute_stats(records, langs);
  write_text(a.out, report.to_table());
  if (!a.json.empty()) write_json(a.json, report.to_json());
}

struct OverlapArgs {
  std::string in, splits, split, out = "-", json;
  std::vector<std::string> langs;
};

void run_overlap(const OverlapArgs& a) {
  auto records = read_records(a.in);
  std::vector<std::string> names =
      a.split.empty() ? discover_splits(a.splits) : std::vector<std::string>{a.split};
  if (names.empty()) throw DataError("no split manifests found in " + a.splits);
  auto langs = a.langs.empty() ? std::vector<std::string>{"en"} : a.langs;

  std::string table;
  nlohmann::ordered_json all = nlohmann::ordered_json::array();
  for (const auto& name : names) {
    SplitManifest manifest = SplitManifest::load(a.splits, name);
    for (const auto& lang : langs) {
      OverlapReport report = train_test_overlap(records, manifest, lang);
      table += report.to_table();
      all.push_back(report.to_json());
    }
  }
  write_text(a.out, table);
  if (!a.json.empty()) write_json(a.json, all);
}

struct BleuArgs {
  std::string hyp, ref;
  std::string tokenization = "whitespace";
  std::string smoothing = "epsilon";
  int maxOrder = 4;
};

BleuConfig bleu_config(const BleuArgs& a) {
  BleuConfig c;
  c.maxOrder = a.maxOrder;
  if (a.tokenization == "cjkchar")
    c.tokenization = BleuConfig::Tokenization::CjkChar;
  else if (a.tokenization == "whitespace")
    c.tokenization = BleuConfig::Tokenization::Whitespace;
  else
    throw DataError("unknown tokenization: " + a.tokenization);
  if (a.smoothing == "none")
    c.smoothing = BleuConfig::Smoothing::None;
  else if (a.smoothing == "epsilon")
    c.smoothing = BleuConfig::Smoothing::Epsilon;
  else
    throw DataError("unknown smoothing: " + a.smoothing);
  return c;
}

void run_bleu(const BleuArgs& a) {
  auto hyp = read_lines(a.hyp);
  auto ref = read_lines(a.ref);
  double score = corpus_bleu(hyp, ref, bleu_config(a));
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(2);
  os << "BLEU = " << score << "\n";
  std::cout << os.str();
}

void run_em(const std::string& hypPath, const std::string& refPath) {
  auto hyp = read_lines(hypPath);
  auto ref = read_lines(refPath);
  double score = exact_match(hyp, ref);
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(4);
  os << "EM = " << score << "\n";
  std::cout << os.str();
}

struct RirArgs {
  std::string mode, in, out = "-";
};

void run_rir(const RirArgs& a) {
  auto lines = read_lines(a.in);
  std::string out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (text::trim(lines[i]).empty()) continue;
    try {
      if (a.mode == "to")
        out += to_rir(parse_sparql(lines[i])) + "\n";
      else
        out += serialize_sparql(from_rir(lines[i])) + "\n";
    } catch (const DataError& e) {
      throw DataError(a.in + " line " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  write_text(a.out, out);
}

struct GroundArgs {
  std::string in, out = "-";
  bool check = false;
};

void run_ground(const GroundArgs& a) {
  auto records = read_records(a.in);
  std::string out;
  std::size_t mismatches = 0;
  for (const auto& r : records) {
    std::map<std::string, std::string> qids;
    for (const auto& b : r.bindings)
      if (!b.qid.empty()) qids[b.placeholder] = b.qid;
    SparqlQuery grounded;
    try {
      grounded = ground_sparql(parse_sparql(r.sparqlPatternModEntities), qids);
    } catch (const DataError& e) {
      throw DataError("record " + r.id + ": " + e.what());
    }
    std::string text = serialize_sparql(grounded);
    out += text + "\n";
    if (a.check) {
      std::string want = text::pattern_key(r.sparql);
      std::string got = text::pattern_key(text);
      try {
        want = serialize_sparql(parse_sparql(r.sparql));
      } catch (const DataError&) {
      }
      if (got != want) {
        ++mismatches;
        std::cerr << "record " << r.id << ": grounded query differs from stored query\n";
      }
    }
  }
  write_text(a.out, out);
  if (a.check && mismatches)
    throw DataError(std::to_string(mismatches) + " grounded queries differ from stored ones");
}

struct HallucArgs {
  std::string in, preds, watchlist, out = "-", json;
};

void run_halluc(const HallucArgs& a) {
  auto records = read_records(a.in);
  auto preds = read_predictions(a.preds);
  auto watch = read_watchlist(a.watchlist);
  HallucinationReport report = hallucination_count(records, preds, watch);
  write_text(a.out, report.to_table());
  if (!a.json.empty()) write_json(a.json, report.to_json());
}

struct ComplexityArgs {
  std::string in, preds, out = "-", json;
  int bucketSize = 3;
};

void run_complexity(const ComplexityArgs& a) {
  auto records = read_records(a.in);
  auto preds = read_predictions(a.preds);
  std::map<std::string, const QuestionRecord*> byId;
  for (const auto& r : records) byId[r.id] = &r;
  std::vector<std::pair<std::int64_t, bool>> rows;
  for (const auto& p : preds) {
    auto it = byId.find(p.id);
    if (it == byId.end()) throw DataError("prediction for unknown record id " + p.id);
    const QuestionRecord& rec = *it->second;
    if (!rec.complexity)
      throw DataError("record " + rec.id + " has no complexity field");
    bool correct = text::pattern_key(p.text) == text::pattern_key(gold_target(rec));
    rows.emplace_back(*rec.complexity, correct);
  }
  ComplexityCurve curve = accuracy_by_complexity(rows, a.bucketSize);
  write_text(a.out, curve.to_table());
  if (!a.json.empty()) write_json(a.json, curve.to_json());
}

struct FetchArgs {
  std::string in, qids, lang, labels, endpoint, out = "-";
  double rps = 1.0;
};

void run_fetch(const FetchArgs& a) {
  std::vector<std::string> ids;
  if (!a.qids.empty()) {
    for (const auto& line : read_lines(a.qids)) {
      std::string t = text::trim(line);
      if (!t.empty() && t[0] != '#') ids.push_back(t);
    }
  } else if (!a.in.empty()) {
    for (const auto& r : read_records(a.in))
      for (const auto& b : r.bindings)
        if (!b.qid.empty()) ids.push_back(b.qid);
  } else {
    throw DataError("fetch-labels needs --in or --qids");
  }

  FetchConfig config;
  config.endpoint = a.endpoint;
  if (config.endpoint.empty())
    if (const char* env = std::getenv("WIKIDATA_ENDPOINT")) config.endpoint = env;
  config.requestsPerSecond = a.rps;

  LabelCache cache = LabelCache::load(a.labels);
  FetchOutcome outcome = fetch_labels(ids, a.lang, config, cache);
  cache.save(a.labels);

  std::string out;
  for (const auto& [qid, status] : outcome.status) {
    out += qid + "\t" + status;
    auto it = outcome.labels.find(qid);
    if (it != outcome.labels.end()) out += "\t" + it->second;
    out += "\n";
  }
  write_text(a.out, out);
  std::size_t resolved = outcome.labels.size();
  std::cerr << "resolved " << resolved << "/" << outcome.status.size() << " items ("
            << cache.size() << " cache rows)\n";
}

struct ValidateArgs {
  std::string grammar, emit;
};

void run_validate(const ValidateArgs& a) {
  GrammarSpec spec = load_grammar_file(a.grammar);
  if (!a.emit.empty()) write_text(a.emit, serialize_grammar(spec));
  std::cerr << "grammar ok: " << spec.rules.size() << " rules, " << spec.lexicon.size()
            << " lexicon entries, " << spec.suffixes.size() << " suffixes, "
            << spec.macros.size() << " macros, " << spec.postRules.size() << " post rules\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rule-based translation and audit toolkit for compositional question datasets"};
  app.require_subcommand(1);

  TranslateArgs translateArgs;
  auto* t = app.add_subcommand("translate", "translate question patterns in a record file");
  t->add_option("--grammar", translateArgs.grammar, "grammar file")->required();
  t->add_option("--in", translateArgs.in, "input records (one JSON object per line)")->required();
  t->add_option("--out", translateArgs.out, "output records path, - for stdout");
  t->add_option("--lang", translateArgs.lang, "target language tag (default: from grammar)");
  t->add_option("--seed", translateArgs.seed, "candidate selection seed");
  t->add_option("--workers", translateArgs.workers, "worker threads");
  t->add_option("--labels", translateArgs.labels, "label cache for bracketed output");
  t->add_flag("--skip-unparsed", translateArgs.skipUnparsed,
              "skip and count inputs that fail instead of aborting");
  t->callback([&] { run_translate(translateArgs); });

  StatsArgs statsArgs;
  auto* s = app.add_subcommand("stats", "distinct-count summary of a record file");
  s->add_option("--in", statsArgs.in, "input records")->required();
  s->add_option("--out", statsArgs.out, "table output path, - for stdout");
  s->add_option("--json", statsArgs.json, "also write a JSON report here");
  s->add_option("--lang", statsArgs.langs, "language to audit (repeatable; default: all)");
  s->callback([&] { run_stats(statsArgs); });

  OverlapArgs overlapArgs;
  auto* o = app.add_subcommand("overlap", "train/test question pattern overlap");
  o->add_option("--in", overlapArgs.in, "input records")->required();
  o->add_option("--splits", overlapArgs.splits, "directory with <name>.train/.dev/.test")
      ->required();
  o->add_option("--split", overlapArgs.split, "only this split (default: all found)");
  o->add_option("--lang", overlapArgs.langs, "language to audit (repeatable; default: en)");
  o->add_option("--out", overlapArgs.out, "table output path, - for stdout");
  o->add_option("--json", overlapArgs.json, "also write a JSON report here");
  o->callback([&] { run_overlap(overlapArgs); });

  BleuArgs bleuArgs;
  auto* b = app.add_subcommand("bleu", "corpus BLEU between two line-parallel files");
  b->add_option("--hyp", bleuArgs.hyp, "hypothesis file")->required();
  b->add_option("--ref", bleuArgs.ref, "reference file")->required();
  b->add_option("--tokenization", bleuArgs.tokenization, "whitespace|cjkchar");
  b->add_option("--smoothing", bleuArgs.smoothing, "none|epsilon");
  b->add_option("--max-order", bleuArgs.maxOrder, "highest n-gram order");
  b->callback([&] { run_bleu(bleuArgs); });

  std::string emHyp, emRef;
  auto* e = app.add_subcommand("em", "exact match rate between two line-parallel files");
  e->add_option("--hyp", emHyp, "hypothesis file")->required();
  e->add_option("--ref", emRef, "reference file")->required();
  e->callback([&] { run_em(emHyp, emRef); });

  RirArgs rirArgs;
  auto* r = app.add_subcommand("rir", "convert queries to or from the reversible form");
  r->add_option("--mode", rirArgs.mode, "to|from")
      ->required()
      ->check(CLI::IsMember({"to", "from"}));
  r->add_option("--in", rirArgs.in, "one query per line")->required();
  r->add_option("--out", rirArgs.out, "output path, - for stdout");
  r->callback([&] { run_rir(rirArgs); });

  GroundArgs groundArgs;
  auto* g = app.add_subcommand("ground", "substitute entity ids into query patterns");
  g->add_option("--in", groundArgs.in, "input records")->required();
  g->add_option("--out", groundArgs.out, "grounded queries, one per line");
  g->add_flag("--check", groundArgs.check, "verify against the stored concrete queries");
  g->callback([&] { run_ground(groundArgs); });

  HallucArgs hallucArgs;
  auto* h = app.add_subcommand("halluc", "watched-item rate among wrong predictions");
  h->add_option("--in", hallucArgs.in, "input records")->required();
  h->add_option("--preds", hallucArgs.preds, "predictions: id<TAB>lang<TAB>text")->required();
  h->add_option("--watchlist", hallucArgs.watchlist, "watched item ids, one per line")
      ->required();
  h->add_option("--out", hallucArgs.out, "table output path, - for stdout");
  h->add_option("--json", hallucArgs.json, "also write a JSON report here");
  h->callback([&] { run_halluc(hallucArgs); });

  ComplexityArgs complexityArgs;
  auto* c = app.add_subcommand("complexity", "accuracy bucketed by record complexity");
  c->add_option("--in", complexityArgs.in, "input records")->required();
  c->add_option("--preds", complexityArgs.preds, "predictions: id<TAB>lang<TAB>text")
      ->required();
  c->add_option("--bucket-size", complexityArgs.bucketSize, "bucket width (default 3)");
  c->add_option("--out", complexityArgs.out, "table output path, - for stdout");
  c->add_option("--json", complexityArgs.json, "also write a JSON report here");
  c->callback([&] { run_complexity(complexityArgs); });

  FetchArgs fetchArgs;
  auto* f = app.add_subcommand("fetch-labels", "resolve item labels, cache first");
  f->add_option("--in", fetchArgs.in, "records whose bindings need labels");
  f->add_option("--qids", fetchArgs.qids, "file with one item id per line");
  f->add_option("--lang", fetchArgs.lang, "label language")->required();
  f->add_option("--labels", fetchArgs.labels, "label cache path (read and updated)")
      ->required();
  f->add_option("--endpoint", fetchArgs.endpoint,
                "API endpoint (default: WIKIDATA_ENDPOINT env var, else offline)");
  f->add_option("--rps", fetchArgs.rps, "request throttle, requests per second");
  f->add_option("--out", fetchArgs.out, "per-item status report, - for stdout");
  f->callback([&] { run_fetch(fetchArgs); });

  ValidateArgs validateArgs;
  auto* v = app.add_subcommand("validate-grammar", "load, expand and check a grammar");
  v->add_option("--grammar", validateArgs.grammar, "grammar file")->required();
  v->add_option("--emit", validateArgs.emit, "write the canonical form here");
  v->callback([&] { run_validate(validateArgs); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    int code = app.exit(err);
    return code == 0 ? 0 : 1;
  } catch (const GrammarError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  } catch (const IoError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 3;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  return 0;
}
