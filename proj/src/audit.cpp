#include "scfgt/audit.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "scfgt/sparql.hpp"
#include "scfgt/text.hpp"

namespace scfgt {

namespace {

constexpr char kPairSep = '\x1f';

const std::string* lang_pattern(const QuestionRecord& r, const std::string& lang) {
  if (lang == "en") return &r.questionPatternModEntities;
  auto it = r.translations.find(lang);
  if (it == r.translations.end() || it->second.first.empty()) return nullptr;
  return &it->second.first;
}

std::string fmt_pct(double v) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(2);
  os << v * 100.0 << "%";
  return os.str();
}

}  // namespace

StatsReport compute_stats(const std::vector<QuestionRecord>& records,
                          const std::vector<std::string>& langs) {
  StatsReport report;
  report.records = records.size();

  std::set<std::string> questions, queries, queryPatterns;
  for (const auto& r : records) {
    questions.insert(text::pattern_key(r.questionWithBrackets));
    queries.insert(text::pattern_key(r.sparql));
    queryPatterns.insert(text::pattern_key(r.sparqlPatternModEntities));
  }
  report.uniqueQuestions = questions.size();
  report.uniqueQueries = queries.size();
  report.queryPatterns = queryPatterns.size();

  for (const auto& lang : langs) {
    StatsReport::LangRow row;
    row.lang = lang;
    std::set<std::string> patterns, pairs;
    for (const auto& r : records) {
      const std::string* p = lang_pattern(r, lang);
      if (!p)
        throw DataError("record " + r.id + " has no " + lang + " translation");
      std::string key = text::pattern_key(*p);
      patterns.insert(key);
      pairs.insert(key + kPairSep + text::pattern_key(r.sparqlPatternModEntities));
    }
    row.questionPatterns = patterns.size();
    row.pairedPatterns = pairs.size();
    row.delta = static_cast<std::int64_t>(row.pairedPatterns) -
                static_cast<std::int64_t>(row.questionPatterns);
    report.perLang.push_back(std::move(row));
  }
  return report;
}

nlohmann::ordered_json StatsReport::to_json() const {
  nlohmann::ordered_json j;
  j["records"] = records;
  j["uniqueQuestions"] = uniqueQuestions;
  j["uniqueQueries"] = uniqueQueries;
  j["queryPatterns"] = queryPatterns;
  j["languages"] = nlohmann::ordered_json::array();
  for (const auto& row : perLang) {
    nlohmann::ordered_json r;
    r["lang"] = row.lang;
    r["questionPatterns"] = row.questionPatterns;
    r["pairedPatterns"] = row.pairedPatterns;
    r["delta"] = row.delta;
    j["languages"].push_back(std::move(r));
  }
  return j;
}

std::string StatsReport::to_table() const {
  std::ostringstream os;
  os << "records           " << records << "\n";
  os << "unique questions  " << uniqueQuestions << "\n";
  os << "unique queries    " << uniqueQueries << "\n";
  os << "query patterns    " << queryPatterns << "\n";
  os << "lang  patterns  paired  delta\n";
  for (const auto& row : perLang)
    os << row.lang << "  " << row.questionPatterns << "  " << row.pairedPatterns << "  "
       << row.delta << "\n";
  return os.str();
}

namespace {

std::vector<std::string> read_id_file(const std::string& path, bool required) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    if (required) throw IoError("cannot open split file: " + path);
    return {};
  }
  std::vector<std::string> ids;
  std::string line;
  while (std::getline(in, line)) {
    std::string id = text::trim(line);
    if (!id.empty()) ids.push_back(std::move(id));
  }
  return ids;
}

}  // namespace

SplitManifest SplitManifest::load(const std::string& dir, const std::string& name) {
  SplitManifest m;
  m.name = name;
  std::string base = dir + "/" + name;
  m.train = read_id_file(base + ".train", true);
  m.dev = read_id_file(base + ".dev", false);
  m.test = read_id_file(base + ".test", true);

  std::set<std::string> seen;
  for (const auto* part : {&m.train, &m.dev, &m.test})
    for (const auto& id : *part)
      if (!seen.insert(id).second)
        throw DataError("split " + name + ": id " + id + " appears in more than one part");
  return m;
}

OverlapReport train_test_overlap(const std::vector<QuestionRecord>& records,
                                 const SplitManifest& split, const std::string& lang) {
  std::map<std::string, const QuestionRecord*> byId;
  for (const auto& r : records) byId[r.id] = &r;
  auto resolve = [&](const std::string& id) -> const QuestionRecord* {
    auto it = byId.find(id);
    if (it == byId.end())
      throw DataError("split " + split.name + " references unknown id " + id);
    return it->second;
  };

  auto collect = [&](const std::vector<std::string>& ids) {
    std::map<std::string, std::set<std::string>> byPattern;
    for (const auto& id : ids) {
      const QuestionRecord* r = resolve(id);
      const std::string* p = lang_pattern(*r, lang);
      if (!p) throw DataError("record " + id + " has no " + lang + " translation");
      byPattern[text::pattern_key(*p)].insert(text::pattern_key(r->sparqlPatternModEntities));
    }
    return byPattern;
  };

  auto train = collect(split.train);
  auto test = collect(split.test);

  OverlapReport report;
  report.split = split.name;
  report.lang = lang;
  for (const auto& [pattern, trainSet] : train) {
    auto it = test.find(pattern);
    if (it == test.end()) continue;
    OverlapReport::Entry e;
    e.pattern = pattern;
    e.trainQueryPatterns.assign(trainSet.begin(), trainSet.end());
    e.testQueryPatterns.assign(it->second.begin(), it->second.end());
    e.consistent = trainSet == it->second;
    if (e.consistent)
      ++report.consistent;
    else
      ++report.conflicting;
    report.entries.push_back(std::move(e));
  }
  return report;
}

nlohmann::ordered_json OverlapReport::to_json() const {
  nlohmann::ordered_json j;
  j["split"] = split;
  j["lang"] = lang;
  j["overlapping"] = entries.size();
  j["consistent"] = consistent;
  j["conflicting"] = conflicting;
  j["patterns"] = nlohmann::ordered_json::array();
  for (const auto& e : entries) {
    nlohmann::ordered_json p;
    p["pattern"] = e.pattern;
    p["classification"] = e.consistent ? "collapseConsistent" : "conflictingSparql";
    p["trainQueryPatterns"] = e.trainQueryPatterns;
    p["testQueryPatterns"] = e.testQueryPatterns;
    j["patterns"].push_back(std::move(p));
  }
  return j;
}

std::string OverlapReport::to_table() const {
  std::ostringstream os;
  os << "split " << split << " lang " << lang << ": " << entries.size()
     << " overlapping pattern(s), " << consistent << " consistent, " << conflicting
     << " conflicting\n";
  for (const auto& e : entries)
    os << (e.consistent ? "  [consistent]  " : "  [conflicting] ") << e.pattern << "\n";
  return os.str();
}

std::vector<Prediction> read_predictions(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open predictions file: " + path);
  std::vector<Prediction> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto tab1 = line.find('\t');
    auto tab2 = tab1 == std::string::npos ? std::string::npos : line.find('\t', tab1 + 1);
    if (tab2 == std::string::npos)
      throw DataError("predictions " + path + " line " + std::to_string(lineno) +
                      ": expected id<TAB>lang<TAB>prediction");
    out.push_back({line.substr(0, tab1), line.substr(tab1 + 1, tab2 - tab1 - 1),
                   line.substr(tab2 + 1)});
  }
  return out;
}

std::vector<HallucinationReport::Watched> read_watchlist(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open watchlist: " + path);
  std::vector<HallucinationReport::Watched> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string t = text::trim(line);
    if (t.empty() || t[0] == '#') continue;
    auto tab = t.find('\t');
    HallucinationReport::Watched w;
    if (tab == std::string::npos) {
      w.qid = t;
    } else {
      w.qid = text::trim(t.substr(0, tab));
      w.note = text::trim(t.substr(tab + 1));
    }
    out.push_back(std::move(w));
  }
  return out;
}

std::string gold_target(const QuestionRecord& record) {
  try {
    return to_rir(parse_sparql(record.sparqlPatternModEntities));
  } catch (const DataError&) {
    return text::pattern_key(record.sparqlPatternModEntities);
  }
}

HallucinationReport hallucination_count(
    const std::vector<QuestionRecord>& records, const std::vector<Prediction>& predictions,
    const std::vector<HallucinationReport::Watched>& watchlist) {
  std::map<std::string, const QuestionRecord*> byId;
  for (const auto& r : records) byId[r.id] = &r;

  HallucinationReport report;
  report.watchlist = watchlist;
  std::set<std::string> watched;
  for (const auto& w : watchlist) watched.insert(w.qid);

  std::set<std::string> langSet;
  for (const auto& p : predictions) langSet.insert(p.lang);
  report.langs.assign(langSet.begin(), langSet.end());

  for (const auto& p : predictions) {
    ++report.total[p.lang];
    auto it = byId.find(p.id);
    if (it == byId.end())
      throw DataError("prediction for unknown record id " + p.id);
    const QuestionRecord& rec = *it->second;

    if (text::pattern_key(p.text) == text::pattern_key(gold_target(rec))) continue;
    ++report.wrongTotal[p.lang];

    SparqlQuery parsed;
    bool ok = false;
    try {
      parsed = from_rir(p.text);
      ok = true;
    } catch (const DataError&) {
      try {
        parsed = parse_sparql(p.text);
        ok = true;
      } catch (const DataError&) {
      }
    }
    if (!ok) {
      ++report.counts["malformed"][p.lang];
      continue;
    }

    std::set<std::string> asserted;
    for (const auto& t : parsed.triples)
      if (t.object.rfind("wd:Q", 0) == 0) asserted.insert(t.object.substr(3));
    bool hitWatched = false;
    for (const auto& qid : asserted) {
      if (watched.count(qid)) {
        ++report.counts[qid][p.lang];
        hitWatched = true;
      }
    }
    if (!hitWatched && !asserted.empty()) ++report.counts["others"][p.lang];
  }
  return report;
}

nlohmann::ordered_json HallucinationReport::to_json() const {
  nlohmann::ordered_json j;
  j["languages"] = langs;
  j["totals"] = nlohmann::ordered_json::object();
  j["wrong"] = nlohmann::ordered_json::object();
  for (const auto& lang : langs) {
    j["totals"][lang] = total.count(lang) ? total.at(lang) : 0;
    j["wrong"][lang] = wrongTotal.count(lang) ? wrongTotal.at(lang) : 0;
  }
  auto row = [&](const std::string& key) {
    nlohmann::ordered_json r;
    for (const auto& lang : langs) {
      std::size_t c = 0;
      auto it = counts.find(key);
      if (it != counts.end() && it->second.count(lang)) c = it->second.at(lang);
      std::size_t wrong = wrongTotal.count(lang) ? wrongTotal.at(lang) : 0;
      nlohmann::ordered_json cell;
      cell["count"] = c;
      cell["shareOfWrong"] = wrong ? static_cast<double>(c) / static_cast<double>(wrong) : 0.0;
      r[lang] = std::move(cell);
    }
    return r;
  };
  j["watchlist"] = nlohmann::ordered_json::object();
  for (const auto& w : watchlist) {
    j["watchlist"][w.qid] = row(w.qid);
    if (!w.note.empty()) j["watchlist"][w.qid]["note"] = w.note;
  }
  j["others"] = row("others");
  j["malformed"] = row("malformed");
  return j;
}

std::string HallucinationReport::to_table() const {
  std::ostringstream os;
  os << "item";
  for (const auto& lang : langs) os << "\t" << lang;
  os << "\n";
  auto line = [&](const std::string& label, const std::string& key) {
    os << label;
    for (const auto& lang : langs) {
      std::size_t c = 0;
      auto it = counts.find(key);
      if (it != counts.end() && it->second.count(lang)) c = it->second.at(lang);
      std::size_t wrong = wrongTotal.count(lang) ? wrongTotal.at(lang) : 0;
      os << "\t" << c << " ("
         << fmt_pct(wrong ? static_cast<double>(c) / static_cast<double>(wrong) : 0.0) << ")";
    }
    os << "\n";
  };
  for (const auto& w : watchlist)
    line(w.note.empty() ? w.qid : w.qid + " (" + w.note + ")", w.qid);
  line("others", "others");
  line("malformed", "malformed");
  os << "wrong";
  for (const auto& lang : langs)
    os << "\t" << (wrongTotal.count(lang) ? wrongTotal.at(lang) : 0);
  os << "\ntotal";
  for (const auto& lang : langs) os << "\t" << (total.count(lang) ? total.at(lang) : 0);
  os << "\n";
  return os.str();
}

ComplexityCurve accuracy_by_complexity(
    const std::vector<std::pair<std::int64_t, bool>>& rows, int bucketSize) {
  if (bucketSize < 1) throw DataError("bucket size must be positive");
  ComplexityCurve curve;
  curve.bucketSize = bucketSize;
  std::map<std::int64_t, std::pair<std::size_t, std::size_t>> acc;  // bucket -> (total, correct)
  for (const auto& [complexity, correct] : rows) {
    if (complexity < 0)
      throw DataError("negative complexity " + std::to_string(complexity));
    auto& cell = acc[complexity / bucketSize];
    ++cell.first;
    if (correct) ++cell.second;
  }
  for (const auto& [bucket, cell] : acc) {
    ComplexityCurve::Bucket b;
    b.lo = bucket * bucketSize;
    b.hi = b.lo + bucketSize - 1;
    b.total = cell.first;
    b.correct = cell.second;
    b.accuracy = b.total ? static_cast<double>(b.correct) / static_cast<double>(b.total) : 0.0;
    curve.buckets.push_back(b);
  }
  return curve;
}

nlohmann::ordered_json ComplexityCurve::to_json() const {
  nlohmann::ordered_json j;
  j["bucketSize"] = bucketSize;
  j["buckets"] = nlohmann::ordered_json::array();
  for (const auto& b : buckets) {
    nlohmann::ordered_json row;
    row["range"] = std::to_string(b.lo) + "-" + std::to_string(b.hi);
    row["total"] = b.total;
    row["correct"] = b.correct;
    row["accuracy"] = b.accuracy;
    j["buckets"].push_back(std::move(row));
  }
  return j;
}

std::string ComplexityCurve::to_table() const {
  std::ostringstream os;
  os << "range\ttotal\tcorrect\taccuracy\n";
  for (const auto& b : buckets)
    os << b.lo << "-" << b.hi << "\t" << b.total << "\t" << b.correct << "\t"
       << fmt_pct(b.accuracy) << "\n";
  return os.str();
}

}  // namespace scfgt
