#include "scfgt/records.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "scfgt/parser.hpp"
#include "scfgt/text.hpp"

namespace scfgt {

namespace {

constexpr const char* kPattern = "questionPatternModEntities";
constexpr const char* kBrackets = "questionWithBrackets";
constexpr const char* kSparqlPattern = "sparqlPatternModEntities";
constexpr const char* kSparql = "sparql";

bool is_placeholder(const std::string& t) {
  return t.size() == 2 && t[0] == 'M' && t[1] >= '0' && t[1] <= '9';
}

bool is_item_ref(const std::string& t) {
  if (t.size() < 5 || t.compare(0, 4, "wd:Q") != 0) return false;
  return t.find_first_not_of("0123456789", 4) == std::string::npos;
}

EntityBinding* find_binding(std::vector<EntityBinding>& bindings, const std::string& ph) {
  for (auto& b : bindings)
    if (b.placeholder == ph) return &b;
  return nullptr;
}

void parse_explicit_bindings(QuestionRecord& rec, const nlohmann::ordered_json& j,
                             const std::string& where) {
  if (!j.is_object()) throw DataError(where + ": entityBindings must be an object");
  for (const auto& [ph, val] : j.items()) {
    EntityBinding b;
    b.placeholder = ph;
    if (!val.is_object() || !val.contains("qid") || !val["qid"].is_string())
      throw DataError(where + ": binding for " + ph + " needs a qid string");
    b.qid = val["qid"].get<std::string>();
    if (val.contains("labels")) {
      if (!val["labels"].is_object())
        throw DataError(where + ": labels for " + ph + " must be an object");
      for (const auto& [lang, label] : val["labels"].items()) {
        if (!label.is_string())
          throw DataError(where + ": label for " + ph + "/" + lang + " must be a string");
        b.labels[lang] = label.get<std::string>();
      }
    }
    rec.bindings.push_back(std::move(b));
  }
  std::sort(rec.bindings.begin(), rec.bindings.end(),
            [](const EntityBinding& a, const EntityBinding& b) {
              return a.placeholder < b.placeholder;
            });
  rec.bindingsExplicit = true;
}

}  // namespace

std::vector<QuestionRecord> parse_records(std::istream& in, const std::string& what) {
  std::vector<QuestionRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    QuestionRecord rec;
    try {
      rec.raw = nlohmann::ordered_json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw DataError(what + " line " + std::to_string(lineno) + ": " + e.what());
    }
    if (!rec.raw.is_object())
      throw DataError(what + " line " + std::to_string(lineno) + ": record is not an object");

    auto where = what + " line " + std::to_string(lineno);
    auto fetch = [&](const char* field) -> std::string {
      if (!rec.raw.contains(field) || !rec.raw[field].is_string())
        throw DataError(where + ": missing field '" + std::string(field) + "'");
      return rec.raw[field].get<std::string>();
    };
    rec.questionPatternModEntities = fetch(kPattern);
    rec.questionWithBrackets = fetch(kBrackets);
    rec.sparqlPatternModEntities = fetch(kSparqlPattern);
    rec.sparql = fetch(kSparql);

    if (rec.raw.contains("id")) {
      const auto& idv = rec.raw["id"];
      if (idv.is_string())
        rec.id = idv.get<std::string>();
      else if (idv.is_number_integer())
        rec.id = std::to_string(idv.get<std::int64_t>());
      else
        throw DataError(where + ": id must be a string or integer");
    } else {
      rec.id = std::to_string(out.size());
    }

    if (rec.raw.contains("complexity")) {
      if (!rec.raw["complexity"].is_number_integer())
        throw DataError(where + ": complexity must be an integer");
      rec.complexity = rec.raw["complexity"].get<std::int64_t>();
    }

    const std::string patPrefix = std::string(kPattern) + "_";
    const std::string braPrefix = std::string(kBrackets) + "_";
    for (const auto& [key, val] : rec.raw.items()) {
      if (!val.is_string()) continue;
      if (key.rfind(patPrefix, 0) == 0)
        rec.translations[key.substr(patPrefix.size())].first = val.get<std::string>();
      else if (key.rfind(braPrefix, 0) == 0)
        rec.translations[key.substr(braPrefix.size())].second = val.get<std::string>();
    }

    if (rec.raw.contains("entityBindings"))
      parse_explicit_bindings(rec, rec.raw["entityBindings"], where);
    else
      derive_bindings(rec);

    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<QuestionRecord> read_records(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open records file: " + path);
  return parse_records(in, path);
}

void write_records(const std::vector<QuestionRecord>& records, std::ostream& out) {
  for (const auto& rec : records) {
    nlohmann::ordered_json j = rec.raw;
    for (const auto& [lang, pair] : rec.translations) {
      if (!pair.first.empty()) j[std::string(kPattern) + "_" + lang] = pair.first;
      if (!pair.second.empty()) j[std::string(kBrackets) + "_" + lang] = pair.second;
    }
    out << j.dump() << '\n';
  }
}

void write_records(const std::vector<QuestionRecord>& records, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open output file: " + path);
  write_records(records, out);
  if (!out) throw IoError("failed writing records to: " + path);
}

std::string extract_pattern(std::string_view questionWithBrackets,
                            const std::vector<EntityBinding>& bindings) {
  std::string s(questionWithBrackets);
  std::string out;
  std::vector<const EntityBinding*> used;
  std::size_t i = 0;
  while (i < s.size()) {
    char c = s[i];
    if (c == ']') throw DataError("']' without matching '[' in: " + s);
    if (c != '[') {
      out.push_back(c);
      ++i;
      continue;
    }
    std::size_t close = std::string::npos;
    for (std::size_t k = i + 1; k < s.size(); ++k) {
      if (s[k] == '[') throw DataError("nested '[' in: " + s);
      if (s[k] == ']') {
        close = k;
        break;
      }
    }
    if (close == std::string::npos) throw DataError("'[' without matching ']' in: " + s);
    std::string surface = s.substr(i + 1, close - i - 1);
    const EntityBinding* match = nullptr;
    for (const auto& b : bindings) {
      bool hit = false;
      for (const auto& [lang, label] : b.labels)
        if (label == surface) hit = true;
      if (!hit) continue;
      if (match && match != &b)
        throw DataError("surface form \"" + surface + "\" matches more than one binding");
      match = &b;
    }
    if (!match) throw DataError("no binding matches bracketed surface form \"" + surface + "\"");
    if (std::find(used.begin(), used.end(), match) != used.end())
      throw DataError("binding " + match->placeholder + " matched more than one span");
    used.push_back(match);
    out += match->placeholder;
    i = close + 1;
  }
  for (const auto& b : bindings)
    if (std::find_if(used.begin(), used.end(),
                     [&](const EntityBinding* u) { return u == &b; }) == used.end())
      throw DataError("label not found for binding " + b.placeholder);
  return out;
}

std::string reinsert_entities(std::string_view pattern,
                              const std::vector<EntityBinding>& bindings,
                              const std::string& lang,
                              std::vector<std::string>* warnings) {
  std::string s(pattern);
  std::string out;
  auto isWord = [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
  };
  std::size_t i = 0;
  while (i < s.size()) {
    bool standalone = s[i] == 'M' && i + 1 < s.size() && s[i + 1] >= '0' && s[i + 1] <= '9' &&
                      (i == 0 || !isWord(s[i - 1])) &&
                      (i + 2 >= s.size() || !isWord(s[i + 2]));
    if (!standalone) {
      out.push_back(s[i]);
      ++i;
      continue;
    }
    std::string ph = s.substr(i, 2);
    const EntityBinding* b = nullptr;
    for (const auto& cand : bindings)
      if (cand.placeholder == ph) b = &cand;
    if (!b) throw DataError("unbound placeholder " + ph);
    auto it = b->labels.find(lang);
    if (it != b->labels.end()) {
      out += "[" + it->second + "]";
    } else {
      if (warnings)
        warnings->push_back("no " + lang + " label for " + b->qid + "; using the item id");
      out += "[" + b->qid + "]";
    }
    i += 2;
  }
  return out;
}

void derive_bindings(QuestionRecord& record) {
  record.bindings.clear();
  record.bindingsExplicit = false;

  auto patToks = text::split_ws(record.sparqlPatternModEntities);
  auto conToks = text::split_ws(record.sparql);
  if (patToks.size() == conToks.size()) {
    for (std::size_t i = 0; i < patToks.size(); ++i) {
      if (!is_placeholder(patToks[i]) || !is_item_ref(conToks[i])) continue;
      std::string qid = conToks[i].substr(3);
      EntityBinding* b = find_binding(record.bindings, patToks[i]);
      if (!b) {
        record.bindings.push_back({patToks[i], qid, {}});
      } else if (b->qid != qid) {
        throw DataError("placeholder " + patToks[i] + " aligns with both " + b->qid + " and " +
                        qid);
      }
    }
  }

  auto align_labels = [&](const std::string& pattern, const std::string& brackets,
                          const std::string& lang) {
    TokenSequence pt, bt;
    try {
      pt = tokenize(pattern);
      bt = tokenize(brackets);
    } catch (const DataError&) {
      return;  // unusable pair; leave labels absent
    }
    if (pt.tokens.size() != bt.tokens.size()) return;
    for (std::size_t i = 0; i < pt.tokens.size(); ++i) {
      if (!is_placeholder(pt.tokens[i])) continue;
      const std::string& surf = bt.tokens[i];
      if (surf.size() < 2 || surf.front() != '[' || surf.back() != ']') continue;
      EntityBinding* b = find_binding(record.bindings, pt.tokens[i]);
      if (!b) {
        record.bindings.push_back({pt.tokens[i], "", {}});
        b = &record.bindings.back();
      }
      b->labels[lang] = surf.substr(1, surf.size() - 2);
    }
  };

  align_labels(record.questionPatternModEntities, record.questionWithBrackets, "en");
  for (const auto& [lang, pair] : record.translations)
    if (!pair.first.empty() && !pair.second.empty()) align_labels(pair.first, pair.second, lang);

  std::sort(record.bindings.begin(), record.bindings.end(),
            [](const EntityBinding& a, const EntityBinding& b) {
              return a.placeholder < b.placeholder;
            });
}

}  // namespace scfgt
