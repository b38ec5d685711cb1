#include "scfgt/labels.hpp"

#include <httplib.h>
#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "scfgt/text.hpp"

namespace scfgt {

LabelCache LabelCache::load(const std::string& path) {
  LabelCache cache;
  std::ifstream in(path, std::ios::binary);
  if (!in) return cache;  // a missing cache is just empty
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto tab1 = line.find('\t');
    auto tab2 = tab1 == std::string::npos ? std::string::npos : line.find('\t', tab1 + 1);
    if (tab2 == std::string::npos)
      throw DataError("label cache " + path + " line " + std::to_string(lineno) +
                      ": expected qid<TAB>lang<TAB>label");
    std::string qid = line.substr(0, tab1);
    std::string lang = line.substr(tab1 + 1, tab2 - tab1 - 1);
    std::string label = line.substr(tab2 + 1);
    if (!label.empty() && label.back() == '\r') label.pop_back();
    if (qid.empty() || lang.empty())
      throw DataError("label cache " + path + " line " + std::to_string(lineno) +
                      ": empty qid or language");
    cache.entries_[{qid, lang}] = label;
  }
  return cache;
}

void LabelCache::save(const std::string& path) const {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write label cache: " + tmp);
    for (const auto& [key, label] : entries_)
      out << key.first << '\t' << key.second << '\t' << label << '\n';
    if (!out) throw IoError("failed writing label cache: " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw IoError("cannot replace label cache: " + path);
}

std::optional<std::string> LabelCache::get(const std::string& qid,
                                           const std::string& lang) const {
  auto it = entries_.find({qid, lang});
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

bool LabelCache::insert(const std::string& qid, const std::string& lang,
                        const std::string& label) {
  return entries_.emplace(std::make_pair(qid, lang), label).second;
}

namespace {

struct Endpoint {
  std::string base;  // scheme://host[:port]
  std::string path;
};

Endpoint split_endpoint(const std::string& url) {
  auto scheme = url.find("://");
  if (scheme == std::string::npos)
    throw DataError("endpoint must start with http:// or https://: " + url);
  auto slash = url.find('/', scheme + 3);
  if (slash == std::string::npos) return {url, "/"};
  return {url.substr(0, slash), url.substr(slash)};
}

std::string url_encode(const std::string& s) {
  static const char* hex = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : s) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~')
      out.push_back(static_cast<char>(c));
    else {
      out.push_back('%');
      out.push_back(hex[c >> 4]);
      out.push_back(hex[c & 0xF]);
    }
  }
  return out;
}

}  // namespace

FetchOutcome fetch_labels(const std::vector<std::string>& qids, const std::string& lang,
                          const FetchConfig& config, LabelCache& cache) {
  FetchOutcome outcome;

  std::vector<std::string> misses;
  {
    std::set<std::string> seen;
    for (const auto& qid : qids) {
      if (!seen.insert(qid).second) continue;
      if (auto hit = cache.get(qid, lang)) {
        outcome.labels[qid] = *hit;
        outcome.status[qid] = "cached";
      } else {
        misses.push_back(qid);
      }
    }
  }
  if (misses.empty()) return outcome;

  if (config.endpoint.empty()) {
    for (const auto& qid : misses) outcome.status[qid] = "offline";
    return outcome;
  }

  Endpoint ep = split_endpoint(config.endpoint);
  httplib::Client client(ep.base);
  client.set_connection_timeout(10);
  client.set_read_timeout(30);

  const int batch = std::max(1, config.idsPerRequest);
  const auto gap = std::chrono::duration<double>(
      config.requestsPerSecond > 0 ? 1.0 / config.requestsPerSecond : 0.0);
  bool firstRequest = true;

  for (std::size_t at = 0; at < misses.size(); at += batch) {
    std::vector<std::string> group(misses.begin() + at,
                                   misses.begin() + std::min(misses.size(), at + batch));
    if (!firstRequest && gap.count() > 0) std::this_thread::sleep_for(gap);
    firstRequest = false;

    std::string url = ep.path;
    url += url.find('?') == std::string::npos ? '?' : '&';
    url += "action=wbgetentities&format=json&props=labels&languages=" + url_encode(lang) +
           "&ids=" + url_encode(text::join(group, "|"));

    auto res = client.Get(url);
    if (!res || res->status != 200) {
      std::string why = res ? "http status " + std::to_string(res->status)
                            : "connection failed";
      for (const auto& qid : group) outcome.status[qid] = "error: " + why;
      continue;
    }

    nlohmann::json body;
    try {
      body = nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::parse_error&) {
      for (const auto& qid : group) outcome.status[qid] = "error: bad response body";
      continue;
    }

    for (const auto& qid : group) {
      if (!body.contains("entities") || !body["entities"].contains(qid)) {
        outcome.status[qid] = "missing";
        continue;
      }
      const auto& ent = body["entities"][qid];
      if (ent.contains("missing")) {
        outcome.status[qid] = "missing";
        continue;
      }
      if (ent.contains("labels") && ent["labels"].contains(lang) &&
          ent["labels"][lang].contains("value") && ent["labels"][lang]["value"].is_string()) {
        std::string label = ent["labels"][lang]["value"].get<std::string>();
        cache.insert(qid, lang, label);
        outcome.labels[qid] = label;
        outcome.status[qid] = "fetched";
      } else {
        outcome.status[qid] = "missing";
      }
    }
  }
  return outcome;
}

void merge_labels(std::vector<EntityBinding>& bindings, const LabelCache& cache,
                  const std::string& lang) {
  for (auto& b : bindings) {
    if (b.qid.empty() || b.labels.count(lang)) continue;
    if (auto hit = cache.get(b.qid, lang)) b.labels[lang] = *hit;
  }
}

}  // namespace scfgt
