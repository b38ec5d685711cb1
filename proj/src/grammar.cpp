#include "scfgt/grammar.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "scfgt/text.hpp"

namespace scfgt {

std::string Symbol::full() const {
  if (kind == SymKind::Terminal) return name;
  std::string out = name;
  for (const auto& s : suffixes) out += s;
  return out;
}

Symbol Symbol::nonterminal(std::string base, std::vector<std::string> sfx) {
  Symbol s;
  s.kind = SymKind::Nonterminal;
  s.name = std::move(base);
  s.suffixes = std::move(sfx);
  return s;
}

Symbol Symbol::terminal(std::string surface) {
  Symbol s;
  s.kind = SymKind::Terminal;
  s.name = std::move(surface);
  return s;
}

bool operator==(const Symbol& a, const Symbol& b) {
  return a.kind == b.kind && a.full() == b.full();
}

bool operator==(const TargetStep& a, const TargetStep& b) {
  return a.isLiteral == b.isLiteral && a.text == b.text && a.sourcePos == b.sourcePos;
}

std::vector<int> SyncRule::sourceNonterminalPositions() const {
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(sourceRhs.size()); ++i)
    if (sourceRhs[i].isNonterminal()) out.push_back(i);
  return out;
}

namespace {

struct Tok {
  std::string text;
  bool quoted = false;
  int col = 0;
};

[[noreturn]] void fail(int line, const std::string& msg) {
  throw GrammarError("grammar line " + std::to_string(line) + ": " + msg);
}

std::vector<Tok> lex_line(const std::string& line, int lineno) {
  std::vector<Tok> out;
  std::size_t i = 0;
  while (i < line.size()) {
    char c = line[i];
    if (c == ' ' || c == '\t' || c == '\r') {
      ++i;
      continue;
    }
    if (c == '#') break;
    if (c == '"') {
      Tok t;
      t.quoted = true;
      t.col = static_cast<int>(i) + 1;
      ++i;
      bool closed = false;
      while (i < line.size()) {
        char d = line[i];
        if (d == '\\') {
          if (i + 1 >= line.size()) fail(lineno, "dangling backslash in quoted string");
          char e = line[i + 1];
          if (e != '"' && e != '\\')
            fail(lineno, std::string("unknown escape '\\") + e + "' in quoted string");
          t.text.push_back(e);
          i += 2;
          continue;
        }
        if (d == '"') {
          closed = true;
          ++i;
          break;
        }
        t.text.push_back(d);
        ++i;
      }
      if (!closed) fail(lineno, "unterminated quoted string");
      out.push_back(std::move(t));
      continue;
    }
    Tok t;
    t.col = static_cast<int>(i) + 1;
    while (i < line.size()) {
      char d = line[i];
      if (d == ' ' || d == '\t' || d == '\r' || d == '#' || d == '"') break;
      t.text.push_back(d);
      ++i;
    }
    out.push_back(std::move(t));
  }
  return out;
}

bool valid_name(const std::string& s) {
  if (s.empty()) return false;
  if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  return true;
}

Symbol parse_nonterminal(const std::string& tok, int line, bool allowCoindex) {
  std::string body = tok;
  int coindex = 0;
  auto colon = body.find(':');
  if (colon != std::string::npos) {
    if (!allowCoindex) fail(line, "coindex not allowed on '" + tok + "' here");
    std::string digits = body.substr(colon + 1);
    if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos)
      fail(line, "bad coindex in '" + tok + "'");
    coindex = std::stoi(digits);
    if (coindex < 1) fail(line, "coindex must be at least 1 in '" + tok + "'");
    body = body.substr(0, colon);
  }
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    auto plus = body.find('+', start);
    if (plus == std::string::npos) {
      parts.push_back(body.substr(start));
      break;
    }
    parts.push_back(body.substr(start, plus - start));
    start = plus + 1;
  }
  for (const auto& p : parts)
    if (!valid_name(p)) fail(line, "bad nonterminal name '" + tok + "'");
  Symbol s = Symbol::nonterminal(parts[0],
                                 std::vector<std::string>(parts.begin() + 1, parts.end()));
  s.coindex = coindex;
  return s;
}

void push_terminals(std::vector<Symbol>& rhs, const std::string& quoted) {
  for (auto& w : text::split_ws(quoted)) rhs.push_back(Symbol::terminal(w));
}

/// Pairs source and target nonterminal occurrences of each rule and builds
/// the target emission plan. Repeated names need explicit coindexes on both
/// sides; unique names link automatically.
void resolve_links(SyncRule& rule) {
  const int line = rule.line;
  std::map<std::string, std::vector<int>> srcByName, tgtByName;
  for (int i = 0; i < static_cast<int>(rule.sourceRhs.size()); ++i)
    if (rule.sourceRhs[i].isNonterminal()) srcByName[rule.sourceRhs[i].full()].push_back(i);
  for (int i = 0; i < static_cast<int>(rule.targetRhs.size()); ++i)
    if (rule.targetRhs[i].isNonterminal()) tgtByName[rule.targetRhs[i].full()].push_back(i);

  std::set<std::string> names;
  for (auto& [n, v] : srcByName) names.insert(n);
  for (auto& [n, v] : tgtByName) names.insert(n);

  rule.links.clear();
  for (const auto& name : names) {
    auto& sv = srcByName[name];
    auto& tv = tgtByName[name];
    if (sv.size() != tv.size())
      fail(line, "nonterminal '" + name + "' occurs " + std::to_string(sv.size()) +
                     " times on the source side but " + std::to_string(tv.size()) +
                     " times on the target side");
    if (sv.empty()) continue;
    if (sv.size() == 1) {
      int sc = rule.sourceRhs[sv[0]].coindex;
      int tc = rule.targetRhs[tv[0]].coindex;
      if (sc != 0 && tc != 0 && sc != tc)
        fail(line, "coindex mismatch for '" + name + "'");
      rule.links.emplace_back(sv[0], tv[0]);
      continue;
    }
    std::map<int, int> bySrcIdx, byTgtIdx;
    for (int pos : sv) {
      int c = rule.sourceRhs[pos].coindex;
      if (c == 0)
        fail(line, "ambiguous link bijection for '" + name +
                       "': repeated occurrences need explicit coindexes on both sides");
      if (!bySrcIdx.emplace(c, pos).second)
        fail(line, "duplicate coindex :" + std::to_string(c) + " for '" + name +
                       "' on the source side");
    }
    for (int pos : tv) {
      int c = rule.targetRhs[pos].coindex;
      if (c == 0)
        fail(line, "ambiguous link bijection for '" + name +
                       "': repeated occurrences need explicit coindexes on both sides");
      if (!byTgtIdx.emplace(c, pos).second)
        fail(line, "duplicate coindex :" + std::to_string(c) + " for '" + name +
                       "' on the target side");
    }
    for (auto& [c, spos] : bySrcIdx) {
      auto it = byTgtIdx.find(c);
      if (it == byTgtIdx.end())
        fail(line, "coindex :" + std::to_string(c) + " for '" + name +
                       "' has no target-side partner");
      rule.links.emplace_back(spos, it->second);
    }
  }

  std::sort(rule.links.begin(), rule.links.end());

  rule.plan.clear();
  std::map<int, int> srcByTgt;
  for (auto& [s, t] : rule.links) srcByTgt[t] = s;
  for (int i = 0; i < static_cast<int>(rule.targetRhs.size()); ++i) {
    TargetStep step;
    if (rule.targetRhs[i].isNonterminal()) {
      step.isLiteral = false;
      step.sourcePos = srcByTgt.at(i);
    } else {
      step.isLiteral = true;
      step.text = rule.targetRhs[i].name;
    }
    rule.plan.push_back(std::move(step));
  }
}

bool same_body(const SyncRule& a, const SyncRule& b) {
  if (a.sourceRhs.size() != b.sourceRhs.size()) return false;
  for (std::size_t i = 0; i < a.sourceRhs.size(); ++i)
    if (!(a.sourceRhs[i] == b.sourceRhs[i])) return false;
  if (a.targetRhs.size() != b.targetRhs.size()) return false;
  for (std::size_t i = 0; i < a.targetRhs.size(); ++i)
    if (!(a.targetRhs[i] == b.targetRhs[i])) return false;
  return a.plan == b.plan;
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

GrammarSpec parse_grammar(std::string_view content) {
  GrammarSpec spec;
  bool haveStart = false, haveDetok = false, haveLang = false, haveEntity = false;

  std::istringstream in{std::string(content)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto toks = lex_line(line, lineno);
    if (toks.empty()) continue;
    const std::string& kw = toks[0].text;
    if (toks[0].quoted) fail(lineno, "line starts with a quoted string");

    if (kw == "start") {
      if (toks.size() != 2 || toks[1].quoted) fail(lineno, "expected: start <nonterminal>");
      if (haveStart) fail(lineno, "duplicate start declaration");
      spec.start = parse_nonterminal(toks[1].text, lineno, false);
      haveStart = true;
    } else if (kw == "lang") {
      if (toks.size() != 2 || toks[1].quoted) fail(lineno, "expected: lang <tag>");
      if (haveLang) fail(lineno, "duplicate lang declaration");
      for (char c : toks[1].text)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-')
          fail(lineno, "bad language tag '" + toks[1].text + "'");
      spec.targetLanguage = toks[1].text;
      haveLang = true;
    } else if (kw == "suffix") {
      if (toks.size() != 2 || toks[1].quoted || !valid_name(toks[1].text))
        fail(lineno, "expected: suffix <name>");
      if (std::find(spec.suffixes.begin(), spec.suffixes.end(), toks[1].text) !=
          spec.suffixes.end())
        fail(lineno, "duplicate suffix '" + toks[1].text + "'");
      spec.suffixes.push_back(toks[1].text);
    } else if (kw == "detok") {
      if (toks.size() != 2 || toks[1].quoted) fail(lineno, "expected: detok cjk|whitespace");
      if (haveDetok) fail(lineno, "duplicate detok declaration");
      if (toks[1].text == "cjk")
        spec.detokenizePolicy = DetokPolicy::Cjk;
      else if (toks[1].text == "whitespace")
        spec.detokenizePolicy = DetokPolicy::Whitespace;
      else
        fail(lineno, "unknown detok policy '" + toks[1].text + "'");
      haveDetok = true;
    } else if (kw == "entityclass") {
      if (toks.size() != 2 || toks[1].quoted || !valid_name(toks[1].text))
        fail(lineno, "expected: entityclass <tag>");
      if (haveEntity) fail(lineno, "duplicate entityclass declaration");
      spec.entityClass = toks[1].text;
      haveEntity = true;
    } else if (kw == "rule") {
      if (toks.size() < 4) fail(lineno, "expected: rule <head> -> <source> | <target>");
      if (toks[1].quoted) fail(lineno, "rule head must be a nonterminal");
      SyncRule rule;
      rule.line = lineno;
      rule.head = parse_nonterminal(toks[1].text, lineno, false);
      if (toks[2].quoted || toks[2].text != "->") fail(lineno, "expected '->' after rule head");
      std::size_t i = 3;
      bool sawSep = false;
      for (; i < toks.size(); ++i) {
        if (!toks[i].quoted && toks[i].text == "|") {
          sawSep = true;
          ++i;
          break;
        }
        if (toks[i].quoted)
          push_terminals(rule.sourceRhs, toks[i].text);
        else if (toks[i].text == "~")
          fail(lineno, "'~' is only meaningful on the target side");
        else
          rule.sourceRhs.push_back(parse_nonterminal(toks[i].text, lineno, true));
      }
      if (!sawSep) fail(lineno, "missing '|' between source and target sides");
      if (rule.sourceRhs.empty()) fail(lineno, "empty source side");
      for (; i < toks.size(); ++i) {
        if (toks[i].quoted)
          push_terminals(rule.targetRhs, toks[i].text);
        else if (toks[i].text == "~")
          continue;  // dropped source terminal, nothing to emit
        else if (toks[i].text == "|")
          fail(lineno, "unexpected second '|'");
        else
          rule.targetRhs.push_back(parse_nonterminal(toks[i].text, lineno, true));
      }
      resolve_links(rule);
      spec.rules.push_back(std::move(rule));
    } else if (kw == "inherit") {
      if (toks.size() < 4 || toks[1].quoted || toks[2].quoted)
        fail(lineno, "expected: inherit <suffix> <head> propagate <occurrences>");
      SuffixMacro m;
      m.line = lineno;
      if (!valid_name(toks[1].text)) fail(lineno, "bad suffix name '" + toks[1].text + "'");
      m.suffix = toks[1].text;
      m.baseHead = parse_nonterminal(toks[2].text, lineno, false);
      if (toks[3].quoted || toks[3].text != "propagate")
        fail(lineno, "expected 'propagate' in inherit declaration");
      for (std::size_t k = 4; k < toks.size(); ++k) {
        const std::string& d = toks[k].text;
        if (toks[k].quoted || d.empty() || d.find_first_not_of("0123456789") != std::string::npos)
          fail(lineno, "bad occurrence index '" + d + "'");
        int v = std::stoi(d);
        if (v < 1) fail(lineno, "occurrence indexes are 1-based");
        m.propagateTo.push_back(v);
      }
      spec.macros.push_back(std::move(m));
    } else if (kw == "lex") {
      if (toks.size() != 5 || toks[1].quoted || !toks[2].quoted || toks[3].quoted ||
          toks[3].text != "=>" || !toks[4].quoted)
        fail(lineno, "expected: lex <tag> \"source\" => \"target\"");
      LexEntry e;
      e.line = lineno;
      e.tag = parse_nonterminal(toks[1].text, lineno, false);
      e.source = toks[2].text;
      e.target = toks[4].text;
      e.sourceTokens = text::split_ws(e.source);
      e.targetTokens = text::split_ws(e.target);
      if (e.sourceTokens.empty()) fail(lineno, "empty lexicon source");
      spec.lexicon.push_back(std::move(e));
    } else if (kw == "post") {
      if (toks.size() != 5 || toks[1].quoted || !toks[2].quoted || toks[3].quoted ||
          toks[3].text != "=>" || !toks[4].quoted)
        fail(lineno, "expected: post <rank> \"pattern\" => \"replacement\"");
      PostRule p;
      p.line = lineno;
      if (toks[1].text.find_first_not_of("0123456789") != std::string::npos)
        fail(lineno, "bad post rule rank '" + toks[1].text + "'");
      p.rank = std::stoi(toks[1].text);
      p.pattern = text::split_ws(toks[2].text);
      p.replacement = text::split_ws(toks[4].text);
      if (p.pattern.empty()) fail(lineno, "empty post rule pattern");
      spec.postRules.push_back(std::move(p));
    } else {
      fail(lineno, "unknown directive '" + kw + "'");
    }
  }
  return spec;
}

GrammarSpec expand_suffixes(GrammarSpec spec) {
  for (const auto& m : spec.macros) {
    if (std::find(spec.suffixes.begin(), spec.suffixes.end(), m.suffix) == spec.suffixes.end())
      fail(m.line, "suffix '" + m.suffix + "' not declared");

    std::vector<int> matching;
    for (int i = 0; i < static_cast<int>(spec.rules.size()); ++i)
      if (spec.rules[i].head.full() == m.baseHead.full()) matching.push_back(i);
    if (matching.empty())
      fail(m.line, "macro base rule not found: no rule headed by '" + m.baseHead.full() + "'");
    if (matching.size() > 1)
      fail(m.line, "macro base ambiguous: '" + m.baseHead.full() + "' heads " +
                       std::to_string(matching.size()) + " rules");

    SyncRule derived = spec.rules[matching[0]];
    auto ntPos = derived.sourceNonterminalPositions();
    derived.head.suffixes.push_back(m.suffix);
    derived.line = m.line;
    for (int occ : m.propagateTo) {
      if (occ < 1 || occ > static_cast<int>(ntPos.size()))
        fail(m.line, "occurrence " + std::to_string(occ) + " out of range for '" +
                         m.baseHead.full() + "' (" + std::to_string(ntPos.size()) +
                         " source nonterminal occurrences)");
      int spos = ntPos[occ - 1];
      int tpos = -1;
      for (auto& [s, t] : derived.links)
        if (s == spos) tpos = t;
      derived.sourceRhs[spos].suffixes.push_back(m.suffix);
      derived.targetRhs[tpos].suffixes.push_back(m.suffix);
    }

    bool skip = false;
    for (const auto& r : spec.rules) {
      if (r.head.full() != derived.head.full()) continue;
      if (same_body(r, derived)) {
        skip = true;
        break;
      }
      fail(m.line, "suffix macro derives '" + derived.head.full() +
                       "' but a different rule for that head already exists");
    }
    if (!skip) spec.rules.push_back(std::move(derived));
  }
  return spec;
}

void validate_grammar(const GrammarSpec& spec) {
  if (spec.start.name.empty()) throw GrammarError("missing start symbol declaration");

  std::set<std::string> declared(spec.suffixes.begin(), spec.suffixes.end());
  auto check_suffixes = [&](const Symbol& s, int line) {
    for (const auto& sfx : s.suffixes)
      if (!declared.count(sfx)) fail(line, "undeclared suffix '" + sfx + "' on '" + s.full() + "'");
  };

  check_suffixes(spec.start, 0);
  std::map<std::string, std::vector<const SyncRule*>> rulesByHead;
  for (const auto& r : spec.rules) {
    if (!r.head.isNonterminal()) fail(r.line, "rule head must be a nonterminal");
    if (r.sourceRhs.empty()) fail(r.line, "empty source side in rule for '" + r.head.full() + "'");
    check_suffixes(r.head, r.line);
    for (const auto& s : r.sourceRhs)
      if (s.isNonterminal()) check_suffixes(s, r.line);
    for (const auto& s : r.targetRhs)
      if (s.isNonterminal()) check_suffixes(s, r.line);
    std::size_t srcNts = r.sourceNonterminalPositions().size();
    std::size_t tgtNts = 0;
    for (const auto& s : r.targetRhs)
      if (s.isNonterminal()) ++tgtNts;
    if (r.links.size() != srcNts || srcNts != tgtNts)
      fail(r.line, "unresolved constituent links in rule for '" + r.head.full() + "'");
    for (auto& [s, t] : r.links)
      if (!(r.sourceRhs[s] == r.targetRhs[t]))
        fail(r.line, "linked occurrences differ in rule for '" + r.head.full() + "'");
    if (r.plan.size() != r.targetRhs.size())
      fail(r.line, "bad emission plan in rule for '" + r.head.full() + "'");
  }

  std::map<std::pair<std::string, std::string>, const LexEntry*> lexKeys;
  std::set<std::string> lexTags;
  for (const auto& e : spec.lexicon) {
    check_suffixes(e.tag, e.line);
    auto key = std::make_pair(e.tag.full(), e.source);
    auto [it, fresh] = lexKeys.emplace(key, &e);
    if (!fresh)
      fail(e.line, "duplicate lexicon entry for (" + e.tag.full() + ", \"" + e.source +
                       "\"); first defined at line " + std::to_string(it->second->line));
    lexTags.insert(e.tag.full());
  }

  // Cycles among rules whose source side is a single nonterminal would make
  // derivation counts infinite.
  for (const auto& r : spec.rules) rulesByHead[r.head.full()].push_back(&r);
  {
    std::map<std::string, int> color;  // 0 new, 1 open, 2 done
    std::vector<std::pair<std::string, int>> stack;
    for (const auto& [head, v] : rulesByHead) {
      if (color[head]) continue;
      stack.push_back({head, 0});
      while (!stack.empty()) {
        auto [name, phase] = stack.back();
        if (phase == 0) {
          if (color[name] == 2) {
            stack.pop_back();
            continue;
          }
          stack.back().second = 1;
          color[name] = 1;
          auto it = rulesByHead.find(name);
          if (it != rulesByHead.end()) {
            for (const SyncRule* r : it->second) {
              if (r->sourceRhs.size() != 1 || !r->sourceRhs[0].isNonterminal()) continue;
              const std::string next = r->sourceRhs[0].full();
              if (color[next] == 1)
                fail(r->line, "cycle of single-nonterminal source rules through '" + next + "'");
              if (color[next] == 0) stack.push_back({next, 0});
            }
          }
        } else {
          color[name] = 2;
          stack.pop_back();
        }
      }
    }
  }

  // Every nonterminal reachable from the start symbol must be derivable:
  // it needs a rule, a lexicon entry, or the entity class.
  {
    std::set<std::string> seen;
    std::vector<std::string> queue{spec.start.full()};
    seen.insert(spec.start.full());
    while (!queue.empty()) {
      std::string cur = queue.back();
      queue.pop_back();
      bool derivable = rulesByHead.count(cur) || lexTags.count(cur) ||
                       (!spec.entityClass.empty() && cur == spec.entityClass);
      if (!derivable) {
        if (cur == spec.start.full())
          throw GrammarError("start symbol '" + cur + "' has no rules or lexicon entries");
        throw GrammarError("no way to derive '" + cur + "', which is reachable from the start symbol");
      }
      auto it = rulesByHead.find(cur);
      if (it == rulesByHead.end()) continue;
      for (const SyncRule* r : it->second)
        for (const auto& s : r->sourceRhs)
          if (s.isNonterminal() && seen.insert(s.full()).second) queue.push_back(s.full());
    }
  }
}

GrammarSpec load_grammar(std::string_view content) {
  GrammarSpec spec = expand_suffixes(parse_grammar(content));
  validate_grammar(spec);
  return spec;
}

GrammarSpec load_grammar_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open grammar file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_grammar(buf.str());
}

namespace {

/// Rules are emitted with canonical coindexes: names repeated within a rule
/// get :1..:n in source order on both sides, unique names get none.
std::string render_rule(const SyncRule& r) {
  std::map<std::string, int> total, counter;
  for (const auto& s : r.sourceRhs)
    if (s.isNonterminal()) total[s.full()]++;
  std::map<int, int> canonical;  // source pos -> emitted coindex
  for (int i = 0; i < static_cast<int>(r.sourceRhs.size()); ++i) {
    if (!r.sourceRhs[i].isNonterminal()) continue;
    const std::string name = r.sourceRhs[i].full();
    if (total[name] > 1) canonical[i] = ++counter[name];
  }
  std::map<int, int> tgtCoindex;  // target pos -> emitted coindex
  for (auto& [s, t] : r.links)
    if (canonical.count(s)) tgtCoindex[t] = canonical[s];

  std::string out = "rule " + r.head.full() + " ->";
  for (int i = 0; i < static_cast<int>(r.sourceRhs.size()); ++i) {
    const Symbol& s = r.sourceRhs[i];
    out += ' ';
    if (s.isNonterminal()) {
      out += s.full();
      if (canonical.count(i)) out += ":" + std::to_string(canonical.at(i));
    } else {
      out += quote(s.name);
    }
  }
  out += " |";
  for (int i = 0; i < static_cast<int>(r.targetRhs.size()); ++i) {
    const Symbol& s = r.targetRhs[i];
    out += ' ';
    if (s.isNonterminal()) {
      out += s.full();
      if (tgtCoindex.count(i)) out += ":" + std::to_string(tgtCoindex.at(i));
    } else {
      out += quote(s.name);
    }
  }
  return out;
}

}  // namespace

std::string serialize_grammar(const GrammarSpec& spec) {
  std::string out;
  if (!spec.targetLanguage.empty()) out += "lang " + spec.targetLanguage + "\n";
  out += "start " + spec.start.full() + "\n";
  for (const auto& s : spec.suffixes) out += "suffix " + s + "\n";
  if (!spec.entityClass.empty()) out += "entityclass " + spec.entityClass + "\n";
  out += std::string("detok ") +
         (spec.detokenizePolicy == DetokPolicy::Cjk ? "cjk" : "whitespace") + "\n";
  for (const auto& r : spec.rules) out += render_rule(r) + "\n";
  for (const auto& m : spec.macros) {
    out += "inherit " + m.suffix + " " + m.baseHead.full() + " propagate";
    for (int occ : m.propagateTo) out += " " + std::to_string(occ);
    out += "\n";
  }
  for (const auto& e : spec.lexicon)
    out += "lex " + e.tag.full() + " " + quote(e.source) + " => " + quote(e.target) + "\n";
  for (const auto& p : spec.postRules)
    out += "post " + std::to_string(p.rank) + " " + quote(text::join(p.pattern, " ")) + " => " +
           quote(text::join(p.replacement, " ")) + "\n";
  return out;
}

bool operator==(const GrammarSpec& a, const GrammarSpec& b) {
  auto ruleEq = [](const SyncRule& x, const SyncRule& y) {
    return x.head == y.head && x.sourceRhs == y.sourceRhs && x.targetRhs == y.targetRhs &&
           x.plan == y.plan && x.links == y.links;
  };
  if (!(a.start == b.start) || a.targetLanguage != b.targetLanguage ||
      a.detokenizePolicy != b.detokenizePolicy || a.entityClass != b.entityClass ||
      a.suffixes != b.suffixes)
    return false;
  if (a.rules.size() != b.rules.size() || a.lexicon.size() != b.lexicon.size() ||
      a.macros.size() != b.macros.size() || a.postRules.size() != b.postRules.size())
    return false;
  for (std::size_t i = 0; i < a.rules.size(); ++i)
    if (!ruleEq(a.rules[i], b.rules[i])) return false;
  for (std::size_t i = 0; i < a.lexicon.size(); ++i) {
    const auto& x = a.lexicon[i];
    const auto& y = b.lexicon[i];
    if (!(x.tag == y.tag) || x.source != y.source || x.target != y.target) return false;
  }
  for (std::size_t i = 0; i < a.macros.size(); ++i) {
    const auto& x = a.macros[i];
    const auto& y = b.macros[i];
    if (x.suffix != y.suffix || !(x.baseHead == y.baseHead) || x.propagateTo != y.propagateTo)
      return false;
  }
  for (std::size_t i = 0; i < a.postRules.size(); ++i) {
    const auto& x = a.postRules[i];
    const auto& y = b.postRules[i];
    if (x.rank != y.rank || x.pattern != y.pattern || x.replacement != y.replacement)
      return false;
  }
  return true;
}

}  // namespace scfgt
