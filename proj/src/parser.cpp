#include "scfgt/parser.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <unordered_map>
#include <unordered_set>

#include "scfgt/text.hpp"

namespace scfgt {

namespace {

std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) {
  return a > UINT64_MAX - b ? UINT64_MAX : a + b;
}

std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
  if (a == 0 || b == 0) return 0;
  return a > UINT64_MAX / b ? UINT64_MAX : a * b;
}

bool is_mod_placeholder(const std::string& t) {
  return t.size() == 2 && t[0] == 'M' && t[1] >= '0' && t[1] <= '9';
}

}  // namespace

EntityKind TokenSequence::entityKindAt(int i) const {
  for (const auto& s : entitySpans)
    if (s.index == i) return s.kind;
  return EntityKind::None;
}

TokenSequence tokenize(std::string_view pattern) {
  TokenSequence out;
  auto raw = text::split_ws(pattern);

  // Brackets only delimit entity spans, so inside a span ']' may appear as
  // the final character only, and outside one neither bracket may appear
  // at all (except the '[' that opens a span).
  auto check_chunk = [](const std::string& t, std::size_t from) {
    for (std::size_t k = from; k < t.size(); ++k) {
      if (t[k] == '[') throw DataError("unbalanced brackets in pattern: nested '['");
      if (t[k] == ']' && k + 1 != t.size())
        throw DataError("unbalanced brackets in pattern: text after ']'");
    }
  };

  std::size_t i = 0;
  while (i < raw.size()) {
    const std::string& t = raw[i];
    if (!t.empty() && t.front() == '[') {
      check_chunk(t, 1);
      std::string acc = t;
      while (acc.back() != ']' || acc.size() < 2) {
        ++i;
        if (i >= raw.size())
          throw DataError("unbalanced brackets in pattern: '[' without matching ']'");
        check_chunk(raw[i], 0);
        acc += ' ';
        acc += raw[i];
      }
      out.entitySpans.push_back({static_cast<int>(out.tokens.size()), EntityKind::Bracketed});
      out.tokens.push_back(std::move(acc));
      ++i;
      continue;
    }
    if (t.find_first_of("[]") != std::string::npos)
      throw DataError("unbalanced brackets in pattern: stray bracket in '" + t + "'");
    if (is_mod_placeholder(t))
      out.entitySpans.push_back({static_cast<int>(out.tokens.size()), EntityKind::Mod});
    out.tokens.push_back(t);
    ++i;
  }
  return out;
}

std::vector<std::string> ParseTree::yieldTokens() const {
  if (kind == Kind::Token) return {symbol};
  std::vector<std::string> out;
  for (const auto& c : children) {
    auto sub = c.yieldTokens();
    out.insert(out.end(), sub.begin(), sub.end());
  }
  return out;
}

std::uint64_t ParseForest::count() const {
  return root_ < 0 ? 0 : nodes_[root_].derivations;
}

ParseTree ParseForest::tree(std::uint64_t k) const {
  if (root_ < 0 || k >= count()) throw DataError("derivation index out of range");
  return build(root_, k);
}

ParseTree ParseForest::build(int nodeIdx, std::uint64_t k) const {
  const Node& node = nodes_[nodeIdx];
  const Family* family = nullptr;
  for (const auto& f : node.families) {
    std::uint64_t combos = 1;
    for (const auto& c : f.children)
      combos = sat_mul(combos, c.leaf ? 1 : nodes_[c.node].derivations);
    if (k < combos) {
      family = &f;
      break;
    }
    k -= combos;
  }
  if (!family) throw DataError("derivation index out of range");

  // Mixed-radix decomposition over the children, last child fastest.
  std::size_t n = family->children.size();
  std::vector<std::uint64_t> radix(n, 1), digit(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const Child& c = family->children[i];
    radix[i] = c.leaf ? 1 : nodes_[c.node].derivations;
  }
  for (std::size_t i = n; i-- > 0;) {
    digit[i] = radix[i] ? k % radix[i] : 0;
    k = radix[i] ? k / radix[i] : 0;
  }

  ParseTree t;
  t.kind = family->kind;
  t.symbol = node.symbol;
  t.ruleIndex = family->ruleIndex;
  t.begin = node.begin;
  t.end = node.end;
  if (family->kind == ParseTree::Kind::Entity)
    t.entityKind = input_.entityKindAt(node.begin);
  for (std::size_t i = 0; i < n; ++i) {
    const Child& c = family->children[i];
    if (c.leaf) {
      ParseTree leaf;
      leaf.kind = ParseTree::Kind::Token;
      leaf.symbol = input_.tokens[c.pos];
      leaf.begin = c.pos;
      leaf.end = c.pos + 1;
      t.children.push_back(std::move(leaf));
    } else {
      t.children.push_back(build(c.node, digit[i]));
    }
  }
  return t;
}

Parser::Parser(const GrammarSpec& spec) {
  std::unordered_map<std::string, int> ids;
  auto intern = [&](const std::string& name) {
    auto it = ids.find(name);
    if (it != ids.end()) return it->second;
    int id = static_cast<int>(symbolNames_.size());
    ids.emplace(name, id);
    symbolNames_.push_back(name);
    return id;
  };

  startId_ = intern(spec.start.full());
  if (!spec.entityClass.empty()) entityId_ = intern(spec.entityClass);

  std::vector<std::string> vocab;
  for (int r = 0; r < static_cast<int>(spec.rules.size()); ++r) {
    const SyncRule& rule = spec.rules[r];
    Prod p;
    p.head = intern(rule.head.full());
    p.kind = ParseTree::Kind::Rule;
    p.ruleIndex = r;
    for (const auto& sym : rule.sourceRhs) {
      PItem item;
      if (sym.isNonterminal()) {
        item.nt = intern(sym.full());
      } else {
        item.terminal = true;
        item.text = sym.name;
        vocab.push_back(sym.name);
      }
      p.rhs.push_back(std::move(item));
    }
    prods_.push_back(std::move(p));
  }
  for (int l = 0; l < static_cast<int>(spec.lexicon.size()); ++l) {
    const LexEntry& e = spec.lexicon[l];
    Prod p;
    p.head = intern(e.tag.full());
    p.kind = ParseTree::Kind::Lex;
    p.ruleIndex = l;
    for (const auto& tok : e.sourceTokens) {
      PItem item;
      item.terminal = true;
      item.text = tok;
      vocab.push_back(tok);
      p.rhs.push_back(std::move(item));
    }
    prods_.push_back(std::move(p));
  }

  prodsByHead_.resize(symbolNames_.size());
  for (int p = 0; p < static_cast<int>(prods_.size()); ++p)
    prodsByHead_[prods_[p].head].push_back(p);

  std::sort(vocab.begin(), vocab.end());
  vocab.erase(std::unique(vocab.begin(), vocab.end()), vocab.end());
  vocabulary_ = std::move(vocab);
}

struct Parser::Item {
  int prod = 0;
  int dot = 0;
  int origin = 0;
};

ParseForest Parser::parse(const TokenSequence& input) const {
  const int n = static_cast<int>(input.tokens.size());

  for (int i = 0; i < n; ++i) {
    const std::string& t = input.tokens[i];
    if (input.isEntity(i)) continue;
    if (!std::binary_search(vocabulary_.begin(), vocabulary_.end(), t))
      throw DataError("unknown token '" + t + "' at position " + std::to_string(i) +
                      ": not in the grammar and not an entity");
  }

  std::vector<std::vector<Item>> chart(n + 1);
  std::vector<std::unordered_set<std::uint64_t>> seen(n + 1);
  auto key = [](const Item& it) {
    return (static_cast<std::uint64_t>(it.prod) << 40) |
           (static_cast<std::uint64_t>(it.dot) << 32) |
           static_cast<std::uint64_t>(it.origin);
  };
  auto add = [&](int pos, Item item) {
    if (seen[pos].insert(key(item)).second) chart[pos].push_back(item);
  };

  // completedEnds[(nt, i)] = all j such that nt derives tokens[i..j).
  std::map<std::pair<int, int>, std::vector<int>> completedEnds;
  std::map<std::pair<int, int>, std::unordered_set<int>> completedSeen;
  auto complete = [&](int nt, int i, int j) {
    auto keyPair = std::make_pair(nt, i);
    if (completedSeen[keyPair].insert(j).second) completedEnds[keyPair].push_back(j);
  };

  for (int p : prodsByHead_[startId_]) add(0, {p, 0, 0});

  for (int pos = 0; pos <= n; ++pos) {
    for (std::size_t idx = 0; idx < chart[pos].size(); ++idx) {
      Item item = chart[pos][idx];
      const Prod& prod = prods_[item.prod];
      if (item.dot == static_cast<int>(prod.rhs.size())) {
        complete(prod.head, item.origin, pos);
        // item.origin < pos always holds: source sides are never empty.
        for (const Item& other : chart[item.origin]) {
          const Prod& op = prods_[other.prod];
          if (other.dot < static_cast<int>(op.rhs.size()) && !op.rhs[other.dot].terminal &&
              op.rhs[other.dot].nt == prod.head)
            add(pos, {other.prod, other.dot + 1, other.origin});
        }
        continue;
      }
      const PItem& next = prod.rhs[item.dot];
      if (next.terminal) {
        if (pos < n && input.tokens[pos] == next.text)
          add(pos + 1, {item.prod, item.dot + 1, item.origin});
        continue;
      }
      for (int p : prodsByHead_[next.nt]) add(pos, {p, 0, pos});
      if (next.nt == entityId_ && pos < n && input.isEntity(pos)) {
        complete(entityId_, pos, pos + 1);
        add(pos + 1, {item.prod, item.dot + 1, item.origin});
      }
      // Advance over nonterminals already completed at this position by
      // earlier items in this chart column.
      auto done = completedEnds.find({next.nt, pos});
      if (done != completedEnds.end())
        for (int end : done->second)
          if (end > pos) add(end, {item.prod, item.dot + 1, item.origin});
    }
  }

  bool accepted = false;
  {
    auto it = completedEnds.find({startId_, 0});
    if (it != completedEnds.end())
      accepted = std::find(it->second.begin(), it->second.end(), n) != it->second.end();
  }
  if (n == 0 || !accepted) {
    int furthest = 0;
    for (int i = 0; i <= n; ++i)
      if (!chart[i].empty()) furthest = i;
    if (furthest < n)
      throw NoParseError("input does not parse: blocked at token " + std::to_string(furthest) +
                             " ('" + input.tokens[furthest] + "')",
                         furthest, input.tokens[furthest]);
    throw NoParseError("input does not parse: all " + std::to_string(n) +
                           " tokens consumed without completing '" + symbolNames_[startId_] + "'",
                       static_cast<std::size_t>(n), "");
  }

  for (auto& [k, v] : completedEnds) std::sort(v.begin(), v.end());

  ParseForest forest;
  forest.input_ = input;
  std::map<std::tuple<int, int, int>, int> memo;

  // Builds the packed node for (nt, i, j); recursion terminates because
  // spans shrink except along unit chains, which are acyclic by validation.
  auto ensure = [&](auto&& self, int nt, int i, int j) -> int {
    auto mkey = std::make_tuple(nt, i, j);
    auto found = memo.find(mkey);
    if (found != memo.end()) return found->second;
    int nodeIdx = static_cast<int>(forest.nodes_.size());
    memo.emplace(mkey, nodeIdx);
    forest.nodes_.emplace_back();
    forest.nodes_[nodeIdx].symbol = symbolNames_[nt];
    forest.nodes_[nodeIdx].begin = i;
    forest.nodes_[nodeIdx].end = j;

    std::vector<ParseForest::Family> families;
    for (int p : prodsByHead_[nt]) {
      const Prod& prod = prods_[p];
      std::vector<ParseForest::Child> acc;
      auto cover = [&](auto&& rec, int r, int k) -> void {
        if (r == static_cast<int>(prod.rhs.size())) {
          if (k == j) {
            ParseForest::Family fam;
            fam.kind = prod.kind;
            fam.ruleIndex = prod.ruleIndex;
            fam.children = acc;
            families.push_back(std::move(fam));
          }
          return;
        }
        int minRemaining = static_cast<int>(prod.rhs.size()) - r - 1;
        const PItem& it = prod.rhs[r];
        if (it.terminal) {
          if (k < j && input.tokens[k] == it.text) {
            ParseForest::Child c;
            c.leaf = true;
            c.pos = k;
            acc.push_back(c);
            rec(rec, r + 1, k + 1);
            acc.pop_back();
          }
          return;
        }
        auto ends = completedEnds.find({it.nt, k});
        if (ends == completedEnds.end()) return;
        for (int l : ends->second) {
          if (l > j - minRemaining) break;
          ParseForest::Child c;
          c.node = self(self, it.nt, k, l);
          acc.push_back(c);
          rec(rec, r + 1, l);
          acc.pop_back();
        }
      };
      cover(cover, 0, i);
    }
    if (nt == entityId_ && j == i + 1 && input.isEntity(i)) {
      ParseForest::Family fam;
      fam.kind = ParseTree::Kind::Entity;
      ParseForest::Child c;
      c.leaf = true;
      c.pos = i;
      fam.children.push_back(c);
      families.push_back(std::move(fam));
    }

    std::uint64_t total = 0;
    for (const auto& f : families) {
      std::uint64_t combos = 1;
      for (const auto& c : f.children)
        combos = sat_mul(combos, c.leaf ? 1 : forest.nodes_[c.node].derivations);
      total = sat_add(total, combos);
    }
    forest.nodes_[nodeIdx].families = std::move(families);
    forest.nodes_[nodeIdx].derivations = total;
    return nodeIdx;
  };

  forest.root_ = ensure(ensure, startId_, 0, n);
  return forest;
}

int Parser::symbolId(const std::string& name) const {
  for (int i = 0; i < static_cast<int>(symbolNames_.size()); ++i)
    if (symbolNames_[i] == name) return i;
  return -1;
}

ParseForest parse(const GrammarSpec& spec, const TokenSequence& input) {
  return Parser(spec).parse(input);
}

AmbiguityReport ambiguity_report(const GrammarSpec& spec,
                                 const std::vector<std::string>& patterns) {
  Parser parser(spec);
  AmbiguityReport report;
  for (const auto& p : patterns) {
    AmbiguityRow row;
    row.pattern = p;
    try {
      auto forest = parser.parse(tokenize(p));
      row.derivations = forest.count();
      if (row.derivations > 1) ++report.ambiguous;
    } catch (const DataError& e) {
      row.diagnostic = e.what();
      ++report.failed;
    }
    report.rows.push_back(std::move(row));
  }
  if (!report.rows.empty())
    report.ambiguousShare =
        static_cast<double>(report.ambiguous) / static_cast<double>(report.rows.size());
  return report;
}

}  // namespace scfgt
