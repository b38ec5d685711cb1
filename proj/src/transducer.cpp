#include "scfgt/transducer.hpp"

#include <algorithm>
#include <optional>

#include "scfgt/text.hpp"

namespace scfgt {

std::vector<std::string> TargetSequence::texts() const {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(t.text);
  return out;
}

namespace {

void emit_tree(const GrammarSpec& spec, const ParseTree& tree, TargetSequence& out) {
  switch (tree.kind) {
    case ParseTree::Kind::Entity: {
      TargetToken t;
      t.text = tree.children.empty() ? tree.symbol : tree.children[0].symbol;
      t.origin = TargetToken::Origin::Entity;
      t.entityKind = tree.entityKind;
      out.tokens.push_back(std::move(t));
      return;
    }
    case ParseTree::Kind::Lex: {
      const LexEntry* entry = nullptr;
      if (tree.ruleIndex >= 0 && tree.ruleIndex < static_cast<int>(spec.lexicon.size())) {
        entry = &spec.lexicon[tree.ruleIndex];
      } else {
        // Trees built by hand carry no lexicon index; look the span up.
        std::string source = text::join(tree.yieldTokens(), " ");
        for (const auto& e : spec.lexicon)
          if (e.tag.full() == tree.symbol && e.source == source) {
            entry = &e;
            break;
          }
        if (!entry)
          throw LexiconGapError("no lexicon entry for tag '" + tree.symbol + "' over \"" +
                                    source + "\"",
                                tree.symbol, source);
      }
      for (const auto& tok : entry->targetTokens) {
        TargetToken t;
        t.text = tok;
        t.origin = TargetToken::Origin::Lexicon;
        out.tokens.push_back(std::move(t));
      }
      return;
    }
    case ParseTree::Kind::Rule: {
      if (tree.ruleIndex < 0 || tree.ruleIndex >= static_cast<int>(spec.rules.size()))
        throw DataError("derivation references an unknown rule");
      const SyncRule& rule = spec.rules[tree.ruleIndex];
      if (tree.children.size() != rule.sourceRhs.size())
        throw DataError("derivation shape does not match rule for '" + rule.head.full() + "'");
      for (const auto& step : rule.plan) {
        if (step.isLiteral) {
          TargetToken t;
          t.text = step.text;
          t.origin = TargetToken::Origin::RuleLiteral;
          out.tokens.push_back(std::move(t));
        } else {
          emit_tree(spec, tree.children[step.sourcePos], out);
        }
      }
      return;
    }
    case ParseTree::Kind::Token:
      throw DataError("cannot transduce a bare token node");
  }
}

/// Shortest match of pattern[p..] against tokens starting at position t.
/// Returns the end position of the match in the token stream.
std::optional<std::size_t> match_here(const std::vector<std::string>& pattern, std::size_t p,
                                      const std::vector<TargetToken>& tokens, std::size_t t) {
  if (p == pattern.size()) return t;
  const std::string& item = pattern[p];
  if (item == "**") {
    for (std::size_t take = 0; t + take <= tokens.size(); ++take) {
      auto end = match_here(pattern, p + 1, tokens, t + take);
      if (end) return end;
    }
    return std::nullopt;
  }
  if (t >= tokens.size()) return std::nullopt;
  if (item == "*" || tokens[t].text == item) return match_here(pattern, p + 1, tokens, t + 1);
  return std::nullopt;
}

}  // namespace

TargetSequence transduce(const GrammarSpec& spec, const ParseTree& tree) {
  TargetSequence out;
  emit_tree(spec, tree, out);
  return out;
}

TargetSequence apply_post_rules(const GrammarSpec& spec, TargetSequence seq) {
  std::vector<const PostRule*> rules;
  for (const auto& r : spec.postRules) rules.push_back(&r);
  std::stable_sort(rules.begin(), rules.end(),
                   [](const PostRule* a, const PostRule* b) { return a->rank < b->rank; });

  for (const PostRule* rule : rules) {
    std::vector<TargetToken> out;
    std::size_t i = 0;
    while (i < seq.tokens.size()) {
      auto end = match_here(rule->pattern, 0, seq.tokens, i);
      if (!end) {
        out.push_back(seq.tokens[i]);
        ++i;
        continue;
      }
      for (const auto& rep : rule->replacement) {
        TargetToken t;
        t.text = rep;
        t.origin = TargetToken::Origin::PostRule;
        out.push_back(std::move(t));
      }
      // Zero-width matches must still consume input to guarantee progress.
      if (*end == i) {
        out.push_back(seq.tokens[i]);
        ++i;
      } else {
        i = *end;
      }
    }
    seq.tokens = std::move(out);
  }
  return seq;
}

std::string detokenize(const TargetSequence& seq, DetokPolicy policy) {
  if (policy == DetokPolicy::Whitespace) return text::join(seq.texts(), " ");
  std::string out;
  bool prevEntity = false;
  for (std::size_t i = 0; i < seq.tokens.size(); ++i) {
    const TargetToken& t = seq.tokens[i];
    bool entity = t.origin == TargetToken::Origin::Entity;
    if (i > 0 && (entity || prevEntity)) out.push_back(' ');
    out += t.text;
    prevEntity = entity;
  }
  return out;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t pick_candidate(std::uint64_t seed, std::uint64_t recordIndex,
                             std::uint64_t count) {
  if (count <= 1) return 0;
  return splitmix64(splitmix64(seed) ^ recordIndex) % count;
}

Translation translate_tokens(const Parser& parser, const GrammarSpec& spec,
                             const TokenSequence& input, std::uint64_t seed,
                             std::uint64_t recordIndex) {
  ParseForest forest = parser.parse(input);
  Translation result;
  result.candidateCount = forest.count();
  result.candidateIndex = pick_candidate(seed, recordIndex, result.candidateCount);
  ParseTree tree = forest.tree(result.candidateIndex);
  result.sequence = apply_post_rules(spec, transduce(spec, tree));
  return result;
}

Translation translate_pattern(const GrammarSpec& spec, std::string_view pattern,
                              std::uint64_t seed, std::uint64_t recordIndex) {
  Parser parser(spec);
  return translate_tokens(parser, spec, tokenize(pattern), seed, recordIndex);
}

}  // namespace scfgt
