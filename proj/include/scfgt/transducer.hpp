#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "scfgt/grammar.hpp"
#include "scfgt/parser.hpp"

namespace scfgt {

/// A target-side token, tagged with where it came from. Entity tokens pass
/// through the transducer untouched and control spacing in CJK output.
struct TargetToken {
  enum class Origin { Lexicon, RuleLiteral, Entity, PostRule };
  std::string text;
  Origin origin = Origin::RuleLiteral;
  EntityKind entityKind = EntityKind::None;
};

struct TargetSequence {
  std::vector<TargetToken> tokens;
  std::vector<std::string> texts() const;
};

/// Emits the target side of one derivation. Lexicon lookups are by exact
/// preterminal tag and source span; a missing entry raises LexiconGapError
/// rather than falling back to any other tag.
TargetSequence transduce(const GrammarSpec& spec, const ParseTree& tree);

/// Applies token-level rewrite rules in ascending rank, one left-to-right
/// pass per rule; replacements are not rescanned by the rule that produced
/// them. "*" matches one token, "**" matches zero or more (shortest match).
TargetSequence apply_post_rules(const GrammarSpec& spec, TargetSequence seq);

/// Joins tokens into a surface string. The cjk policy concatenates without
/// separators but keeps single spaces around entity tokens.
std::string detokenize(const TargetSequence& seq, DetokPolicy policy);

std::uint64_t splitmix64(std::uint64_t x);

/// Deterministic candidate pick for ambiguous inputs: depends only on the
/// seed, the record index and the candidate count.
std::uint64_t pick_candidate(std::uint64_t seed, std::uint64_t recordIndex, std::uint64_t count);

struct Translation {
  TargetSequence sequence;       // after post rules, before detokenization
  std::uint64_t candidateCount = 0;
  std::uint64_t candidateIndex = 0;
};

/// parse + pick + transduce + post rules for one source pattern.
Translation translate_tokens(const Parser& parser, const GrammarSpec& spec,
                             const TokenSequence& input, std::uint64_t seed,
                             std::uint64_t recordIndex);

Translation translate_pattern(const GrammarSpec& spec, std::string_view pattern,
                              std::uint64_t seed, std::uint64_t recordIndex);

}  // namespace scfgt
