#pragma once

#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "scfgt/errors.hpp"

namespace scfgt {

enum class SymKind { Nonterminal, Terminal };

/// Grammar symbol. Nonterminals carry a base name plus an ordered suffix
/// list; the rendered name is the concatenation, and identity is the
/// rendered name (a macro-derived V+T equals a plain VT). The coindex is an
/// occurrence annotation used to pair source and target sides, never part
/// of symbol identity.
struct Symbol {
  SymKind kind = SymKind::Nonterminal;
  std::string name;
  std::vector<std::string> suffixes;
  int coindex = 0;

  std::string full() const;
  bool isNonterminal() const { return kind == SymKind::Nonterminal; }

  static Symbol nonterminal(std::string base, std::vector<std::string> sfx = {});
  static Symbol terminal(std::string surface);
};

bool operator==(const Symbol& a, const Symbol& b);

/// One step of the target emission plan: either a literal terminal, or
/// "emit the translation of the linked source constituent at sourcePos".
struct TargetStep {
  bool isLiteral = false;
  std::string text;
  int sourcePos = -1;
};

bool operator==(const TargetStep& a, const TargetStep& b);

/// Synchronous rule with paired right-hand sides. Nonterminal occurrences
/// are linked one-to-one across sides; a source terminal absent from the
/// target side is simply dropped there.
struct SyncRule {
  Symbol head;
  std::vector<Symbol> sourceRhs;
  std::vector<Symbol> targetRhs;
  std::vector<TargetStep> plan;                // one entry per target position
  std::vector<std::pair<int, int>> links;      // (source pos, target pos)
  int line = 0;

  /// 0-based positions of nonterminal occurrences in sourceRhs.
  std::vector<int> sourceNonterminalPositions() const;
};

struct LexEntry {
  Symbol tag;
  std::string source;
  std::string target;
  std::vector<std::string> sourceTokens;
  std::vector<std::string> targetTokens;
  int line = 0;
};

/// Derives a suffixed variant of the single rule headed by baseHead,
/// appending the suffix to the head and to the source occurrences listed in
/// propagateTo (1-based over source nonterminal occurrences) along with
/// their linked target occurrences.
struct SuffixMacro {
  std::string suffix;
  Symbol baseHead;
  std::vector<int> propagateTo;
  int line = 0;
};

/// Token-level rewrite applied after transduction. In patterns, "*" matches
/// exactly one token and "**" matches zero or more (shortest match).
struct PostRule {
  int rank = 0;
  std::vector<std::string> pattern;
  std::vector<std::string> replacement;
  int line = 0;
};

enum class DetokPolicy { Whitespace, Cjk };

struct GrammarSpec {
  Symbol start;
  std::vector<SyncRule> rules;
  std::vector<LexEntry> lexicon;
  std::vector<std::string> suffixes;
  std::vector<SuffixMacro> macros;
  std::vector<PostRule> postRules;
  std::string targetLanguage;
  DetokPolicy detokenizePolicy = DetokPolicy::Whitespace;
  std::string entityClass;
};

bool operator==(const GrammarSpec& a, const GrammarSpec& b);

/// Reads the textual grammar format without expanding macros or validating.
GrammarSpec parse_grammar(std::string_view content);

/// Applies suffix macros in declaration order. Expansion is idempotent:
/// re-deriving an identical rule is a no-op, deriving a conflicting body for
/// an existing head is an error. Each macro adds at most one rule.
GrammarSpec expand_suffixes(GrammarSpec spec);

/// Structural checks: link bijections, nonempty source sides, no cycles of
/// source-unit rules, no duplicate lexicon keys, every reachable
/// nonterminal derivable.
void validate_grammar(const GrammarSpec& spec);

/// parse + expand + validate.
GrammarSpec load_grammar(std::string_view content);
GrammarSpec load_grammar_file(const std::string& path);

/// Canonical textual form; load(serialize(g)) equals g.
std::string serialize_grammar(const GrammarSpec& spec);

}  // namespace scfgt
