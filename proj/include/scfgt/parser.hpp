#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "scfgt/grammar.hpp"

namespace scfgt {

enum class EntityKind { None, Mod, Bracketed };

/// Tokenized question pattern. Placeholders like M0 and bracketed surface
/// forms like "[Erika Mann]" each occupy a single token; the entity span
/// list records which positions those are.
struct TokenSequence {
  std::vector<std::string> tokens;
  struct Span {
    int index = 0;
    EntityKind kind = EntityKind::None;
  };
  std::vector<Span> entitySpans;

  EntityKind entityKindAt(int i) const;
  bool isEntity(int i) const { return entityKindAt(i) != EntityKind::None; }
};

/// Whitespace tokenization with two twists: tokens from '[' up to the next
/// ']' collapse into one bracketed-entity token, and M<digit> tokens are
/// marked as placeholder entities. Unbalanced brackets are an error.
TokenSequence tokenize(std::string_view pattern);

struct ParseTree {
  enum class Kind { Rule, Lex, Entity, Token };
  Kind kind = Kind::Token;
  std::string symbol;       // nonterminal name, or token text for Kind::Token
  int ruleIndex = -1;       // index into GrammarSpec rules or lexicon
  int begin = 0, end = 0;   // token span
  EntityKind entityKind = EntityKind::None;
  std::vector<ParseTree> children;

  std::vector<std::string> yieldTokens() const;
};

/// Packed parse forest over one input. Derivations are counted without
/// enumeration and extracted in a canonical order: alternatives for a node
/// follow grammar declaration order (phrasal rules, then lexicon entries,
/// then the entity class), split points enumerate left to right, and child
/// combinations vary the last child fastest.
class ParseForest {
 public:
  const TokenSequence& input() const { return input_; }
  std::uint64_t count() const;
  ParseTree tree(std::uint64_t k) const;

 private:
  friend class Parser;
  struct Child {
    bool leaf = false;
    int node = -1;       // inner: forest node index
    int pos = 0;         // leaf: token position
  };
  struct Family {
    ParseTree::Kind kind = ParseTree::Kind::Rule;
    int ruleIndex = -1;
    std::vector<Child> children;
  };
  struct Node {
    std::string symbol;
    int begin = 0, end = 0;
    std::vector<Family> families;
    std::uint64_t derivations = 0;
  };
  TokenSequence input_;
  std::vector<Node> nodes_;
  int root_ = -1;

  ParseTree build(int node, std::uint64_t k) const;
};

/// Chart parser over the source projection of a grammar. Construct once,
/// parse many inputs; const and safe to share across threads.
class Parser {
 public:
  explicit Parser(const GrammarSpec& spec);

  /// Throws NoParseError when the input is outside the source language and
  /// DataError when a token is neither known nor an entity.
  ParseForest parse(const TokenSequence& input) const;

 private:
  struct Item;
  struct PItem {
    bool terminal = false;
    std::string text;   // terminal surface
    int nt = -1;        // nonterminal id
  };
  struct Prod {
    int head = -1;
    std::vector<PItem> rhs;
    ParseTree::Kind kind = ParseTree::Kind::Rule;
    int ruleIndex = -1;
  };

  int symbolId(const std::string& name) const;

  std::vector<std::string> symbolNames_;
  std::vector<Prod> prods_;
  std::vector<std::vector<int>> prodsByHead_;
  std::vector<std::string> vocabulary_;  // sorted terminal tokens
  int startId_ = -1;
  int entityId_ = -1;
};

ParseForest parse(const GrammarSpec& spec, const TokenSequence& input);

struct AmbiguityRow {
  std::string pattern;
  std::uint64_t derivations = 0;
  std::string diagnostic;  // nonempty when the input failed to parse
};

struct AmbiguityReport {
  std::vector<AmbiguityRow> rows;
  std::size_t ambiguous = 0;   // rows with more than one derivation
  std::size_t failed = 0;      // rows that did not parse
  double ambiguousShare = 0.0;
};

AmbiguityReport ambiguity_report(const GrammarSpec& spec,
                                 const std::vector<std::string>& patterns);

}  // namespace scfgt
