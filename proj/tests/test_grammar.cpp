#include <doctest.h>

#include <string>

#include "scfgt/grammar.hpp"

using namespace scfgt;

#ifndef SCFGT_FIXTURE_DIR
#error "SCFGT_FIXTURE_DIR must be defined"
#endif

namespace {
std::string fixture(const char* name) { return std::string(SCFGT_FIXTURE_DIR) + "/" + name; }
}  // namespace

TEST_CASE("coordination demo grammar loads with expected shape") {
  auto g = load_grammar_file(fixture("demo_ja.scfg"));
  CHECK(g.start.full() == "VP");
  CHECK(g.targetLanguage == "ja");
  CHECK(g.detokenizePolicy == DetokPolicy::Cjk);
  CHECK(g.rules.size() == 3);
  CHECK(g.lexicon.size() == 5);
  CHECK(g.entityClass.empty());
}

TEST_CASE("epsilon marker on the target side drops the source terminal") {
  auto g = load_grammar_file(fixture("demo_ja.scfg"));
  // andV -> <"and" V, V>: one source terminal, no target literal
  const SyncRule* andv = nullptr;
  for (const auto& r : g.rules)
    if (r.head.full() == "andV") andv = &r;
  REQUIRE(andv != nullptr);
  REQUIRE(andv->sourceRhs.size() == 2);
  CHECK(andv->sourceRhs[0].kind == SymKind::Terminal);
  CHECK(andv->sourceRhs[0].name == "and");
  REQUIRE(andv->targetRhs.size() == 1);
  CHECK(andv->targetRhs[0].full() == "V");
  REQUIRE(andv->plan.size() == 1);
  CHECK_FALSE(andv->plan[0].isLiteral);
}

TEST_CASE("suffix macro derives the inflected rule variant") {
  auto g = load_grammar_file(fixture("inherit_ja.scfg"));
  // 3 declared rules plus the derived DOT rule
  REQUIRE(g.rules.size() == 4);
  const SyncRule* dot = nullptr;
  for (const auto& r : g.rules)
    if (r.head.full() == "DOT") dot = &r;
  REQUIRE(dot != nullptr);
  REQUIRE(dot->sourceRhs.size() == 2);
  CHECK(dot->sourceRhs[0].full() == "VT");
  CHECK(dot->sourceRhs[1].full() == "NP");
  REQUIRE(dot->targetRhs.size() == 2);
  CHECK(dot->targetRhs[0].full() == "NP");
  CHECK(dot->targetRhs[1].full() == "VT");
}

TEST_CASE("macro expansion is idempotent") {
  auto g = load_grammar_file(fixture("inherit_ja.scfg"));
  auto again = expand_suffixes(g);
  CHECK(again == g);
  CHECK(again.rules.size() == g.rules.size());
}

TEST_CASE("suffixed spelling and concatenated spelling are the same symbol") {
  Symbol plus = Symbol::nonterminal("V", {"T"});
  Symbol plain = Symbol::nonterminal("VT");
  CHECK(plus.full() == "VT");
  CHECK(plus == plain);
}

TEST_CASE("all fixture grammars round-trip through the canonical form") {
  for (const char* name : {"demo_ja.scfg", "inherit_ja.scfg", "mini_zh.scfg", "fixture_zh.scfg"}) {
    CAPTURE(name);
    auto g = load_grammar_file(fixture(name));
    auto text = serialize_grammar(g);
    auto back = load_grammar(text);
    CHECK(back == g);
    // serializing again is byte-stable
    CHECK(serialize_grammar(back) == text);
  }
}

TEST_CASE("coindexes pair repeated nonterminals across sides") {
  auto g = load_grammar(
      "lang zh\n"
      "start S\n"
      "rule S -> NP:1 \"x\" NP:2 | NP:2 NP:1\n"
      "lex NP \"a\" => \"A\"\n");
  REQUIRE(g.rules.size() == 1);
  const auto& links = g.rules[0].links;
  REQUIRE(links.size() == 2);
  // source position 0 (NP:1) maps to target position 1; source 2 to target 0
  CHECK(links[0] == std::pair<int, int>(0, 1));
  CHECK(links[1] == std::pair<int, int>(2, 0));
}

TEST_CASE("unique nonterminals link automatically without coindexes") {
  auto g = load_grammar(
      "lang ja\n"
      "start S\n"
      "rule S -> A B | B A\n"
      "lex A \"a\" => \"x\"\n"
      "lex B \"b\" => \"y\"\n");
  const auto& r = g.rules[0];
  REQUIRE(r.links.size() == 2);
  CHECK(r.links[0] == std::pair<int, int>(0, 1));
  CHECK(r.links[1] == std::pair<int, int>(1, 0));
}

TEST_CASE("grammar syntax errors are rejected with line numbers") {
  CHECK_THROWS_AS(parse_grammar("start S\nrule S -> \"a\"\n"), GrammarError);       // missing |
  CHECK_THROWS_AS(parse_grammar("start S\nrule S -> ~ | \"a\"\n"), GrammarError);   // ~ on source
  CHECK_THROWS_AS(parse_grammar("start S\nfrobnicate x\n"), GrammarError);          // unknown directive
  CHECK_THROWS_AS(parse_grammar("start S\nstart T\n"), GrammarError);               // duplicate start
  CHECK_THROWS_AS(parse_grammar("lex V \"unterminated => \"x\"\n"), GrammarError);  // bad quote
  CHECK_THROWS_AS(parse_grammar("start S\nrule S -> A:0 | A:0\n"), GrammarError);   // coindex < 1
  try {
    parse_grammar("start S\n\nrule S -> | \"a\"\n");
    FAIL("expected a grammar error");
  } catch (const GrammarError& e) {
    CHECK(std::string(e.what()).find("3") != std::string::npos);
  }
}

TEST_CASE("side occurrence counts must agree") {
  CHECK_THROWS_AS(parse_grammar("start S\nrule S -> A A | A\n"), GrammarError);
  CHECK_THROWS_AS(parse_grammar("start S\nrule S -> A | B\n"), GrammarError);
}

TEST_CASE("repeated nonterminals require explicit coindexes on both sides") {
  CHECK_THROWS_AS(parse_grammar("start S\nrule S -> A A | A A\n"), GrammarError);
  CHECK_THROWS_AS(parse_grammar("start S\nrule S -> A:1 A:2 | A A\n"), GrammarError);
  CHECK_THROWS_AS(parse_grammar("start S\nrule S -> A:1 A:1 | A:1 A:2\n"), GrammarError);
  CHECK_THROWS_AS(parse_grammar("start S\nrule S -> A:1 A:2 | A:1 A:3\n"), GrammarError);
}

TEST_CASE("validation rejects structural defects") {
  // undeclared suffix
  CHECK_THROWS_AS(load_grammar("start S\nrule S -> A+T | A+T\nlex AT \"a\" => \"x\"\n"),
                  GrammarError);
  // duplicate lexicon key
  CHECK_THROWS_AS(load_grammar("start S\nlex S \"a\" => \"x\"\nlex S \"a\" => \"y\"\n"),
                  GrammarError);
  // cycle of source-unit rules
  CHECK_THROWS_AS(load_grammar("start S\nrule S -> A | A\nrule A -> S | S\n"), GrammarError);
  // reachable nonterminal with no way to derive anything
  CHECK_THROWS_AS(load_grammar("start S\nrule S -> A \"x\" | A\n"), GrammarError);
  // missing start declaration
  CHECK_THROWS_AS(load_grammar("lang ja\nlex S \"a\" => \"x\"\n"), GrammarError);
}

TEST_CASE("self-referential unit rule is rejected while guarded recursion passes") {
  CHECK_THROWS_AS(load_grammar("start S\nrule S -> S | S\n"), GrammarError);
  // recursion through a terminal is fine
  auto g = load_grammar(
      "start S\n"
      "rule S -> \"a\" S | S \"b\"\n"
      "rule S -> \"a\" | \"b\"\n");
  CHECK(g.rules.size() == 2);
}

TEST_CASE("macro errors name the failing condition") {
  const char* base =
      "start S\n"
      "suffix T\n"
      "rule S -> DO | DO\n"
      "rule DO -> V NP | NP V\n"
      "lex V \"v\" => \"x\"\nlex VT \"v\" => \"y\"\nlex NP \"n\" => \"z\"\n";
  // no rule headed by the base symbol
  CHECK_THROWS_WITH_AS(load_grammar(std::string(base) + "inherit T XX propagate 1\n"),
                       doctest::Contains("not found"), GrammarError);
  // occurrence index out of range
  CHECK_THROWS_WITH_AS(load_grammar(std::string(base) + "inherit T DO propagate 3\n"),
                       doctest::Contains("out of range"), GrammarError);
  // base head with two rules is ambiguous
  CHECK_THROWS_WITH_AS(
      load_grammar(std::string(base) + "rule DO -> NP V | V NP\ninherit T DO propagate 1\n"),
      doctest::Contains("ambiguous"), GrammarError);
  // a clashing rule already exists for the derived head
  CHECK_THROWS_WITH_AS(
      load_grammar(std::string(base) +
                   "rule DOT -> NP VT | NP VT\ninherit T DO propagate 1\n"),
      doctest::Contains("already exists"), GrammarError);
}

TEST_CASE("undeclared macro suffix is rejected") {
  CHECK_THROWS_AS(load_grammar("start S\nrule S -> A | A\nlex A \"a\" => \"x\"\n"
                               "inherit T S propagate 1\n"),
                  GrammarError);
}

TEST_CASE("comments and blank lines are ignored") {
  auto g = load_grammar(
      "# leading comment\n"
      "start S   # trailing comment\n"
      "\n"
      "lex S \"a # not a comment\" => \"x\"\n");
  REQUIRE(g.lexicon.size() == 1);
  CHECK(g.lexicon[0].source == "a # not a comment");
}

TEST_CASE("quoted strings support escaped quotes and backslashes") {
  auto g = load_grammar("start S\nlex S \"a \\\"b\\\" \\\\c\" => \"x\"\n");
  CHECK(g.lexicon[0].source == "a \"b\" \\c");
}

TEST_CASE("equality ignores declaration line numbers") {
  auto a = load_grammar("start S\nlex S \"a\" => \"x\"\n");
  auto b = load_grammar("# pad\n\nstart S\n\nlex S \"a\" => \"x\"\n");
  CHECK(a == b);
  auto c = load_grammar("start S\nlex S \"a\" => \"y\"\n");
  CHECK_FALSE(a == c);
}
