#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "scfgt/records.hpp"

using namespace scfgt;

namespace {

std::string fixture(const char* name) { return std::string(SCFGT_FIXTURE_DIR) + "/" + name; }

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string writeTemp(const std::string& name, const std::string& content) {
  std::string path = "/tmp/" + name;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
  return path;
}

struct RunResult {
  int code = -1;
  std::string out;
  std::string err;
};

RunResult run(const std::string& args) {
  static int counter = 0;
  std::string outFile = "/tmp/scfgt_cli_stdout_" + std::to_string(++counter);
  std::string errFile = "/tmp/scfgt_cli_stderr_" + std::to_string(counter);
  std::string cmd =
      std::string(SCFGT_TOOL_PATH) + " " + args + " >" + outFile + " 2>" + errFile;
  int status = std::system(cmd.c_str());
  RunResult r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(outFile);
  r.err = slurp(errFile);
  return r;
}

std::string translateCmd(const std::string& out, const std::string& extra = "") {
  return "translate --grammar " + fixture("fixture_zh.scfg") + " --in " +
         fixture("corpus.jsonl") + " --labels " + fixture("labels.tsv") + " --out " + out +
         (extra.empty() ? "" : " " + extra);
}

// one canonical translated corpus many cases below reuse
const std::string& translatedPath() {
  static std::string path = [] {
    std::string p = "/tmp/scfgt_cli_translated.jsonl";
    RunResult r = run(translateCmd(p));
    REQUIRE(r.code == 0);
    REQUIRE(r.err.find("translated 200/200 records (8 ambiguous, 0 lexicon gaps, "
                       "0 unparsed)") != std::string::npos);
    return p;
  }();
  return path;
}

}  // namespace

TEST_CASE("translate output is byte-identical across runs and worker counts") {
  std::string again = "/tmp/scfgt_cli_translated_again.jsonl";
  std::string wide = "/tmp/scfgt_cli_translated_w8.jsonl";
  REQUIRE(run(translateCmd(again)).code == 0);
  REQUIRE(run(translateCmd(wide, "--workers 8")).code == 0);
  CHECK(slurp(again) == slurp(translatedPath()));
  CHECK(slurp(wide) == slurp(translatedPath()));
}

TEST_CASE("changing the seed changes only ambiguous records") {
  auto base = read_records(translatedPath());
  REQUIRE(base.size() == 200);

  // the corpus was built so exactly these records parse two ways
  std::set<std::string> ambiguousIds;
  for (int id = 80; id <= 87; ++id) ambiguousIds.insert(std::to_string(id));

  bool someSeedDiffers = false;
  for (int seed = 1; seed <= 5; ++seed) {
    std::string path = "/tmp/scfgt_cli_translated_seed" + std::to_string(seed) + ".jsonl";
    REQUIRE(run(translateCmd(path, "--seed " + std::to_string(seed))).code == 0);
    auto seeded = read_records(path);
    REQUIRE(seeded.size() == base.size());
    for (std::size_t i = 0; i < base.size(); ++i) {
      if (base[i].translations.at("zh") == seeded[i].translations.at("zh")) continue;
      someSeedDiffers = true;
      CHECK(ambiguousIds.count(base[i].id) == 1);
    }
  }
  CHECK(someSeedDiffers);
}

TEST_CASE("translate fails on unparseable input unless told to skip") {
  std::string good =
      R"({"id":"ok","questionPatternModEntities":"Did M0 direct M1",)"
      R"("questionWithBrackets":"Did [Silver Harbor] direct [Paper Lantern]",)"
      R"("sparqlPatternModEntities":"ASK WHERE { M0 wdt:P57 M1 }",)"
      R"("sparql":"ASK WHERE { wd:Q9001 wdt:P57 wd:Q9003 }"})";
  std::string bad =
      R"({"id":"mystery","questionPatternModEntities":"How many moons",)"
      R"("questionWithBrackets":"How many moons",)"
      R"("sparqlPatternModEntities":"ASK WHERE { }","sparql":"ASK WHERE { }"})";
  std::string in = writeTemp("scfgt_cli_mixed.jsonl", good + "\n" + bad + "\n");

  std::string args = "translate --grammar " + fixture("fixture_zh.scfg") + " --in " + in +
                     " --out /tmp/scfgt_cli_mixed_out.jsonl";
  RunResult strict = run(args);
  CHECK(strict.code == 1);
  CHECK(strict.err.find("mystery") != std::string::npos);

  RunResult lax = run(args + " --skip-unparsed");
  CHECK(lax.code == 0);
  CHECK(lax.err.find("skipped mystery") != std::string::npos);
  CHECK(lax.err.find("translated 1/2 records (0 ambiguous, 0 lexicon gaps, 1 unparsed)") !=
        std::string::npos);
  auto out = read_records("/tmp/scfgt_cli_mixed_out.jsonl");
  REQUIRE(out.size() == 2);
  CHECK(out[0].translations.count("zh") == 1);
  CHECK(out[1].translations.count("zh") == 0);
}

TEST_CASE("stats prints the distinct-count table") {
  RunResult r = run("stats --in " + translatedPath() +
                    " --lang en --lang zh --json /tmp/scfgt_cli_stats.json");
  REQUIRE(r.code == 0);
  CHECK(r.out ==
        "records           200\n"
        "unique questions  200\n"
        "unique queries    200\n"
        "query patterns    199\n"
        "lang  patterns  paired  delta\n"
        "en  200  200  0\n"
        "zh  198  199  1\n");

  auto j = nlohmann::ordered_json::parse(slurp("/tmp/scfgt_cli_stats.json"));
  CHECK(j["records"] == 200);
  CHECK(j["languages"][1]["lang"] == "zh");
  CHECK(j["languages"][1]["questionPatterns"] == 198);
  CHECK(j["languages"][1]["delta"] == 1);

  // with no --lang the translated languages are discovered
  RunResult all = run("stats --in " + translatedPath());
  CHECK(all.code == 0);
  CHECK(all.out.find("zh  198  199  1\n") != std::string::npos);
}

TEST_CASE("overlap reports per split and language") {
  RunResult r = run("overlap --in " + translatedPath() + " --splits " + fixture("splits") +
                    " --split mcd1 --lang zh");
  REQUIRE(r.code == 0);
  CHECK(r.out ==
        "split mcd1 lang zh: 1 overlapping pattern(s), 1 consistent, 0 conflicting\n"
        "  [consistent]  M0 的导演编辑了 M1 吗\n");

  RunResult r2 = run("overlap --in " + translatedPath() + " --splits " + fixture("splits") +
                     " --split mcd2 --lang zh");
  REQUIRE(r2.code == 0);
  CHECK(r2.out ==
        "split mcd2 lang zh: 2 overlapping pattern(s), 1 consistent, 1 conflicting\n"
        "  [consistent]  M0 的导演编辑了 M1 吗\n"
        "  [conflicting] M2 的创始人编辑了 M3 吗\n");

  // without --split every manifest in the directory is audited
  RunResult all = run("overlap --in " + translatedPath() + " --splits " + fixture("splits") +
                      " --json /tmp/scfgt_cli_overlap.json");
  REQUIRE(all.code == 0);
  CHECK(all.out ==
        "split mcd1 lang en: 0 overlapping pattern(s), 0 consistent, 0 conflicting\n"
        "split mcd2 lang en: 0 overlapping pattern(s), 0 consistent, 0 conflicting\n");
  auto j = nlohmann::ordered_json::parse(slurp("/tmp/scfgt_cli_overlap.json"));
  REQUIRE(j.is_array());
  REQUIRE(j.size() == 2);
  CHECK(j[0]["split"] == "mcd1");
  CHECK(j[0]["overlapping"] == 0);
}

TEST_CASE("bleu prints a two-decimal score") {
  std::string hyp = writeTemp("scfgt_cli_hyp.txt", "a b c d e\n");
  std::string ref = writeTemp("scfgt_cli_ref.txt", "a b c d f\n");
  RunResult r = run("bleu --hyp " + hyp + " --ref " + ref);
  REQUIRE(r.code == 0);
  CHECK(r.out == "BLEU = 66.87\n");

  RunResult perfect = run("bleu --hyp " + hyp + " --ref " + hyp);
  CHECK(perfect.out == "BLEU = 100.00\n");

  // character tokenization scores fused and spaced text as equal
  std::string zhHyp = writeTemp("scfgt_cli_hyp_zh.txt", "M0 的 导 演\n");
  std::string zhRef = writeTemp("scfgt_cli_ref_zh.txt", "M0 的导演\n");
  RunResult cjk = run("bleu --hyp " + zhHyp + " --ref " + zhRef + " --tokenization cjkchar");
  CHECK(cjk.out == "BLEU = 100.00\n");

  CHECK(run("bleu --hyp " + hyp + " --ref " + ref + " --tokenization bytes").code == 1);
}

TEST_CASE("em prints a four-decimal rate") {
  std::string hyp = writeTemp("scfgt_cli_em_hyp.txt", "a b\nx\n");
  std::string ref = writeTemp("scfgt_cli_em_ref.txt", "a  b\ny\n");
  RunResult r = run("em --hyp " + hyp + " --ref " + ref);
  REQUIRE(r.code == 0);
  CHECK(r.out == "EM = 0.5000\n");
}

TEST_CASE("rir converts between query text and the reversible form") {
  std::string queries = writeTemp(
      "scfgt_cli_rir_in.txt",
      "SELECT DISTINCT ?x0 WHERE { M0 wdt:P453 ?x0 . ?x0 wdt:P27 wd:Q148 }\n"
      "ASK WHERE { M0 wdt:P57 M1 }\n");
  RunResult to = run("rir --mode to --in " + queries);
  REQUIRE(to.code == 0);
  CHECK(to.out ==
        "SELECT DISTINCT ?x0 WHERE lb ( M0 ( wdt:P453 ) ( ?x0 ) ) . "
        "( ?x0 ( wdt:P27 ) ( wd:Q148 ) ) rb\n"
        "ASK WHERE lb ( M0 ( wdt:P57 ) ( M1 ) ) rb\n");

  std::string rirFile = writeTemp("scfgt_cli_rir_back.txt", to.out);
  RunResult from = run("rir --mode from --in " + rirFile);
  REQUIRE(from.code == 0);
  CHECK(from.out ==
        "SELECT DISTINCT ?x0 WHERE { M0 wdt:P453 ?x0 . ?x0 wdt:P27 wd:Q148}\n"
        "ASK WHERE { M0 wdt:P57 M1}\n");

  std::string bad = writeTemp("scfgt_cli_rir_bad.txt", "DESCRIBE wd:Q1\n");
  RunResult err = run("rir --mode to --in " + bad);
  CHECK(err.code == 1);
  CHECK(err.err.find("line 1") != std::string::npos);

  CHECK(run("rir --mode sideways --in " + queries).code == 1);
}

TEST_CASE("ground substitutes bindings and can verify stored queries") {
  RunResult r = run("ground --in " + fixture("corpus.jsonl") +
                    " --check --out /tmp/scfgt_cli_grounded.txt");
  REQUIRE(r.code == 0);
  std::string grounded = slurp("/tmp/scfgt_cli_grounded.txt");
  CHECK(grounded.substr(0, grounded.find('\n')) ==
        "ASK WHERE { wd:Q9001 wdt:P57 wd:Q9003}");
  CHECK(std::count(grounded.begin(), grounded.end(), '\n') == 200);

  CHECK(run("ground --in " + fixture("example_record.jsonl") + " --check").code == 0);

  // tampering with a predicate makes the check fail; an entity id would not,
  // because the bindings are re-derived from the stored query itself
  std::string tampered = slurp(fixture("corpus.jsonl"));
  auto at = tampered.find("wdt:P57");
  REQUIRE(at != std::string::npos);
  tampered.replace(at, 7, "wdt:P58");
  std::string path = writeTemp("scfgt_cli_tampered.jsonl", tampered);
  RunResult bad = run("ground --in " + path + " --check --out /dev/null");
  CHECK(bad.code == 1);
  CHECK(bad.err.find("differ") != std::string::npos);
}

TEST_CASE("halluc tabulates watched items among wrong predictions") {
  std::string preds = writeTemp(
      "scfgt_cli_halluc_preds.tsv",
      "0\tzh\tASK WHERE lb ( M0 ( wdt:P57 ) ( M1 ) ) rb\n"       // correct
      "1\tzh\tASK WHERE lb ( M0 ( wdt:P57 ) ( wd:Q148 ) ) rb\n"  // watched item
      "2\tzh\tgarbage prediction\n");                            // malformed
  RunResult r = run("halluc --in " + fixture("corpus.jsonl") + " --preds " + preds +
                    " --watchlist " + fixture("watchlist.tsv") +
                    " --json /tmp/scfgt_cli_halluc.json");
  REQUIRE(r.code == 0);
  CHECK(r.out ==
        "item\tzh\n"
        "Q148 (CN)\t1 (50.00%)\n"
        "Q17 (JP)\t0 (0.00%)\n"
        "others\t0 (0.00%)\n"
        "malformed\t1 (50.00%)\n"
        "wrong\t2\n"
        "total\t3\n");
  auto j = nlohmann::ordered_json::parse(slurp("/tmp/scfgt_cli_halluc.json"));
  CHECK(j["totals"]["zh"] == 3);
  CHECK(j["wrong"]["zh"] == 2);
  CHECK(j["watchlist"]["Q148"]["zh"]["count"] == 1);
}

TEST_CASE("complexity buckets prediction accuracy") {
  std::string preds = writeTemp(
      "scfgt_cli_cx_preds.tsv",
      "0\tzh\tASK WHERE lb ( M0 ( wdt:P57 ) ( M1 ) ) rb\n"   // complexity 4, correct
      "1\tzh\twrong answer entirely\n"                       // complexity 4, wrong
      "10\tzh\talso wrong\n");                               // complexity 6, wrong
  RunResult r = run("complexity --in " + fixture("corpus.jsonl") + " --preds " + preds);
  REQUIRE(r.code == 0);
  CHECK(r.out ==
        "range\ttotal\tcorrect\taccuracy\n"
        "3-5\t2\t1\t50.00%\n"
        "6-8\t1\t0\t0.00%\n");

  RunResult wide = run("complexity --in " + fixture("corpus.jsonl") + " --preds " + preds +
                       " --bucket-size 10");
  CHECK(wide.out ==
        "range\ttotal\tcorrect\taccuracy\n"
        "0-9\t3\t1\t33.33%\n");
}

TEST_CASE("fetch-labels runs offline against the cache") {
  std::string qids = writeTemp("scfgt_cli_qids.txt", "# items\nQ9001\nQ404\n");
  std::string cache = writeTemp("scfgt_cli_cache.tsv", slurp(fixture("labels.tsv")));
  RunResult r = run("fetch-labels --qids " + qids + " --lang zh --labels " + cache);
  REQUIRE(r.code == 0);
  CHECK(r.out ==
        "Q404\toffline\n"
        "Q9001\tcached\tSilver Harbor\n");
  CHECK(r.err.find("resolved 1/2 items (38 cache rows)") != std::string::npos);
  // the cache file is rewritten unchanged
  CHECK(slurp(cache) == slurp(fixture("labels.tsv")));

  // record mode pulls the item ids out of the bindings
  RunResult rec = run("fetch-labels --in " + fixture("corpus.jsonl") + " --lang zh --labels " +
                      cache);
  REQUIRE(rec.code == 0);
  CHECK(rec.err.find("resolved 16/16 items") != std::string::npos);

  CHECK(run("fetch-labels --lang zh --labels " + cache).code == 1);
}

TEST_CASE("validate-grammar reports shape and emits a reloadable form") {
  RunResult r = run("validate-grammar --grammar " + fixture("fixture_zh.scfg"));
  REQUIRE(r.code == 0);
  CHECK(r.err ==
        "grammar ok: 8 rules, 12 lexicon entries, 0 suffixes, 0 macros, 0 post rules\n");

  RunResult inherit = run("validate-grammar --grammar " + fixture("inherit_ja.scfg") +
                          " --emit /tmp/scfgt_cli_emitted.scfg");
  REQUIRE(inherit.code == 0);
  CHECK(inherit.err ==
        "grammar ok: 4 rules, 6 lexicon entries, 1 suffixes, 1 macros, 0 post rules\n");

  // the canonical form loads back to an equivalent grammar
  RunResult again = run("validate-grammar --grammar /tmp/scfgt_cli_emitted.scfg");
  CHECK(again.code == 0);
  CHECK(again.err ==
        "grammar ok: 4 rules, 6 lexicon entries, 1 suffixes, 1 macros, 0 post rules\n");
}

TEST_CASE("failure modes map to distinct exit codes") {
  // usage problems
  CHECK(run("no-such-subcommand").code == 1);
  CHECK(run("translate --in only").code == 1);
  CHECK(run("--help").code == 0);

  // grammar problems
  std::string badGrammar = writeTemp("scfgt_cli_bad.scfg", "start S\nrule S -> \"a\"\n");
  RunResult g = run("validate-grammar --grammar " + badGrammar);
  CHECK(g.code == 2);
  CHECK(g.err.find("error:") != std::string::npos);

  // missing files
  CHECK(run("stats --in /tmp/scfgt_no_such_file.jsonl").code == 3);
  CHECK(run("validate-grammar --grammar /tmp/scfgt_no_such.scfg").code == 3);

  // data problems
  std::string badQuery = writeTemp("scfgt_cli_badq.txt", "HELLO\n");
  CHECK(run("rir --mode to --in " + badQuery).code == 1);
}
