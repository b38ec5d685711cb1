#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "scfgt/metrics.hpp"

using namespace scfgt;

namespace {

struct AnchorCase {
  std::vector<std::string> hyps;
  std::vector<std::string> refs;
  double expected;
};

// Scores computed by a separate implementation written directly from the
// metric's definition (clipped counts summed over the corpus, geometric
// mean of four precisions, exponential brevity penalty).
const std::vector<AnchorCase>& anchors() {
  static const std::vector<AnchorCase> cases = {
    {{"ran fast loud mat ran ran cat the bird cat ran", "the loud ran tall sang the sang song loud bird tall cat on", "on on flew sat dog loud flew ran dog flew fast dog a"}, {"ran fast loud mat ran ran cat the bird cat ran", "the loud ran tall sang the sang song loud bird tall cat on", "on on flew sat loud flew ran dog flew a fast dog a"}, 86.429921},
    {{"mat tall home song ran ran song sang the sat a", "home bird flew ran flew song home song fast cat sat", "cat bird sang tall bird the fast mat song"}, {"mat tall home song ran ran flew song sang the sat fast", "home bird flew ran flew song home song fast cat sat", "cat bird sang tall bird the fast mat song"}, 86.839506},
    {{"home loud dog song on home tall tree the", "fast a sang ran tree tree sat sat sang fast tall home fast a", "tree home loud fast fast mat home on cat dog loud the"}, {"home loud fast dog song on home tree the", "fast a sang ran tree tree sat sang fast tall home fast a", "tree home loud fast fast mat home on cat dog loud the"}, 81.132423},
    {{"cat song song cat fast fast loud loud ran tree sang tree on", "a a home over home sang tree tree bird flew"}, {"cat song song cat fast fast loud loud ran tree sang tree on", "a a home over fast home sang tree tree bird flew"}, 87.632240},
    {{"loud on fast flew dog mat over on over ran bird the", "tree sat ran ran tall bird the song on ran ran over over", "bird tree the sat tree a flew on dog the dog flew"}, {"loud on fast flew on mat over on over ran bird the", "tree sat ran ran tall bird the song on ran ran over over", "bird tree the sat tree a flew on dog the dog flew"}, 91.760410},
    {{"on song fast song fast tree sat song cat", "sat mat tall ran tall over song a flew"}, {"on song fast song fast tree sat song cat", "sat mat tall ran cat a tall over song a flew"}, 78.843609},
    {{"flew song over mat the on song over flew home", "flew home tall fast bird tree on fast dog on fast the tree"}, {"flew song over mat the on song over flew home", "flew home tall fast bird tree fast dog on fast the tree"}, 86.401740},
    {{"sat tree sat cat bird song home home on the over fast", "loud bird over mat on cat song dog", "mat fast fast ran dog a tree dog ran fast song dog bird"}, {"sat tree sat cat bird song home home on the over fast", "loud ran over mat on cat song flew dog", "mat fast fast ran dog a tree dog ran fast song dog bird"}, 88.058864},
    {{"the sang over mat mat loud sat bird fast fast bird", "dog tree cat over fast tall the flew loud flew tall"}, {"the sang over mat mat loud sat fast tall fast bird", "dog tree cat over fast tall the flew loud flew tall"}, 82.943639},
    {{"a over the a bird fast ran sat loud flew flew song", "bird over bird tall tree loud a flew sat loud"}, {"a over the a bird fast ran sat loud flew flew song", "bird on over bird tall tree song loud a flew sat loud"}, 79.076842},
    {{"flew sang bird fast sat tall cat loud on song dog tree home", "over home dog over bird ran fast tall a flew mat"}, {"flew sang loud fast sat tall cat loud on cat dog tree home", "over home dog over bird ran fast tall over flew mat"}, 62.801697},
    {{"flew over cat flew sang sang ran flew tree flew flew on mat", "ran cat home dog tree loud on tall"}, {"flew home cat flew sang sang ran flew tree flew flew on fast", "ran loud cat home dog tree home on tall"}, 63.297678},
    {{"over sang over sang mat home a loud bird", "a tall song fast tall over home ran", "song home fast home cat a dog the tree"}, {"a over sang over sang mat home a loud bird", "sat tall song sat fast tall over home ran", "song home fast home cat a dog the tree"}, 81.984504},
    {{"tall bird tall flew bird on dog sang home ran", "loud tall mat tree ran sat bird loud mat mat tall"}, {"tall bird tall sat bird on dog home ran", "loud tall mat tree ran sat bird loud mat mat tall home"}, 70.461781},
    {{"home loud bird loud fast fast sang sat tall", "sang dog home home bird mat sang tree tall", "the ran on sang tree dog bird cat the tree"}, {"home loud bird sat loud fast fast sang sat sang tall", "sang dog home home bird dog mat sang tree tall", "bird the ran on sang tree dog bird cat the tree"}, 70.176559},
    {{"home loud a bird mat bird over tree bird the dog loud over", "mat cat tree over sat over fast flew a sat tree flew"}, {"home loud a bird over tree bird the dog loud over", "mat cat tree over sat over home flew a sat tree flew"}, 74.046557},
    {{"over on tall dog ran over flew flew ran", "song the mat mat a tree song over fast tree cat the", "song tall home dog sang sang over home tall loud"}, {"over on tall dog ran over flew flew mat", "song the mat mat a the song over tall tree cat the", "song tall sang dog sang sang over tall loud"}, 56.140845},
    {{"cat bird cat dog dog a dog sat", "ran tree the home mat mat a on on mat bird cat mat"}, {"cat bird fast dog dog loud a dog sat", "ran tree the home mat mat a on on mat bird"}, 66.718206},
    {{"loud a tall sang the cat sat song fast flew the", "tree mat tree the home on the song over"}, {"loud home on sang the cat sat song fast flew the", "tree mat tree the home on sang the song"}, 68.427856},
    {{"cat tall song flew a over loud fast the on sat", "over cat a on home ran song a cat cat sat", "loud loud tree sat loud loud sat home on mat sang sat sat tree"}, {"cat tall song flew dog over fast the on sat", "over cat a on home ran song dog a cat cat sat cat", "loud loud tree sat loud loud sat on sang sat sat tree"}, 64.435971},
  };
  return cases;
}

}  // namespace

TEST_CASE("a hypothesis identical to its reference scores exactly 100") {
  std::vector<std::string> corpus = {"a b c d", "the quick brown fox", "M0 的导演"};
  CHECK(corpus_bleu(corpus, corpus) == 100.0);

  // also under character tokenization and other orders
  BleuConfig cjk;
  cjk.tokenization = BleuConfig::Tokenization::CjkChar;
  CHECK(corpus_bleu(corpus, corpus, cjk) == 100.0);
  BleuConfig uni;
  uni.maxOrder = 1;
  CHECK(corpus_bleu(corpus, corpus, uni) == 100.0);
}

TEST_CASE("a single substitution scores the textbook value") {
  // precisions 4/5, 3/4, 2/3, 1/2; equal lengths so no brevity penalty
  double score = corpus_bleu({"a b c d e"}, {"a b c d f"});
  double expected = 100.0 * std::pow((4.0 / 5.0) * (3.0 / 4.0) * (2.0 / 3.0) * (1.0 / 2.0), 0.25);
  CHECK(score == doctest::Approx(expected).epsilon(1e-12));
  CHECK(score == doctest::Approx(66.874030).epsilon(1e-6));

  // with order 1 only the unigram precision remains
  BleuConfig uni;
  uni.maxOrder = 1;
  CHECK(corpus_bleu({"a b c d e"}, {"a b c d f"}, uni) == doctest::Approx(80.0));
}

TEST_CASE("short hypotheses pay the exponential brevity penalty") {
  // every hypothesis n-gram is in the reference, so only length matters
  double score = corpus_bleu({"a b c d e"}, {"a b c d e f g"});
  CHECK(score == doctest::Approx(100.0 * std::exp(1.0 - 7.0 / 5.0)).epsilon(1e-12));
  CHECK(score == doctest::Approx(67.032005).epsilon(1e-6));
  CHECK(score < 100.0);

  // longer hypotheses are not rewarded or penalized for length
  double longer = corpus_bleu({"a b c d e f g"}, {"a b c d e"});
  double expected =
      100.0 * std::pow((5.0 / 7.0) * (4.0 / 6.0) * (3.0 / 5.0) * (2.0 / 4.0), 0.25);
  CHECK(longer == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("matched counts are clipped by the reference") {
  // hyp "a a a b": unigrams clip to 2/4, bigrams 1/3, trigrams 0
  BleuConfig none;
  none.smoothing = BleuConfig::Smoothing::None;
  CHECK(corpus_bleu({"a a a b"}, {"a b b c"}, none) == 0.0);

  BleuConfig eps;  // default smoothing substitutes a tiny precision
  double smoothed = corpus_bleu({"a a a b"}, {"a b b c"}, eps);
  double expected = 100.0 * std::pow((2.0 / 4.0) * (1.0 / 3.0) * 1e-9 * 1e-9, 0.25);
  CHECK(smoothed == doctest::Approx(expected).epsilon(1e-9));
  CHECK(smoothed > 0.0);
  CHECK(smoothed < 0.01);

  // the classic all-the hypothesis: unigram precision clips to 2/7
  CHECK(corpus_bleu({"the the the the the the the"}, {"the cat is on the mat"}, none) == 0.0);
}

TEST_CASE("scores sum counts over the corpus rather than averaging sentences") {
  // pair 1 is perfect, pair 2 is disjoint; pooled counts give a positive
  // unigram precision of 4/8 and bigram 3/7, unlike any per-sentence average
  BleuConfig uni;
  uni.maxOrder = 1;
  double pooled = corpus_bleu({"a b c d", "x y z w"}, {"a b c d", "p q r s"}, uni);
  CHECK(pooled == doctest::Approx(50.0));
}

TEST_CASE("twenty mutated corpora agree with the independent reference") {
  for (const auto& c : anchors()) {
    double score = corpus_bleu(c.hyps, c.refs);
    CHECK(std::fabs(score - c.expected) < 0.01);
  }
}

TEST_CASE("degenerate corpora are rejected or score zero") {
  CHECK_THROWS_AS(corpus_bleu({"a"}, {"a", "b"}), DataError);
  CHECK_THROWS_AS(corpus_bleu({}, {}), DataError);
  BleuConfig bad;
  bad.maxOrder = 0;
  CHECK_THROWS_AS(corpus_bleu({"a"}, {"a"}, bad), DataError);

  // empty hypothesis text has no tokens to score
  CHECK(corpus_bleu({""}, {"a b"}) == 0.0);
}

TEST_CASE("character tokenization splits cjk text but keeps other runs whole") {
  using Tok = BleuConfig::Tokenization;
  CHECK(bleu_tokens("M0 的导演", Tok::CjkChar) ==
        std::vector<std::string>{"M0", "的", "导", "演"});
  CHECK(bleu_tokens("M0 的导演", Tok::Whitespace) == std::vector<std::string>{"M0", "的导演"});
  CHECK(bleu_tokens("abc的def", Tok::CjkChar) == std::vector<std::string>{"abc", "的", "def"});
  CHECK(bleu_tokens("編集します", Tok::CjkChar) ==
        std::vector<std::string>{"編", "集", "し", "ま", "す"});
  CHECK(bleu_tokens("plain latin words", Tok::CjkChar) ==
        std::vector<std::string>{"plain", "latin", "words"});
  CHECK(bleu_tokens("", Tok::CjkChar).empty());

  // segmentation-insensitive scoring: spaced and fused renderings of the
  // same characters are identical under character tokenization
  BleuConfig cjk;
  cjk.tokenization = BleuConfig::Tokenization::CjkChar;
  CHECK(corpus_bleu({"M0 的 导 演"}, {"M0 的导演"}, cjk) == 100.0);
}

TEST_CASE("exact match normalizes whitespace and nothing else") {
  CHECK(exact_match({"a b", "c d"}, {"a b", "c d"}) == 1.0);
  CHECK(exact_match({" a  b ", "c d"}, {"a b", "x"}) == 0.5);
  CHECK(exact_match({"A"}, {"a"}) == 0.0);  // case matters
  CHECK(exact_match({"ASK WHERE lb rb"}, {"ASK  WHERE  lb  rb"}) == 1.0);
  CHECK_THROWS_AS(exact_match({"a"}, {}), DataError);
  CHECK_THROWS_AS(exact_match({}, {}), DataError);

  double v = exact_match({"a", "b", "c", "d"}, {"a", "x", "c", "y"});
  CHECK(v == doctest::Approx(0.5));
}
