#pragma once

#include <string>
#include <vector>

#include "scfgt/errors.hpp"

namespace scfgt {

struct BleuConfig {
  int maxOrder = 4;
  enum class Smoothing { None, Epsilon } smoothing = Smoothing::Epsilon;
  enum class Tokenization { Whitespace, CjkChar } tokenization = Tokenization::Whitespace;
};

/// Corpus-level score on a 0..100 scale: clipped n-gram precisions up to
/// maxOrder, geometric mean, exponential brevity penalty. With Epsilon
/// smoothing a zero precision becomes a tiny constant instead of zeroing
/// the whole score. CjkChar tokenization splits CJK text into single
/// codepoints while keeping Latin and placeholder runs whole, so scores are
/// meaningful for unsegmented output. A perfect hypothesis scores exactly
/// 100.
double corpus_bleu(const std::vector<std::string>& hypotheses,
                   const std::vector<std::string>& references, const BleuConfig& config = {});

/// Tokens a string contributes to BLEU under the given policy.
std::vector<std::string> bleu_tokens(const std::string& s, BleuConfig::Tokenization tok);

/// Fraction of pairs equal after whitespace normalization (trim + collapse).
double exact_match(const std::vector<std::string>& predictions,
                   const std::vector<std::string>& references);

}  // namespace scfgt
