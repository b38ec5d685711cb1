#include "scfgt/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "scfgt/text.hpp"

namespace scfgt {

namespace {

constexpr double kEpsilonPrecision = 1e-9;

std::map<std::string, int> ngram_counts(const std::vector<std::string>& toks, int n) {
  std::map<std::string, int> counts;
  if (static_cast<int>(toks.size()) < n) return counts;
  for (std::size_t i = 0; i + n <= toks.size(); ++i) {
    std::string key;
    for (int k = 0; k < n; ++k) {
      if (k) key.push_back('\x1f');
      key += toks[i + k];
    }
    ++counts[key];
  }
  return counts;
}

}  // namespace

std::vector<std::string> bleu_tokens(const std::string& s, BleuConfig::Tokenization tok) {
  auto words = text::split_ws(s);
  if (tok == BleuConfig::Tokenization::Whitespace) return words;
  std::vector<std::string> out;
  for (const auto& w : words) {
    std::string run;
    for (char32_t cp : text::decode_utf8(w)) {
      if (text::is_cjk(cp)) {
        if (!run.empty()) {
          out.push_back(run);
          run.clear();
        }
        std::string one;
        text::append_utf8(one, cp);
        out.push_back(std::move(one));
      } else {
        text::append_utf8(run, cp);
      }
    }
    if (!run.empty()) out.push_back(std::move(run));
  }
  return out;
}

double corpus_bleu(const std::vector<std::string>& hypotheses,
                   const std::vector<std::string>& references, const BleuConfig& config) {
  if (hypotheses.size() != references.size())
    throw DataError("hypothesis and reference counts differ: " +
                    std::to_string(hypotheses.size()) + " vs " +
                    std::to_string(references.size()));
  if (hypotheses.empty()) throw DataError("empty corpus");
  if (config.maxOrder < 1) throw DataError("ngram order must be positive");

  const int N = config.maxOrder;
  std::vector<double> matched(N, 0.0), possible(N, 0.0);
  long long hypLen = 0, refLen = 0;

  for (std::size_t i = 0; i < hypotheses.size(); ++i) {
    auto hyp = bleu_tokens(hypotheses[i], config.tokenization);
    auto ref = bleu_tokens(references[i], config.tokenization);
    hypLen += static_cast<long long>(hyp.size());
    refLen += static_cast<long long>(ref.size());
    for (int n = 1; n <= N; ++n) {
      auto hc = ngram_counts(hyp, n);
      auto rc = ngram_counts(ref, n);
      for (const auto& [gram, count] : hc) {
        auto it = rc.find(gram);
        if (it != rc.end()) matched[n - 1] += std::min(count, it->second);
      }
      if (static_cast<int>(hyp.size()) >= n)
        possible[n - 1] += static_cast<double>(hyp.size() - n + 1);
    }
  }

  if (hypLen == 0) return 0.0;

  double logSum = 0.0;
  bool perfect = true;
  for (int n = 0; n < N; ++n) {
    double p = possible[n] > 0 ? matched[n] / possible[n] : 0.0;
    if (p <= 0.0) {
      if (config.smoothing == BleuConfig::Smoothing::None) return 0.0;
      p = kEpsilonPrecision;
    }
    if (p < 1.0) perfect = false;
    logSum += std::log(p);
  }

  double brevity = 1.0;
  if (hypLen < refLen) {
    brevity = std::exp(1.0 - static_cast<double>(refLen) / static_cast<double>(hypLen));
    perfect = false;
  }
  if (perfect) return 100.0;
  return 100.0 * brevity * std::exp(logSum / N);
}

double exact_match(const std::vector<std::string>& predictions,
                   const std::vector<std::string>& references) {
  if (predictions.size() != references.size())
    throw DataError("prediction and reference counts differ: " +
                    std::to_string(predictions.size()) + " vs " +
                    std::to_string(references.size()));
  if (predictions.empty()) throw DataError("empty corpus");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i)
    if (text::collapse_ws(predictions[i]) == text::collapse_ws(references[i])) ++hits;
  return static_cast<double>(hits) / static_cast<double>(predictions.size());
}

}  // namespace scfgt
