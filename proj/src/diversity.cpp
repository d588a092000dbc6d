#include "mixreason/diversity.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "mixreason/errors.hpp"

namespace mixreason {

std::set<NGram> ngram_set(std::span<const std::string> seq, std::size_t n) {
  if (n < 1) throw BadConfig("ngram order must be >= 1");
  std::set<NGram> out;
  for (std::size_t i = 0; i + n <= seq.size(); ++i) out.emplace(seq.begin() + i, seq.begin() + i + n);
  return out;
}

namespace {

std::map<NGram, std::size_t> ngram_counts(std::span<const std::string> seq, std::size_t n) {
  std::map<NGram, std::size_t> out;
  for (std::size_t i = 0; i + n <= seq.size(); ++i) ++out[NGram(seq.begin() + i, seq.begin() + i + n)];
  return out;
}

}  // namespace

double bleu_smoothing1(std::span<const std::string> hyp, std::span<const std::string> ref) {
  if (hyp.empty() || ref.empty()) throw EmptySequence("BLEU needs non-empty hypothesis and reference");
  const double bp =
      std::min(1.0, std::exp(1.0 - static_cast<double>(ref.size()) / static_cast<double>(hyp.size())));
  double total = 0.0;
  for (std::size_t n = 1; n <= kMaxOrder; ++n) {
    const auto h = ngram_counts(hyp, n);
    const auto r = ngram_counts(ref, n);
    std::size_t matches = 0;
    for (const auto& [g, c] : h) {
      auto it = r.find(g);
      if (it != r.end()) matches += std::min(c, it->second);
    }
    const double denom = static_cast<double>(std::max<std::size_t>(1, hyp.size() >= n ? hyp.size() - n + 1 : 0));
    const double p = matches == 0 ? kSmoothingEpsilon / denom : static_cast<double>(matches) / denom;
    total += bp * p;
  }
  return total / static_cast<double>(kMaxOrder);
}

DiversityBreakdown div_ngram_breakdown(std::span<const Tokens> sequences) {
  if (sequences.empty()) throw TooFewSequences("div_ngram needs at least one sequence");
  DiversityBreakdown out;
  double sum = 0.0;
  std::size_t used = 0;
  for (std::size_t n = 1; n <= kMaxOrder; ++n) {
    std::set<NGram> uni;
    std::set<NGram> inter = ngram_set(sequences.front(), n);
    for (const auto& seq : sequences) {
      auto s = ngram_set(seq, n);
      uni.insert(s.begin(), s.end());
      std::set<NGram> kept;
      std::set_intersection(inter.begin(), inter.end(), s.begin(), s.end(), std::inserter(kept, kept.end()));
      inter = std::move(kept);
    }
    if (uni.empty()) continue;
    const double d = 1.0 - static_cast<double>(inter.size()) / static_cast<double>(uni.size());
    out.per_n[n - 1] = d;
    sum += d;
    ++used;
  }
  if (used == 0) throw AllUnionsEmpty("every sequence is empty");
  out.value = sum / static_cast<double>(used);
  return out;
}

double div_ngram(std::span<const Tokens> sequences) { return div_ngram_breakdown(sequences).value; }

double div_bleu(std::span<const Tokens> sequences) {
  const std::size_t M = sequences.size();
  if (M < 2) throw TooFewSequences("div_bleu needs at least two sequences");
  double s = 0.0;
  for (std::size_t i = 0; i < M; ++i) {
    for (std::size_t j = i + 1; j < M; ++j) s += bleu_smoothing1(sequences[i], sequences[j]);
  }
  return 1.0 - s / (static_cast<double>(M) * static_cast<double>(M - 1) / 2.0);
}

}  // namespace mixreason
