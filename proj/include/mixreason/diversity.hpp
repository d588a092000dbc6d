#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "mixreason/text.hpp"

namespace mixreason {

using NGram = std::vector<std::string>;

// Unique contiguous n-token windows; empty when seq is shorter than n.
std::set<NGram> ngram_set(std::span<const std::string> seq, std::size_t n);

inline constexpr std::size_t kMaxOrder = 4;
inline constexpr double kSmoothingEpsilon = 0.1;

// Mean over n = 1..4 of BP * p_n, where p_n is the clipped n-gram precision
// of hyp against ref and a zero match count is replaced by epsilon
// (denominator floored at 1). BP = min(1, exp(1 - |ref|/|hyp|)).
double bleu_smoothing1(std::span<const std::string> hyp, std::span<const std::string> ref);

struct DiversityBreakdown {
  // 1 - |intersection| / |union| per order; empty when the union is empty.
  std::array<std::optional<double>, kMaxOrder> per_n{};
  double value = 0.0;
};

// Averages 1 - |∩| / |∪| over the orders whose union is non-empty.
DiversityBreakdown div_ngram_breakdown(std::span<const Tokens> sequences);
double div_ngram(std::span<const Tokens> sequences);

// 1 - mean over pairs i < j of bleu_smoothing1(seq_i as hypothesis, seq_j as
// reference). Needs at least two sequences.
double div_bleu(std::span<const Tokens> sequences);

}  // namespace mixreason
