#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mixreason/seq2seq.hpp"

namespace mixreason {

struct Hypothesis {
  TokenIds tokens;  // excludes BOS; ends in EOS unless length-capped
  double log_prob = 0.0;

  bool finished(TokenId eos) const { return !tokens.empty() && tokens.back() == eos; }
  friend bool operator==(const Hypothesis&, const Hypothesis&) = default;
};

// Higher log_prob first, then lexicographically smaller token ids.
bool hypothesis_before(const Hypothesis& a, const Hypothesis& b);

// Length-capped beam search. At each step the top `beam_width` expansions
// survive; those ending in EOS retire into the result pool, the rest stay
// live. Live hypotheses still open after `max_len` tokens are retired as
// capped. Returns at most beam_width hypotheses in hypothesis_before order.
std::vector<Hypothesis> beam_search(const Seq2SeqModel& model, std::span<const TokenId> src, std::size_t beam_width,
                                    std::size_t max_len);

}  // namespace mixreason
