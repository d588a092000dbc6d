#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "mixreason/text.hpp"

namespace mixreason {

// Decoder state after consuming some prefix. `log_probs` is the next-token
// distribution over the whole vocabulary; `memory` is opaque to callers.
struct DecoderState {
  std::vector<double> memory;
  std::vector<double> log_probs;
};

// Step-wise decoding bound to one source sequence.
class DecodeSession {
 public:
  virtual ~DecodeSession() = default;
  // State after consuming BOS.
  virtual DecoderState initial() const = 0;
  virtual DecoderState advance(const DecoderState& state, TokenId token) const = 0;
};

// Anything that can score and generate target sequences given a source.
// The trained backbone implements it, and so do the table-driven stubs the
// search tests use.
class Seq2SeqModel {
 public:
  virtual ~Seq2SeqModel() = default;
  virtual std::size_t vocab_size() const = 0;
  virtual TokenId eos_id() const { return Vocab::kEos; }
  virtual std::unique_ptr<DecodeSession> start(std::span<const TokenId> src) const = 0;
};

// Teacher-forced sum of log-probabilities of tgt[1..] through any model.
// tgt[0] is treated as the already-consumed BOS.
double score_with_sessions(const Seq2SeqModel& model, std::span<const TokenId> src, std::span<const TokenId> tgt);

}  // namespace mixreason
