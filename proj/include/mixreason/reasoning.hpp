#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "mixreason/backbone.hpp"
#include "mixreason/seq2seq.hpp"
#include "mixreason/text.hpp"

namespace mixreason {

struct GeneratedEvent {
  std::string text;
  double log_prob = 0.0;
  std::size_t latent = 0;

  friend bool operator==(const GeneratedEvent&, const GeneratedEvent&) = default;
};

// Events z_0..z_T reached from a context by repeatedly applying one relation.
struct ReasoningPath {
  std::vector<std::string> events;
  std::vector<double> hop_log_probs;
  std::vector<std::size_t> latents;
  double total_log_prob = 0.0;

  const std::string& last_event() const { return events.back(); }
  friend bool operator==(const ReasoningPath&, const ReasoningPath&) = default;
};

struct ReasonConfig {
  std::size_t hops = 1;        // T; T = 0 means only z_0
  std::size_t latents = 1;     // K components to pool
  std::size_t beam = 10;       // token-level beam per latent
  std::size_t top_paths = 10;  // path-level beam kept after each hop
  std::size_t max_len = 15;    // generated tokens per event, EOS included
};

// Beam search under each latent k < K, pooled, deduplicated by decoded text
// (keeping the best log-prob, then the smaller k), sorted by log-prob
// descending with ties broken by text.
std::vector<GeneratedEvent> generate_hop(const Seq2SeqModel& model, const Vocab& vocab,
                                         std::span<const std::string> text, Relation r, std::size_t latents,
                                         std::size_t beam, std::size_t max_len);

// z_0 is generated from the context; every later hop conditions only on the
// previous event and r. After each hop the best top_paths paths survive.
std::vector<ReasoningPath> reason(const Seq2SeqModel& model, const Vocab& vocab, std::span<const std::string> context,
                                  Relation r, const ReasonConfig& config);

inline std::vector<ReasoningPath> reason(const BackboneModel& model, std::span<const std::string> context,
                                         Relation r, const ReasonConfig& config) {
  return reason(model, model.vocab(), context, r, config);
}

// Path order: total log-prob descending, then events lexicographically.
bool path_before(const ReasoningPath& a, const ReasoningPath& b);

}  // namespace mixreason
