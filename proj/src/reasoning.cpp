#include "mixreason/reasoning.hpp"

#include <algorithm>
#include <map>

#include "mixreason/beam_search.hpp"
#include "mixreason/errors.hpp"

namespace mixreason {

std::vector<GeneratedEvent> generate_hop(const Seq2SeqModel& model, const Vocab& vocab,
                                         std::span<const std::string> text, Relation r, std::size_t latents,
                                         std::size_t beam, std::size_t max_len) {
  if (latents < 1) throw BadConfig("generate_hop: K must be >= 1");
  if (beam < 1) throw BadConfig("generate_hop: beam must be >= 1");
  std::map<std::string, GeneratedEvent> best;
  for (std::size_t k = 0; k < latents; ++k) {
    const TokenIds src = encode_source(text, r, k, vocab);
    for (const Hypothesis& h : beam_search(model, src, beam, max_len)) {
      GeneratedEvent ev{join_tokens(decode_ids(h.tokens, vocab)), h.log_prob, k};
      auto [it, fresh] = best.try_emplace(ev.text, ev);
      if (!fresh && ev.log_prob > it->second.log_prob) it->second = ev;
    }
  }
  std::vector<GeneratedEvent> out;
  out.reserve(best.size());
  for (auto& [text_key, ev] : best) out.push_back(std::move(ev));
  std::stable_sort(out.begin(), out.end(), [](const GeneratedEvent& a, const GeneratedEvent& b) {
    if (a.log_prob != b.log_prob) return a.log_prob > b.log_prob;
    return a.text < b.text;
  });
  return out;
}

bool path_before(const ReasoningPath& a, const ReasoningPath& b) {
  if (a.total_log_prob != b.total_log_prob) return a.total_log_prob > b.total_log_prob;
  return a.events < b.events;
}

std::vector<ReasoningPath> reason(const Seq2SeqModel& model, const Vocab& vocab, std::span<const std::string> context,
                                  Relation r, const ReasonConfig& config) {
  if (config.top_paths < 1) throw BadConfig("reason: top_paths must be >= 1");
  auto prune = [&](std::vector<ReasoningPath>& paths) {
    std::sort(paths.begin(), paths.end(), path_before);
    if (paths.size() > config.top_paths) paths.resize(config.top_paths);
  };

  std::vector<ReasoningPath> paths;
  for (auto& ev : generate_hop(model, vocab, context, r, config.latents, config.beam, config.max_len)) {
    paths.push_back(ReasoningPath{{ev.text}, {ev.log_prob}, {ev.latent}, ev.log_prob});
  }
  prune(paths);

  for (std::size_t hop = 1; hop <= config.hops; ++hop) {
    std::vector<ReasoningPath> next;
    for (const ReasoningPath& p : paths) {
      const Tokens prev = tokenize(p.last_event());
      for (auto& ev : generate_hop(model, vocab, prev, r, config.latents, config.beam, config.max_len)) {
        ReasoningPath q = p;
        q.events.push_back(ev.text);
        q.hop_log_probs.push_back(ev.log_prob);
        q.latents.push_back(ev.latent);
        q.total_log_prob = p.total_log_prob + ev.log_prob;
        next.push_back(std::move(q));
      }
    }
    paths = std::move(next);
    prune(paths);
  }
  return paths;
}

}  // namespace mixreason
