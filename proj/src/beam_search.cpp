#include "mixreason/beam_search.hpp"

#include <algorithm>
#include <limits>
#include <cmath>

#include "mixreason/errors.hpp"

namespace mixreason {

bool hypothesis_before(const Hypothesis& a, const Hypothesis& b) {
  if (a.log_prob != b.log_prob) return a.log_prob > b.log_prob;
  return a.tokens < b.tokens;
}

namespace {

struct Live {
  Hypothesis hyp;
  DecoderState state;
};

struct Candidate {
  std::size_t parent;
  TokenId token;
  double log_prob;
};

}  // namespace

std::vector<Hypothesis> beam_search(const Seq2SeqModel& model, std::span<const TokenId> src, std::size_t beam_width,
                                    std::size_t max_len) {
  if (beam_width < 1) throw BadConfig("beam_width must be >= 1");
  std::vector<Hypothesis> pool;
  if (max_len == 0) return pool;

  auto session = model.start(src);
  const TokenId eos = model.eos_id();
  std::vector<Live> live;
  live.push_back(Live{Hypothesis{}, session->initial()});

  auto pool_bound = [&]() -> double {
    // Log-probs only fall as hypotheses grow, so once the pool is full a
    // live hypothesis scoring strictly below its worst entry cannot place.
    if (pool.size() < beam_width) return -std::numeric_limits<double>::infinity();
    std::vector<Hypothesis> top = pool;
    std::nth_element(top.begin(), top.begin() + static_cast<std::ptrdiff_t>(beam_width - 1), top.end(),
                     hypothesis_before);
    return top[beam_width - 1].log_prob;
  };

  for (std::size_t step = 1; step <= max_len && !live.empty(); ++step) {
    std::vector<Candidate> cands;
    for (std::size_t i = 0; i < live.size(); ++i) {
      const auto& lp = live[i].state.log_probs;
      for (std::size_t v = 0; v < lp.size(); ++v) {
        if (std::isinf(lp[v]) && lp[v] < 0) continue;
        cands.push_back(Candidate{i, static_cast<TokenId>(v), live[i].hyp.log_prob + lp[v]});
      }
    }
    auto before = [&](const Candidate& a, const Candidate& b) {
      if (a.log_prob != b.log_prob) return a.log_prob > b.log_prob;
      // Lexicographic order on the extended token sequences.
      const auto& ta = live[a.parent].hyp.tokens;
      const auto& tb = live[b.parent].hyp.tokens;
      if (ta != tb) return ta < tb;
      return a.token < b.token;
    };
    const std::size_t keep = std::min(beam_width, cands.size());
    std::partial_sort(cands.begin(), cands.begin() + static_cast<std::ptrdiff_t>(keep), cands.end(), before);
    cands.resize(keep);

    std::vector<Live> next;
    for (const Candidate& c : cands) {
      Hypothesis h = live[c.parent].hyp;
      h.tokens.push_back(c.token);
      h.log_prob = c.log_prob;
      if (c.token == eos || step == max_len) {
        pool.push_back(std::move(h));
      } else {
        DecoderState s = session->advance(live[c.parent].state, c.token);
        next.push_back(Live{std::move(h), std::move(s)});
      }
    }
    live = std::move(next);

    const double bound = pool_bound();
    std::erase_if(live, [&](const Live& l) { return l.hyp.log_prob < bound; });
  }

  std::sort(pool.begin(), pool.end(), hypothesis_before);
  if (pool.size() > beam_width) pool.resize(beam_width);
  return pool;
}

}  // namespace mixreason
