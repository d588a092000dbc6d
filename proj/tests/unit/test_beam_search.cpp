#include <cmath>

#include "doctest.h"
#include "mixreason/beam_search.hpp"
#include "mixreason/errors.hpp"
#include "mixreason/rng.hpp"
#include "oracles.hpp"

using namespace mixreason;

namespace {

constexpr TokenId E = Vocab::kEos;
constexpr TokenId A = 3, B = 4, C = 5, D = 6;

// The best sequence is three tokens long and starts with the most likely
// first token, so every width from 1 to 4 finds the exact top-k.
oracle::TableModel deep_table() {
  return oracle::TableModel(7, {
                                   {{}, {{A, 0.6}, {B, 0.3}, {E, 0.1}}},
                                   {{A}, {{C, 0.7}, {E, 0.3}}},
                                   {{A, C}, {{E, 1.0}}},
                                   {{B}, {{E, 0.9}, {D, 0.1}}},
                                   {{B, D}, {{E, 1.0}}},
                               });
}

// Three-token toy: every prefix spreads mass over A, B and EOS.
oracle::TableModel three_token_table() {
  std::map<TokenIds, std::map<TokenId, double>> t;
  t[{}] = {{A, 0.5}, {B, 0.3}, {E, 0.2}};
  t[{A}] = {{A, 0.1}, {B, 0.2}, {E, 0.7}};
  t[{B}] = {{A, 0.6}, {B, 0.05}, {E, 0.35}};
  t[{A, A}] = {{A, 0.3}, {B, 0.3}, {E, 0.4}};
  t[{A, B}] = {{A, 0.2}, {B, 0.2}, {E, 0.6}};
  t[{B, A}] = {{A, 0.1}, {B, 0.1}, {E, 0.8}};
  t[{B, B}] = {{A, 0.5}, {B, 0.4}, {E, 0.1}};
  return oracle::TableModel(5, t);
}

}  // namespace

TEST_CASE("beam equals exhaustive top-k on hand tables") {
  const TokenIds src = {0};
  auto deep = deep_table();
  for (std::size_t w = 1; w <= 4; ++w) {
    CHECK(beam_search(deep, src, w, 5) == oracle::exhaustive_top_k(deep, src, w, 5));
  }
  auto toy = three_token_table();
  CHECK(beam_search(toy, src, 3, 3) == oracle::exhaustive_top_k(toy, src, 3, 3));
}

TEST_CASE("hand-derived deep table ranking") {
  auto deep = deep_table();
  auto out = beam_search(deep, TokenIds{0}, 4, 5);
  REQUIRE(out.size() == 4);
  CHECK(out[0].tokens == TokenIds{A, C, E});
  CHECK(out[0].log_prob == doctest::Approx(std::log(0.42)));
  CHECK(out[1].tokens == TokenIds{B, E});
  CHECK(out[2].tokens == TokenIds{A, E});
  CHECK(out[3].tokens == TokenIds{E});
}

TEST_CASE("width 1 is greedy decoding") {
  Vocab v({"p", "q", "r", "s"}, 2);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    oracle::HashModel m(v, seed, 0.4);
    const TokenIds src = {v.latent_id(seed % 2), v.first_word()};
    auto session = m.start(src);
    auto st = session->initial();
    Hypothesis greedy;
    for (std::size_t step = 0; step < 4; ++step) {
      std::size_t best = 0;
      for (std::size_t t = 1; t < st.log_probs.size(); ++t) {
        if (st.log_probs[t] > st.log_probs[best]) best = t;
      }
      greedy.tokens.push_back(static_cast<TokenId>(best));
      greedy.log_prob += st.log_probs[best];
      if (static_cast<TokenId>(best) == E) break;
      st = session->advance(st, static_cast<TokenId>(best));
    }
    auto out = beam_search(m, src, 1, 4);
    REQUIRE(out.size() == 1);
    CHECK(out[0] == greedy);
  }
}

TEST_CASE("results are valid, sorted and correctly scored") {
  Vocab v({"p", "q", "r"}, 1);
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    oracle::HashModel m(v, seed, 0.3);
    const TokenIds src = {v.latent_id(0)};
    for (std::size_t w : {1, 2, 5}) {
      auto out = beam_search(m, src, w, 4);
      CHECK(out.size() <= w);
      for (std::size_t i = 0; i < out.size(); ++i) {
        CHECK(out[i].log_prob <= 0.0);
        CHECK((out[i].finished(E) || out[i].tokens.size() == 4));
        TokenIds tgt = {Vocab::kBos};
        tgt.insert(tgt.end(), out[i].tokens.begin(), out[i].tokens.end());
        CHECK(score_with_sessions(m, src, tgt) == doctest::Approx(out[i].log_prob).epsilon(1e-12));
        if (i > 0) CHECK_FALSE(hypothesis_before(out[i], out[i - 1]));
      }
    }
    // A beam wider than the whole search space is exhaustive.
    CHECK(beam_search(m, src, 2000, 3) == oracle::exhaustive_top_k(m, src, 2000, 3));
  }
}

TEST_CASE("wider beams do not lose the best hypothesis on the fixtures") {
  auto deep = deep_table();
  auto toy = three_token_table();
  for (const oracle::TableModel* m : {&deep, &toy}) {
    double prev = -INFINITY;
    for (std::size_t w = 1; w <= 6; ++w) {
      const double best = beam_search(*m, TokenIds{0}, w, 4).front().log_prob;
      CHECK(best >= prev);
      prev = best;
    }
  }
}

TEST_CASE("edge cases") {
  auto deep = deep_table();
  CHECK_THROWS_AS(beam_search(deep, TokenIds{0}, 0, 5), BadConfig);
  CHECK(beam_search(deep, TokenIds{0}, 3, 0).empty());
  // Length cap 1: A and B are retired unfinished.
  auto capped = beam_search(deep, TokenIds{0}, 3, 1);
  REQUIRE(capped.size() == 3);
  CHECK(capped[0].tokens == TokenIds{A});
  CHECK_FALSE(capped[0].finished(E));
  CHECK(capped[2].tokens == TokenIds{E});
}
