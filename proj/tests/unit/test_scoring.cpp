#include <cmath>

#include "doctest.h"
#include "mixreason/errors.hpp"
#include "mixreason/scoring.hpp"
#include "oracles.hpp"

using namespace mixreason;

namespace {

ReasoningPath path(double log_prob, std::string last = "e") {
  return ReasoningPath{{std::move(last)}, {log_prob}, {0}, log_prob};
}

}  // namespace

TEST_CASE("cosine distance") {
  const double u[] = {1, 0}, v[] = {1, 1}, w[] = {0, 3}, z[] = {0, 0};
  CHECK(distance_cosine(v, v) == doctest::Approx(0.0));
  CHECK(distance_cosine(u, w) == 1.0);
  CHECK(distance_cosine(u, v) == doctest::Approx(1.0 - 1.0 / std::sqrt(2.0)).epsilon(1e-15));
  const double neg[] = {-2, 0};
  CHECK(distance_cosine(u, neg) == 2.0);
  CHECK_THROWS_AS(distance_cosine(u, z), ZeroVector);
}

TEST_CASE("bleu distance") {
  const Tokens s = {"to", "go", "home", "now"};
  CHECK(distance_bleu(s, s) == 0.0);
  const Tokens a = {"a", "b"}, b = {"c", "d"};
  CHECK(distance_bleu(a, b) == doctest::Approx(1.0 - oracle::brute_bleu(a, b)).epsilon(1e-15));
  const Tokens shorter = {"to", "go"};
  CHECK(distance_bleu(shorter, s) != distance_bleu(s, shorter));
}

TEST_CASE("answer posterior") {
  for (double p : answer_posterior(std::vector<double>{0.4, 0.4, 0.4}, 1.0)) CHECK(p == doctest::Approx(1.0 / 3));
  auto p = answer_posterior(std::vector<double>{0, 1, 1}, 1.0);
  CHECK(p[0] == doctest::Approx(0.57611).epsilon(1e-5));
  CHECK(p[1] == doctest::Approx(0.21194).epsilon(1e-5));
  CHECK(p[2] == doctest::Approx(0.21194).epsilon(1e-5));
  auto sharp = answer_posterior(std::vector<double>{0, 1, 1}, 2.0);
  CHECK(sharp[0] >= p[0]);
  auto shifted = answer_posterior(std::vector<double>{5, 6, 6}, 1.0);
  double total = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(shifted[i] == doctest::Approx(p[i]).epsilon(1e-14));
    CHECK(shifted[i] > 0.0);
    total += shifted[i];
  }
  CHECK(std::abs(total - 1.0) <= 1e-12);
}

TEST_CASE("select_answer arithmetic") {
  std::vector<ReasoningPath> one = {path(-0.5)};
  CHECK(select_answer_from_distances(one, {{0.0, 1.0}}, 1.0).chosen == 0);

  std::vector<ReasoningPath> two = {path(-1.0, "p1"), path(-3.0, "p2")};
  auto d = select_answer_from_distances(two, {{0.9, 0.1}, {0.0, 2.0}}, 1.0);
  CHECK(d.chosen == 1);
  // Answer 1 is best through the first path.
  CHECK(d.scores[1] == doctest::Approx(-1.0 - 0.1 - std::log(std::exp(-0.9) + std::exp(-0.1))).epsilon(1e-12));
  CHECK(d.scores[1] == doctest::Approx(-1.3711).epsilon(1e-4));
  CHECK(d.best_path[1] == 0u);
  // Answer 0: the first path gives -2.1711, the second -3.1269; max wins.
  CHECK(d.scores[0] == doctest::Approx(-1.0 - 0.9 - std::log(std::exp(-0.9) + std::exp(-0.1))).epsilon(1e-12));
  CHECK(d.best_path[0] == 0u);

  // Path order does not matter.
  std::vector<ReasoningPath> rev = {two[1], two[0]};
  auto r = select_answer_from_distances(rev, {{0.0, 2.0}, {0.9, 0.1}}, 1.0);
  CHECK(r.chosen == d.chosen);
  CHECK(r.scores == d.scores);

  // A far-away third answer keeps the first two in the same order.
  auto three = select_answer_from_distances(two, {{0.9, 0.1, 1e6}, {0.0, 2.0, 1e6}}, 1.0);
  CHECK(three.chosen == 1);
  CHECK(three.scores[1] > three.scores[0]);

  // Marginal combination: log-sum-exp over paths.
  auto m = select_answer_from_distances(two, {{0.9, 0.1}, {0.0, 2.0}}, 1.0, PathCombine::Marginal);
  const double a0p1 = -1.0 - 0.9 - std::log(std::exp(-0.9) + std::exp(-0.1));
  const double a0p2 = -3.0 - std::log(1.0 + std::exp(-2.0));
  CHECK(m.scores[0] == doctest::Approx(std::log(std::exp(a0p1) + std::exp(a0p2))).epsilon(1e-12));
}

TEST_CASE("ties go to the smallest index") {
  std::vector<ReasoningPath> one = {path(-1.0)};
  CHECK(select_answer_from_distances(one, {{0.3, 0.3, 0.3}}, 1.0).chosen == 0);
  CHECK(select_answer_from_distances(one, {{0.5, 0.3, 0.3}}, 1.0).chosen == 1);
}

TEST_CASE("no paths") {
  CHECK_THROWS_AS(select_answer_from_distances({}, {}, 1.0), NoPaths);
  CHECK_THROWS_AS(ScorerConfig{.gamma = 0.0}.validate(), BadConfig);
}

TEST_CASE("avg_word_prob") {
  auto m = oracle::tiny_model({"a", "b", "c"}, 2, 4, 3);
  const Tokens src = {"a"};
  for (const Tokens& ans : {Tokens{"b"}, Tokens{"b", "c", "a"}}) {
    const double v = avg_word_prob(m, src, Relation::xWant, ans);
    CHECK(v <= 0.0);
    CHECK(v == mixture_log_prob(m, src, Relation::xWant, ans) / static_cast<double>(ans.size() + 1));
  }
  CHECK_THROWS_AS(avg_word_prob(m, src, Relation::xWant, Tokens{}), EmptyAnswer);

  m.parameters()[m.parameter_index("output.w")].fill(0.0);
  const double lnv = std::log(static_cast<double>(m.vocab().size()));
  CHECK(avg_word_prob(m, src, Relation::xWant, Tokens{"b"}) == doctest::Approx(-lnv).epsilon(1e-14));
  CHECK(avg_word_prob(m, src, Relation::xWant, Tokens{"b", "c", "c", "a"}) == doctest::Approx(-lnv).epsilon(1e-14));
}

TEST_CASE("select_answer with each distance") {
  auto m = oracle::tiny_model({"alex", "eats", "food", "rests", "sleeps"}, 2, 6, 12);
  ReasonConfig rc{.hops = 0, .latents = 2, .beam = 3, .top_paths = 3, .max_len = 4};
  const Tokens ctx = {"alex", "eats"};
  auto paths = reason(m, ctx, Relation::xEffect, rc);
  REQUIRE_FALSE(paths.empty());
  const std::vector<std::string> answers = {"rests", "food food", "sleeps"};
  for (Distance d : {Distance::Cosine, Distance::Bleu, Distance::Seq2SeqLikelihood, Distance::AvgWordProb}) {
    ScorerConfig cfg{.distance = d};
    auto a = select_answer(paths, answers, m, cfg, ctx, Relation::xEffect);
    CHECK(a.chosen < 3);
    CHECK(a.scores.size() == 3);
    CHECK(select_answer(paths, answers, m, cfg, ctx, Relation::xEffect).scores == a.scores);
    CHECK(distance_from_string(to_string(d)) == d);
  }
  // Likelihood baseline: score is the answer's average word log-prob.
  ScorerConfig avg{.distance = Distance::AvgWordProb};
  auto a = select_answer({}, answers, m, avg, ctx, Relation::xEffect);
  CHECK(a.scores[1] == avg_word_prob(m, ctx, Relation::xEffect, tokenize(answers[1])));
}
