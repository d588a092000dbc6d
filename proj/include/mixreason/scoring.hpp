#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mixreason/backbone.hpp"
#include "mixreason/reasoning.hpp"

namespace mixreason {

enum class Distance { Cosine, Bleu, Seq2SeqLikelihood, AvgWordProb };
// How per-path scores combine into one score per answer.
enum class PathCombine { Max, Marginal };

std::string_view to_string(Distance d);
std::optional<Distance> distance_from_string(std::string_view s);
std::string_view to_string(PathCombine c);
std::optional<PathCombine> path_combine_from_string(std::string_view s);

struct ScorerConfig {
  Distance distance = Distance::Cosine;
  double gamma = 1.0;
  PathCombine combine = PathCombine::Max;

  void validate() const;
};

struct AnswerDecision {
  std::size_t chosen = 0;
  std::vector<double> scores;                     // per answer
  std::vector<std::optional<std::size_t>> best_path;  // per answer, index into the paths
};

// 1 - cos(u, v), in [0, 2]. Throws ZeroVector.
double distance_cosine(std::span<const double> u, std::span<const double> v);

// 1 - BLEU with the answer as hypothesis and the event as reference.
// An empty event is at distance 1.
double distance_bleu(std::span<const std::string> answer, std::span<const std::string> event);

// softmax(-gamma * d), stabilized by shifting with the smallest distance.
std::vector<double> answer_posterior(std::span<const double> distances, double gamma);

// log Pr(answer | source, r) under the uniform latent mixture divided by the
// number of predicted answer tokens (EOS included).
double avg_word_prob(const BackboneModel& model, std::span<const std::string> source, Relation r,
                     std::span<const std::string> answer);

// Core of the decision rule: distances[p][a] is d(answer a, last event of
// path p). Score(a, p) = total_log_prob(p) + log posterior(a | p).
AnswerDecision select_answer_from_distances(std::span<const ReasoningPath> paths,
                                            const std::vector<std::vector<double>>& distances, double gamma,
                                            PathCombine combine = PathCombine::Max);

// Full decision for one question: distances computed with the configured
// function. `context` is only used by the likelihood-based variants.
AnswerDecision select_answer(std::span<const ReasoningPath> paths, std::span<const std::string> answers,
                             const BackboneModel& model, const ScorerConfig& config,
                             std::span<const std::string> context, Relation r);

}  // namespace mixreason
