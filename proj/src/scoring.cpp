#include "mixreason/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mixreason/diversity.hpp"
#include "mixreason/errors.hpp"

namespace mixreason {

std::string_view to_string(Distance d) {
  switch (d) {
    case Distance::Cosine: return "cosine";
    case Distance::Bleu: return "bleu";
    case Distance::Seq2SeqLikelihood: return "seq2seq_likelihood";
    case Distance::AvgWordProb: return "avg_word_prob";
  }
  return "unknown";
}

std::optional<Distance> distance_from_string(std::string_view s) {
  for (Distance d : {Distance::Cosine, Distance::Bleu, Distance::Seq2SeqLikelihood, Distance::AvgWordProb}) {
    if (to_string(d) == s) return d;
  }
  return std::nullopt;
}

std::string_view to_string(PathCombine c) { return c == PathCombine::Max ? "max" : "marginal"; }

std::optional<PathCombine> path_combine_from_string(std::string_view s) {
  if (s == "max") return PathCombine::Max;
  if (s == "marginal") return PathCombine::Marginal;
  return std::nullopt;
}

void ScorerConfig::validate() const {
  if (!(gamma > 0)) throw BadConfig("gamma must be positive");
}

double distance_cosine(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) throw ShapeMismatch("cosine: vector lengths differ");
  double dot = 0.0, nu = 0.0, nv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    nu += u[i] * u[i];
    nv += v[i] * v[i];
  }
  if (nu == 0.0 || nv == 0.0) throw ZeroVector("cosine distance of a zero vector");
  const double cos = std::clamp(dot / (std::sqrt(nu) * std::sqrt(nv)), -1.0, 1.0);
  return 1.0 - cos;
}

double distance_bleu(std::span<const std::string> answer, std::span<const std::string> event) {
  if (event.empty()) return 1.0;
  return 1.0 - bleu_smoothing1(answer, event);
}

std::vector<double> answer_posterior(std::span<const double> distances, double gamma) {
  if (distances.empty()) return {};
  const double lo = *std::min_element(distances.begin(), distances.end());
  std::vector<double> p(distances.size());
  double z = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    p[i] = std::exp(-gamma * (distances[i] - lo));
    z += p[i];
  }
  for (double& v : p) v /= z;
  return p;
}

double avg_word_prob(const BackboneModel& model, std::span<const std::string> source, Relation r,
                     std::span<const std::string> answer) {
  if (answer.empty()) throw EmptyAnswer("avg_word_prob needs a non-empty answer");
  const double lp = mixture_log_prob(model, source, r, answer);
  return lp / static_cast<double>(answer.size() + 1);
}

AnswerDecision select_answer_from_distances(std::span<const ReasoningPath> paths,
                                            const std::vector<std::vector<double>>& distances, double gamma,
                                            PathCombine combine) {
  if (paths.empty()) throw NoPaths("no reasoning paths to score against");
  if (distances.size() != paths.size()) throw ShapeMismatch("one distance row per path required");
  const std::size_t A = distances.front().size();
  std::vector<std::vector<double>> per_answer(A);
  AnswerDecision out;
  out.scores.assign(A, -std::numeric_limits<double>::infinity());
  out.best_path.assign(A, std::nullopt);
  for (std::size_t p = 0; p < paths.size(); ++p) {
    if (distances[p].size() != A) throw ShapeMismatch("ragged distance rows");
    // log softmax(-gamma d), shifted for stability.
    std::vector<double> logits(A);
    for (std::size_t a = 0; a < A; ++a) logits[a] = -gamma * distances[p][a];
    const double lse = log_sum_exp(logits);
    for (std::size_t a = 0; a < A; ++a) {
      const double s = paths[p].total_log_prob + (logits[a] - lse);
      per_answer[a].push_back(s);
      if (!out.best_path[a] || s > out.scores[a]) {
        out.scores[a] = s;
        out.best_path[a] = p;
      }
    }
  }
  if (combine == PathCombine::Marginal) {
    for (std::size_t a = 0; a < A; ++a) {
      // Sorted so the sum does not depend on path order.
      std::sort(per_answer[a].begin(), per_answer[a].end());
      out.scores[a] = log_sum_exp(per_answer[a]);
    }
  }
  for (std::size_t a = 1; a < A; ++a) {
    if (out.scores[a] > out.scores[out.chosen]) out.chosen = a;
  }
  return out;
}

AnswerDecision select_answer(std::span<const ReasoningPath> paths, std::span<const std::string> answers,
                             const BackboneModel& model, const ScorerConfig& config,
                             std::span<const std::string> context, Relation r) {
  config.validate();
  if (answers.size() < 2) throw BadConfig("need at least two answers");
  std::vector<Tokens> answer_tokens;
  for (const auto& a : answers) answer_tokens.push_back(tokenize(a));

  if (config.distance == Distance::AvgWordProb) {
    AnswerDecision out;
    for (const auto& a : answer_tokens) out.scores.push_back(avg_word_prob(model, context, r, a));
    out.best_path.assign(answers.size(), std::nullopt);
    for (std::size_t i = 1; i < out.scores.size(); ++i) {
      if (out.scores[i] > out.scores[out.chosen]) out.chosen = i;
    }
    return out;
  }
  if (paths.empty()) throw NoPaths("no reasoning paths to score against");

  std::vector<std::vector<double>> answer_vecs;
  if (config.distance == Distance::Cosine) {
    for (const auto& a : answer_tokens) answer_vecs.push_back(model.embed_text(a));
  }
  std::vector<std::vector<double>> distances;
  for (const ReasoningPath& p : paths) {
    const Tokens event = tokenize(p.last_event());
    std::vector<double> row;
    switch (config.distance) {
      case Distance::Cosine: {
        if (event.empty()) {
          row.assign(answers.size(), 1.0);
          break;
        }
        const auto ev = model.embed_text(event);
        for (const auto& av : answer_vecs) row.push_back(distance_cosine(av, ev));
        break;
      }
      case Distance::Bleu:
        for (const auto& a : answer_tokens) row.push_back(distance_bleu(a, event));
        break;
      case Distance::Seq2SeqLikelihood: {
        // The answer scored in place of z_T, from the source z_T came from.
        const Tokens source = p.events.size() > 1 ? tokenize(p.events[p.events.size() - 2])
                                                  : Tokens(context.begin(), context.end());
        for (const auto& a : answer_tokens) row.push_back(-avg_word_prob(model, source, r, a));
        break;
      }
      case Distance::AvgWordProb: break;
    }
    distances.push_back(std::move(row));
  }
  return select_answer_from_distances(paths, distances, config.gamma, config.combine);
}

}  // namespace mixreason
