#include "mixreason/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <tuple>

#include "mixreason/errors.hpp"

namespace mixreason {

AssignmentProblem::AssignmentProblem(std::size_t j, std::size_t k, std::vector<double> values)
    : targets(j), latents(k), scores(std::move(values)) {
  if (scores.size() != j * k) throw ShapeMismatch("assignment problem: score count does not match J x K");
  for (double v : scores) {
    if (!std::isfinite(v)) throw BadConfig("assignment problem: scores must be finite");
  }
}

AssignmentProblem AssignmentProblem::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) return {};
  std::vector<double> flat;
  for (const auto& r : rows) {
    if (r.size() != rows.front().size()) throw ShapeMismatch("assignment problem: ragged rows");
    flat.insert(flat.end(), r.begin(), r.end());
  }
  return AssignmentProblem(rows.size(), rows.front().size(), std::move(flat));
}

double Assignment::total(const AssignmentProblem& p) const {
  double s = 0.0;
  for (std::size_t j = 0; j < latent.size(); ++j) s += p.at(j, latent[j]);
  return s;
}

std::size_t Assignment::distinct_latents() const { return std::set<std::size_t>(latent.begin(), latent.end()).size(); }

bool Assignment::injective() const { return distinct_latents() == latent.size(); }

AssignmentProblem score_matrix(const BackboneModel& model, std::span<const std::string> x, Relation r,
                               std::span<const Tokens> targets) {
  const Vocab& vocab = model.vocab();
  const std::size_t J = targets.size();
  const std::size_t K = vocab.latents();
  if (J == 0) throw BadConfig("score_matrix: no targets");
  std::vector<TokenIds> tgts;
  for (const auto& z : targets) tgts.push_back(encode_target(z, vocab));
  std::vector<double> scores(J * K);
  for (std::size_t k = 0; k < K; ++k) {
    const auto col = model.sequence_log_probs(encode_source(x, r, k, vocab), tgts);
    for (std::size_t j = 0; j < J; ++j) scores[j * K + k] = col[j];
  }
  return AssignmentProblem(J, K, std::move(scores));
}

Assignment constrained_assign(const AssignmentProblem& problem) {
  const std::size_t J = problem.targets;
  const std::size_t K = problem.latents;
  if (K < J) throw InfeasibleK(J, K);
  std::vector<std::tuple<double, std::size_t, std::size_t>> order;
  order.reserve(J * K);
  for (std::size_t j = 0; j < J; ++j) {
    for (std::size_t k = 0; k < K; ++k) order.emplace_back(problem.at(j, k), j, k);
  }
  std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
    if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) > std::get<0>(b);
    if (std::get<1>(a) != std::get<1>(b)) return std::get<1>(a) < std::get<1>(b);
    return std::get<2>(a) < std::get<2>(b);
  });

  Assignment out;
  out.latent.assign(J, 0);
  std::vector<bool> target_used(J, false);
  std::vector<bool> latent_used(K, false);
  std::size_t assigned = 0;
  for (const auto& [score, j, k] : order) {
    if (assigned == J) break;
    if (target_used[j] || latent_used[k]) continue;
    out.latent[j] = k;
    target_used[j] = latent_used[k] = true;
    ++assigned;
  }
  return out;
}

Assignment hard_assign(const AssignmentProblem& problem) {
  Assignment out;
  out.latent.resize(problem.targets);
  for (std::size_t j = 0; j < problem.targets; ++j) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < problem.latents; ++k) {
      if (problem.at(j, k) > problem.at(j, best)) best = k;
    }
    out.latent[j] = best;
  }
  return out;
}

}  // namespace mixreason
