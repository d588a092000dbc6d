#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mixreason/backbone.hpp"

namespace mixreason {

// J x K matrix of log Pr(z_j | h_k, x, r).
struct AssignmentProblem {
  std::size_t targets = 0;
  std::size_t latents = 0;
  std::vector<double> scores;  // row-major, targets x latents

  AssignmentProblem() = default;
  AssignmentProblem(std::size_t j, std::size_t k, std::vector<double> values);
  static AssignmentProblem from_rows(const std::vector<std::vector<double>>& rows);

  double at(std::size_t j, std::size_t k) const { return scores[j * latents + k]; }
};

// latent[j] = k for each target j.
struct Assignment {
  std::vector<std::size_t> latent;

  double total(const AssignmentProblem& p) const;
  std::size_t distinct_latents() const;
  bool injective() const;
  friend bool operator==(const Assignment&, const Assignment&) = default;
};

// Scores every (target, latent) pair with the current parameters.
AssignmentProblem score_matrix(const BackboneModel& model, std::span<const std::string> x, Relation r,
                               std::span<const Tokens> targets);

// Constrained E-step: visit all (j, k) in order of descending score (ties:
// smaller j, then smaller k) and accept a pair when neither its target nor
// its latent is taken yet. Injective and total; not necessarily optimal.
// Throws InfeasibleK if K < J.
Assignment constrained_assign(const AssignmentProblem& problem);

// Unconstrained E-step: row-wise argmax, ties to the smaller k.
Assignment hard_assign(const AssignmentProblem& problem);

}  // namespace mixreason
