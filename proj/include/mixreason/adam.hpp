#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mixreason/autodiff.hpp"
#include "mixreason/tensor.hpp"

namespace mixreason {

struct AdamConfig {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  std::uint64_t step = 0;
  std::vector<Tensor> m;
  std::vector<Tensor> v;
};

// One bias-corrected Adam update. grads is keyed by index into params;
// missing entries count as zero gradients.
void adam_step(std::span<Tensor> params, const Gradients& grads, AdamState& state, const AdamConfig& config);

// Global L2 norm of all gradient tensors.
double grad_norm(const Gradients& grads);
void scale_gradients(Gradients& grads, double factor);

}  // namespace mixreason
