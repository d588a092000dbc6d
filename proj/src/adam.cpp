#include "mixreason/adam.hpp"

#include <cmath>

namespace mixreason {

void adam_step(std::span<Tensor> params, const Gradients& grads, AdamState& state, const AdamConfig& config) {
  if (state.m.empty()) {
    for (const Tensor& p : params) {
      state.m.emplace_back(p.rows(), p.cols());
      state.v.emplace_back(p.rows(), p.cols());
    }
  }
  if (state.m.size() != params.size()) throw ShapeMismatch("adam: state does not match parameter list");
  for (const auto& [slot, g] : grads) {
    if (slot >= params.size() || !g.same_shape(params[slot])) {
      throw ShapeMismatch("adam: gradient shape does not match parameter");
    }
  }

  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(config.beta1, t);
  const double c2 = 1.0 - std::pow(config.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor& p = params[i];
    Tensor& m = state.m[i];
    Tensor& v = state.v[i];
    auto it = grads.find(i);
    const Tensor* g = it == grads.end() ? nullptr : &it->second;
    for (std::size_t k = 0; k < p.size(); ++k) {
      const double gk = g ? (*g)[k] : 0.0;
      m[k] = config.beta1 * m[k] + (1.0 - config.beta1) * gk;
      v[k] = config.beta2 * v[k] + (1.0 - config.beta2) * gk * gk;
      const double m_hat = m[k] / c1;
      const double v_hat = v[k] / c2;
      p[k] -= config.lr * m_hat / (std::sqrt(v_hat) + config.eps);
    }
  }
}

double grad_norm(const Gradients& grads) {
  double s = 0.0;
  for (const auto& [slot, g] : grads) {
    for (double v : g.values()) s += v * v;
  }
  return std::sqrt(s);
}

void scale_gradients(Gradients& grads, double factor) {
  for (auto& [slot, g] : grads) {
    for (double& v : g.values()) v *= factor;
  }
}

}  // namespace mixreason
