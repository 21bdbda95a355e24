#include "gpricing/trainer/optim.hpp"

#include <cmath>
#include <string>

#include "gpricing/errors.hpp"

namespace gpricing::trainer {

void adamw_step(std::span<double> params, std::span<const double> grads, AdamState& state,
                double lr, double weight_decay, std::span<const char> mask,
                const AdamConfig& cfg) {
  const std::size_t n = params.size();
  if (grads.size() != n || state.m.size() != n || state.v.size() != n ||
      (!mask.empty() && mask.size() != n)) {
    throw ValidationError("adamw_step: parameter, gradient, state and mask sizes differ");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if ((mask.empty() || mask[i]) && !std::isfinite(grads[i])) {
      throw NumericalError("adamw_step: non-finite gradient at index " + std::to_string(i) +
                           "; step rejected");
    }
  }
  ++state.t;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.t));
  const double decay = 1.0 - lr * weight_decay;
  for (std::size_t i = 0; i < n; ++i) {
    if (!mask.empty() && !mask[i]) {
      continue;
    }
    const double g = grads[i];
    state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * g;
    state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * g * g;
    const double m_hat = state.m[i] / bc1;
    const double v_hat = state.v[i] / bc2;
    params[i] = params[i] * decay - lr * m_hat / (std::sqrt(v_hat) + cfg.eps);
  }
}

double clip_gradients(std::span<const std::span<double>> groups, double max_norm) {
  double sq = 0.0;
  for (const auto& g : groups) {
    for (const double x : g) {
      sq += x * x;
    }
  }
  const double norm = std::sqrt(sq);
  if (norm > max_norm) {
    const double scale = max_norm / norm;
    for (const auto& g : groups) {
      for (double& x : g) {
        x *= scale;
      }
    }
  }
  return norm;
}

}  // namespace gpricing::trainer
