#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace gpricing::trainer {

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  std::vector<double> m, v;
  std::int64_t t = 0;

  explicit AdamState(std::size_t n = 0) : m(n, 0.0), v(n, 0.0) {}
};

/// One AdamW update with decoupled weight decay and bias-corrected moments.
/// Entries with mask[i] == 0 are left untouched (parameters and moments);
/// an empty mask updates everything. Throws NumericalError without modifying
/// anything if a gradient entry is not finite.
void adamw_step(std::span<double> params, std::span<const double> grads, AdamState& state,
                double lr, double weight_decay, std::span<const char> mask = {},
                const AdamConfig& cfg = {});

/// Global L2-norm clipping across all groups. Returns the norm before
/// clipping.
double clip_gradients(std::span<const std::span<double>> groups, double max_norm);

}  // namespace gpricing::trainer
