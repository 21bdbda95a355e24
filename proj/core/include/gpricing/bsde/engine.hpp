#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gpricing/bsde/losses.hpp"
#include "gpricing/nets/network.hpp"
#include "gpricing/types.hpp"

namespace gpricing::bsde {

struct EngineConfig {
  int steps = 32;  // N
  int paths = 16;  // M, simulated per contract
  double r = 0.0;
  LossWeights weights;
  /// Dropout on the value-net backbone, applied only when training.
  double value_dropout = 0.0;
};

struct NetGradients {
  nets::ParamVector value;
  nets::ParamVector generator;
};

/// Per-slice trainability of each network; an empty mask trains everything.
struct TrainableMasks {
  nets::TrainableMask value;
  nets::TrainableMask generator;
};

/// Seed of the path batch simulated for batch position `index`.
std::uint64_t path_seed(std::uint64_t batch_seed, std::size_t index);

/// Batched loss and gradient of the three-part objective.
///
/// Each contract is processed on its own: forward through the value net
/// (u0, interior steps with the X-tangent, terminal points), the generator
/// step by step, then a reverse-time adjoint of the recursion. The three loss
/// parts accumulate into separate gradient buffers, so the RMSE
/// normalisers, which depend on the whole batch, are applied once at the end
/// and no activations outlive their contract.
class LossEngine {
 public:
  explicit LossEngine(EngineConfig cfg);

  const EngineConfig& config() const { return cfg_; }

  /// Throws ValidationError on an empty batch and NumericalError if the
  /// recursion or the loss is not finite.
  LossBreakdown evaluate(const nets::AafNet& value, const nets::AafNet& generator,
                         std::span<const PricingSample* const> batch, std::uint64_t seed,
                         bool training, NetGradients* grads = nullptr,
                         const TrainableMasks* masks = nullptr) const;

 private:
  EngineConfig cfg_;
};

}  // namespace gpricing::bsde
