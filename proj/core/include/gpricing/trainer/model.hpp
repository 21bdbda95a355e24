#pragma once

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gpricing/nets/checkpoint.hpp"
#include "gpricing/nets/network.hpp"
#include "gpricing/trainer/stage.hpp"
#include "gpricing/types.hpp"

namespace gpricing::trainer {

struct NetPair {
  nets::AafNet value;
  nets::AafNet generator;
};

/// Inference-time input replacements used by the ablation studies.
struct PriceOptions {
  std::optional<double> constant_sigma;  // replaces the volatility trajectory
  bool gate_off = false;                 // forces the sentiment gate to 0
};

/// The pretrained networks plus one fine-tuned pair per (moneyness, type)
/// bucket. Buckets without a fine-tuned pair are priced by the pretrained one.
class PricingModel {
 public:
  explicit PricingModel(NetPair pretrained, double r = 0.0);

  const NetPair& pretrained() const { return pretrained_; }
  void set_bucket(const Bucket& b, NetPair nets);
  bool has_bucket(const Bucket& b) const { return buckets_.contains(b); }
  const NetPair& nets_for(const Bucket& b) const;
  double rate() const { return r_; }

  /// Model price u_theta(0, X0, K, tau, sigma_0, r, e0) from the value head
  /// matching the option type.
  double price(const PricingSample& s, const PriceOptions& opt = {}) const;
  std::vector<double> price_all(std::span<const PricingSample> rows,
                                const PriceOptions& opt = {}) const;

  nets::Checkpoint to_checkpoint() const;
  static PricingModel from_checkpoint(const nets::Checkpoint& ckpt);

 private:
  NetPair pretrained_;
  std::map<Bucket, NetPair> buckets_;
  double r_ = 0.0;
};

struct TrainPlan {
  TrainConfig pretrain = TrainConfig::pretrain_defaults();
  TrainConfig finetune = TrainConfig::finetune_defaults();
  std::vector<Bucket> buckets;  // empty = all six
  /// Applied to every fine-tuning stage when set (e.g. frozen_zero to train
  /// without the sentiment channel).
  std::optional<GatePolicy> gate_override;
  nets::InitOptions init;
  /// Fit the fixed input/output scaling of both networks to the training set
  /// before pretraining (identity scaling otherwise).
  bool fit_scaling = true;
  nets::NetShape value_shape = nets::NetShape::value_net();
  nets::NetShape generator_shape = nets::NetShape::generator_net();
  std::uint64_t seed = 1;
};

/// Every bucket in reporting order (ATM, ITM, OTM; call before put).
std::vector<Bucket> all_buckets();

/// Sets each network's fixed scaling from training-set statistics so every
/// input channel and the price output are O(1) inside the networks. Throws
/// DataError on an empty set.
void fit_scaling(NetPair& nets, std::span<const PricingSample> train);

using TraceSink = std::function<void(const TraceRow&)>;

/// Fresh networks from plan.seed (scaling fitted when plan.fit_scaling) and
/// the pretraining stage.
NetPair pretrain_model(const TrainPlan& plan, std::span<const PricingSample> train,
                       const TraceSink& sink = {});

/// Fresh networks from plan.seed, pretraining, then one fine-tuning stage per
/// bucket starting from the pretrained weights. Buckets with no training
/// rows are skipped with a warning.
PricingModel train_model(const TrainPlan& plan, std::span<const PricingSample> train,
                         const TraceSink& sink = {});

/// Fine-tuning only, starting from an existing pretrained pair.
PricingModel finetune_model(const TrainPlan& plan, const NetPair& pretrained,
                            std::span<const PricingSample> train, const TraceSink& sink = {});

}  // namespace gpricing::trainer
