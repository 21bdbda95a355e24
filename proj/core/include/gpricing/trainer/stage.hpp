#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gpricing/bsde/engine.hpp"
#include "gpricing/nets/network.hpp"
#include "gpricing/types.hpp"

namespace gpricing::trainer {

struct TrainConfig {
  int batch_size = 128;
  int time_steps = 32;  // N
  int paths = 16;       // M per contract
  double peak_lr = 1e-4;
  double min_lr = 1e-8;
  int steps = 3500;
  int warmup = 1400;
  double clip = 10.0;
  double weight_decay = 1e-5;
  double dropout = 0.1;  // value-net backbone
  double r = 0.0;
  bsde::LossWeights weights;
  std::uint64_t seed = 1;

  static TrainConfig pretrain_defaults();
  static TrainConfig finetune_defaults();

  /// Throws ConfigError on inconsistent settings.
  void validate() const;
};

/// Linear warmup from 0 to peak_lr, then cosine annealing to min_lr at
/// step == steps. `step` is clamped to [0, steps].
double lr_at(int step, const TrainConfig& cfg);

enum class Stage { pretrain, finetune };
enum class TypeFilter { call, put, both };
enum class GatePolicy { trainable, frozen_zero, disabled };
enum class BackbonePolicy { trainable, frozen };

struct StageSpec {
  Stage stage = Stage::pretrain;
  std::optional<Moneyness> moneyness;  // empty = mixed
  TypeFilter types = TypeFilter::both;
  GatePolicy gate = GatePolicy::disabled;
  BackbonePolicy backbone = BackbonePolicy::trainable;
  /// Gate value written to both networks at the start of the stage.
  std::optional<double> gate_init;

  static StageSpec pretrain();
  /// Backbone frozen; gate trainable from its class prior, except ITM where
  /// it is frozen at zero.
  static StageSpec finetune(Bucket bucket);

  /// Throws ConfigError if the spec breaks a stage invariant.
  void validate() const;
  /// "pretrain" or e.g. "finetune:ATM-call".
  std::string label() const;
};

/// Slice masks implied by a stage for the given networks.
bsde::TrainableMasks stage_masks(const nets::AafNet& value, const nets::AafNet& generator,
                                 const StageSpec& spec);

/// Expands a slice mask into a per-parameter mask (empty stays empty).
std::vector<char> element_mask(const nets::ParamStore& ps, const nets::TrainableMask& slices);

/// Rows of the stage's training set (copies; sentiment zeroed when the
/// channel is disabled).
std::vector<PricingSample> stage_dataset(const StageSpec& spec, std::span<const PricingSample> data);

struct TraceRow {
  int step = 0;
  std::string stage;
  bsde::LossBreakdown loss;
  double lr = 0.0;
};

struct StageResult {
  std::vector<TraceRow> trace;
};

using StepCallback = std::function<void(const TraceRow&)>;

/// Runs cfg.steps optimisation steps: sample a batch uniformly with
/// replacement, simulate paths, evaluate the loss and its gradient, clip,
/// and apply AdamW with the stage's masks. Batch draws, paths and dropout
/// are all derived from (cfg.seed, stage, step), so a run is reproducible
/// bit for bit. Throws DataError if the filtered dataset is empty.
StageResult run_stage(const StageSpec& spec, const TrainConfig& cfg,
                      std::span<const PricingSample> data, nets::AafNet& value,
                      nets::AafNet& generator, const StepCallback& on_step = {});

/// Header plus one line per step: step,stage,loss_total,loss_price,
/// loss_terminal,loss_path,lr.
void write_trace_csv(std::ostream& os, std::span<const TraceRow> rows, bool header = true);

}  // namespace gpricing::trainer
