#include "gpricing/trainer/stage.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>

#include "gpricing/errors.hpp"
#include "gpricing/market/rng.hpp"
#include "gpricing/trainer/optim.hpp"

namespace gpricing::trainer {

TrainConfig TrainConfig::pretrain_defaults() { return {}; }

TrainConfig TrainConfig::finetune_defaults() {
  TrainConfig c;
  c.peak_lr = 1e-5;
  c.steps = 5000;
  c.warmup = 500;
  c.clip = 20.0;
  return c;
}

void TrainConfig::validate() const {
  if (batch_size < 1 || time_steps < 1 || paths < 1) {
    throw ConfigError("train config: batch_size, time_steps and paths must be positive");
  }
  if (steps < 0 || warmup < 0) {
    throw ConfigError("train config: steps and warmup must be >= 0");
  }
  if (steps > 0 && warmup >= steps) {
    throw ConfigError("train config: warmup must be shorter than the stage");
  }
  if (!(min_lr >= 0.0) || !(peak_lr >= min_lr)) {
    throw ConfigError("train config: need 0 <= min_lr <= peak_lr");
  }
  if (!(clip > 0.0) || weight_decay < 0.0) {
    throw ConfigError("train config: clip must be > 0 and weight_decay >= 0");
  }
  if (dropout < 0.0 || !(dropout < 1.0)) {
    throw ConfigError("train config: dropout must lie in [0, 1)");
  }
}

double lr_at(int step, const TrainConfig& cfg) {
  const int s = std::clamp(step, 0, cfg.steps);
  if (s < cfg.warmup) {
    return cfg.peak_lr * static_cast<double>(s) / static_cast<double>(cfg.warmup);
  }
  const int span = cfg.steps - cfg.warmup;
  if (span <= 0) {
    return cfg.peak_lr;
  }
  const double progress = static_cast<double>(s - cfg.warmup) / static_cast<double>(span);
  return cfg.min_lr +
         0.5 * (cfg.peak_lr - cfg.min_lr) * (1.0 + std::cos(std::numbers::pi * progress));
}

StageSpec StageSpec::pretrain() { return {}; }

StageSpec StageSpec::finetune(Bucket bucket) {
  StageSpec s;
  s.stage = Stage::finetune;
  s.moneyness = bucket.moneyness;
  s.types = bucket.type == OptionType::call ? TypeFilter::call : TypeFilter::put;
  s.backbone = BackbonePolicy::frozen;
  if (bucket.moneyness == Moneyness::itm) {
    s.gate = GatePolicy::frozen_zero;
    s.gate_init = 0.0;
  } else {
    s.gate = GatePolicy::trainable;
    s.gate_init = nets::default_gate_init(bucket.moneyness);
  }
  return s;
}

void StageSpec::validate() const {
  if (stage == Stage::pretrain) {
    if (gate != GatePolicy::disabled || types != TypeFilter::both || moneyness.has_value()) {
      throw ConfigError("pretrain stage must use both types, mixed moneyness, sentiment disabled");
    }
    return;
  }
  if (types == TypeFilter::both) {
    throw ConfigError("finetune stage trains one option type at a time");
  }
  if (moneyness == Moneyness::itm && gate == GatePolicy::trainable) {
    throw ConfigError("finetune ITM: the sentiment gate is frozen at 0");
  }
  if (gate != GatePolicy::trainable && gate_init.has_value() && *gate_init != 0.0) {
    throw ConfigError("finetune: a non-trainable gate must be initialised at 0");
  }
}

std::string StageSpec::label() const {
  if (stage == Stage::pretrain) {
    return "pretrain";
  }
  std::string out = "finetune:";
  out += moneyness ? std::string(to_string(*moneyness)) : std::string("mixed");
  out += types == TypeFilter::call ? "-call" : types == TypeFilter::put ? "-put" : "-both";
  return out;
}

namespace {

nets::TrainableMask slice_mask(const nets::AafNet& net, bool backbone, bool gate, int head_only) {
  const auto n = net.params().slices().size();
  nets::TrainableMask m(n, backbone ? 1 : 0);
  if (backbone) {
    // The sentiment embedding only learns while the gate does.
    m[static_cast<std::size_t>(net.sentiment_weight())] = gate ? 1 : 0;
    m[static_cast<std::size_t>(net.sentiment_bias())] = gate ? 1 : 0;
  }
  m[static_cast<std::size_t>(net.gate_slice())] = gate ? 1 : 0;
  for (int h = 0; h < net.shape().heads; ++h) {
    const bool on = backbone ? (head_only < 0 || h == head_only) : h == head_only;
    m[static_cast<std::size_t>(net.head_weight(h))] = on ? 1 : 0;
    m[static_cast<std::size_t>(net.head_bias(h))] = on ? 1 : 0;
  }
  return m;
}

std::uint64_t stage_tag(const StageSpec& spec) {
  if (spec.stage == Stage::pretrain) {
    return 0;
  }
  const std::uint64_t m = spec.moneyness ? static_cast<std::uint64_t>(*spec.moneyness) + 1 : 0;
  return 1 + m * 3 + static_cast<std::uint64_t>(spec.types);
}

bool keeps(const StageSpec& spec, const PricingSample& s) {
  if (spec.moneyness && s.moneyness != *spec.moneyness) {
    return false;
  }
  switch (spec.types) {
    case TypeFilter::call:
      return s.contract.type == OptionType::call;
    case TypeFilter::put:
      return s.contract.type == OptionType::put;
    case TypeFilter::both:
      return true;
  }
  return false;
}

}  // namespace

bsde::TrainableMasks stage_masks(const nets::AafNet& value, const nets::AafNet& generator,
                                 const StageSpec& spec) {
  const bool gate = spec.gate == GatePolicy::trainable;
  const bool backbone = spec.backbone == BackbonePolicy::trainable;
  int head = -1;
  if (spec.types == TypeFilter::call) {
    head = nets::head_for(OptionType::call);
  } else if (spec.types == TypeFilter::put) {
    head = nets::head_for(OptionType::put);
  }
  bsde::TrainableMasks m;
  m.value = slice_mask(value, backbone, gate, head);
  // The generator has a single head, trained only together with its backbone.
  m.generator = slice_mask(generator, backbone, gate, backbone ? 0 : -1);
  return m;
}

std::vector<char> element_mask(const nets::ParamStore& ps, const nets::TrainableMask& slices) {
  if (slices.empty()) {
    return {};
  }
  std::vector<char> out(ps.size(), 0);
  for (std::size_t i = 0; i < ps.slices().size(); ++i) {
    if (slices[i]) {
      const auto& s = ps.slices()[i];
      std::fill_n(out.begin() + static_cast<std::ptrdiff_t>(s.offset), s.size(), 1);
    }
  }
  return out;
}

std::vector<PricingSample> stage_dataset(const StageSpec& spec,
                                         std::span<const PricingSample> data) {
  std::vector<PricingSample> out;
  for (const auto& s : data) {
    if (keeps(spec, s)) {
      out.push_back(s);
      if (spec.gate == GatePolicy::disabled) {
        out.back().sentiment = SentimentVector{};
      }
    }
  }
  return out;
}

StageResult run_stage(const StageSpec& spec, const TrainConfig& cfg,
                      std::span<const PricingSample> data, nets::AafNet& value,
                      nets::AafNet& generator, const StepCallback& on_step) {
  spec.validate();
  cfg.validate();
  StageResult result;
  if (cfg.steps == 0) {
    return result;
  }
  const auto rows = stage_dataset(spec, data);
  if (rows.empty()) {
    throw DataError("run_stage " + spec.label() + ": no training rows after filtering");
  }
  if (spec.gate != GatePolicy::trainable) {
    value.set_gate(0.0);
    generator.set_gate(0.0);
  } else if (spec.gate_init) {
    value.set_gate(*spec.gate_init);
    generator.set_gate(*spec.gate_init);
  }

  const auto masks = stage_masks(value, generator, spec);
  const auto vmask = element_mask(value.params(), masks.value);
  const auto gmask = element_mask(generator.params(), masks.generator);
  const bool gen_trainable =
      std::any_of(masks.generator.begin(), masks.generator.end(), [](char c) { return c != 0; });

  bsde::EngineConfig ec;
  ec.steps = cfg.time_steps;
  ec.paths = cfg.paths;
  ec.r = cfg.r;
  ec.weights = cfg.weights;
  ec.value_dropout = cfg.dropout;
  const bsde::LossEngine engine(ec);

  AdamState adam_v(value.params().size());
  AdamState adam_g(generator.params().size());
  const std::uint64_t tag = stage_tag(spec);
  const std::string label = spec.label();
  std::vector<const PricingSample*> batch(static_cast<std::size_t>(cfg.batch_size));
  bsde::NetGradients grads;

  for (int s = 0; s < cfg.steps; ++s) {
    const std::uint64_t step_seed = market::derive_seed(cfg.seed, tag, static_cast<std::uint64_t>(s));
    market::CounterRng pick(step_seed, 1);
    for (auto& p : batch) {
      p = &rows[pick.below(rows.size())];
    }
    const auto loss = engine.evaluate(value, generator, batch, step_seed, true, &grads, &masks);
    const std::array<std::span<double>, 2> groups{std::span<double>(grads.value),
                                                  std::span<double>(grads.generator)};
    clip_gradients(groups, cfg.clip);
    const double lr = lr_at(s + 1, cfg);
    adamw_step(value.params().values(), grads.value, adam_v, lr, cfg.weight_decay, vmask);
    if (gen_trainable) {
      adamw_step(generator.params().values(), grads.generator, adam_g, lr, cfg.weight_decay,
                 gmask);
    }
    value.enforce_aaf_floor();
    generator.enforce_aaf_floor();

    TraceRow row{s, label, loss, lr};
    if (on_step) {
      on_step(row);
    }
    result.trace.push_back(std::move(row));
  }
  return result;
}

void write_trace_csv(std::ostream& os, std::span<const TraceRow> rows, bool header) {
  if (header) {
    os << "step,stage,loss_total,loss_price,loss_terminal,loss_path,lr\n";
  }
  char buf[512];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%d,%s,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.step,
                  r.stage.c_str(), r.loss.total, r.loss.price, r.loss.terminal, r.loss.path, r.lr);
    os << buf;
  }
}

}  // namespace gpricing::trainer
