#include "gpricing/trainer/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "gpricing/errors.hpp"
#include "gpricing/log.hpp"
#include "gpricing/market/rng.hpp"

namespace gpricing::trainer {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;

const std::string kPretrain = "pretrain";

}  // namespace

std::vector<Bucket> all_buckets() {
  std::vector<Bucket> out;
  for (const auto m : kMoneynessClasses) {
    for (const auto t : kOptionTypes) {
      out.push_back({m, t});
    }
  }
  return out;
}

PricingModel::PricingModel(NetPair pretrained, double r) : pretrained_(std::move(pretrained)), r_(r) {
  if (pretrained_.value.shape().kind != nets::NetKind::value ||
      pretrained_.generator.shape().kind != nets::NetKind::generator) {
    throw ConfigError("PricingModel: network kinds do not match their roles");
  }
}

void PricingModel::set_bucket(const Bucket& b, NetPair nets) {
  buckets_.insert_or_assign(b, std::move(nets));
}

const NetPair& PricingModel::nets_for(const Bucket& b) const {
  const auto it = buckets_.find(b);
  return it == buckets_.end() ? pretrained_ : it->second;
}

double PricingModel::price(const PricingSample& s, const PriceOptions& opt) const {
  return price_all(std::span<const PricingSample>(&s, 1), opt).front();
}

std::vector<double> PricingModel::price_all(std::span<const PricingSample> rows,
                                            const PriceOptions& opt) const {
  namespace vi = nets::value_input;
  std::vector<double> out(rows.size(), 0.0);
  // Group rows by bucket so each network runs one batched forward.
  std::map<Bucket, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    groups[{rows[i].moneyness, rows[i].contract.type}].push_back(i);
  }
  for (const auto& [bucket, idx] : groups) {
    const nets::AafNet* net = &nets_for(bucket).value;
    std::optional<nets::AafNet> gated_off;
    if (opt.gate_off && net->gate() != 0.0) {
      gated_off.emplace(*net);
      gated_off->set_gate(0.0);
      net = &*gated_off;
    }
    const auto B = static_cast<Index>(idx.size());
    MatrixXd x(vi::count, B);
    MatrixXd e(kSentimentDim, B);
    for (Index j = 0; j < B; ++j) {
      const PricingSample& s = rows[idx[static_cast<std::size_t>(j)]];
      if (s.daily_sigma.empty() && !opt.constant_sigma) {
        throw ValidationError("PricingModel: sample without a volatility trajectory");
      }
      const double sigma0 = opt.constant_sigma ? *opt.constant_sigma : s.daily_sigma.front();
      x.col(j) << 0.0, s.contract.underlying, s.contract.strike, tau_years(s.contract.tau_days),
          sigma0, r_;
      for (std::size_t k = 0; k < kSentimentDim; ++k) {
        e(static_cast<Index>(k), j) = s.sentiment.e[k];
      }
    }
    // Calls and puts of a bucket share the head by construction.
    const auto res = net->forward(x, e, nets::head_for(bucket.type));
    for (Index j = 0; j < B; ++j) {
      out[idx[static_cast<std::size_t>(j)]] = res.value(j);
    }
  }
  return out;
}

nets::Checkpoint PricingModel::to_checkpoint() const {
  nets::Checkpoint ck;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", r_);
  ck.meta["rate"] = buf;
  ck.nets.emplace_back(kPretrain + ".value", pretrained_.value);
  ck.nets.emplace_back(kPretrain + ".generator", pretrained_.generator);
  for (const auto& [b, pair] : buckets_) {
    ck.nets.emplace_back(bucket_name(b) + ".value", pair.value);
    ck.nets.emplace_back(bucket_name(b) + ".generator", pair.generator);
  }
  return ck;
}

PricingModel PricingModel::from_checkpoint(const nets::Checkpoint& ck) {
  double r = 0.0;
  if (const auto it = ck.meta.find("rate"); it != ck.meta.end()) {
    r = std::strtod(it->second.c_str(), nullptr);
  }
  PricingModel model({ck.net(kPretrain + ".value"), ck.net(kPretrain + ".generator")}, r);
  for (const auto& b : all_buckets()) {
    const std::string tag = bucket_name(b);
    bool have_value = false;
    bool have_gen = false;
    for (const auto& [label, net] : ck.nets) {
      have_value = have_value || label == tag + ".value";
      have_gen = have_gen || label == tag + ".generator";
    }
    if (have_value && have_gen) {
      model.set_bucket(b, {ck.net(tag + ".value"), ck.net(tag + ".generator")});
    }
  }
  return model;
}

PricingModel finetune_model(const TrainPlan& plan, const NetPair& pretrained,
                            std::span<const PricingSample> train, const TraceSink& sink) {
  PricingModel model(pretrained, plan.finetune.r);
  const auto buckets = plan.buckets.empty() ? all_buckets() : plan.buckets;
  for (const auto& b : buckets) {
    StageSpec spec = StageSpec::finetune(b);
    if (plan.gate_override) {
      spec.gate = *plan.gate_override;
      if (spec.gate != GatePolicy::trainable) {
        spec.gate_init = 0.0;
      }
    }
    if (stage_dataset(spec, train).empty()) {
      log::warn("finetune: bucket " + bucket_name(b) + " has no training rows; using pretrained nets");
      continue;
    }
    NetPair pair = pretrained;
    TrainConfig cfg = plan.finetune;
    cfg.seed = market::derive_seed(plan.seed, 1000 + static_cast<std::uint64_t>(b.moneyness) * 2 +
                                                  static_cast<std::uint64_t>(b.type));
    run_stage(spec, cfg, train, pair.value, pair.generator, sink);
    model.set_bucket(b, std::move(pair));
  }
  return model;
}

void fit_scaling(NetPair& nets, std::span<const PricingSample> train) {
  if (train.empty()) {
    throw DataError("fit_scaling: empty training set");
  }
  const double n = static_cast<double>(train.size());
  double spot = 0.0, spot2 = 0.0, tau = 0.0, sigma = 0.0, label = 0.0;
  for (const auto& s : train) {
    spot += s.contract.underlying;
    spot2 += s.contract.underlying * s.contract.underlying;
    tau += tau_years(s.contract.tau_days);
    sigma += s.daily_sigma.empty() ? 0.0 : s.daily_sigma.front();
    label += s.contract.settlement;
  }
  spot /= n;
  tau /= n;
  sigma /= n;
  label /= n;
  // Strike and spot share one map so moneyness stays a plain difference.
  const double spot_sd = std::max(std::sqrt(std::max(spot2 / n - spot * spot, 0.0)), 0.01 * spot);
  const double tau_scale = tau > 0.0 ? tau : 1.0;
  const double sigma_scale = sigma > 0.0 ? sigma : 1.0;
  const double price_scale = label > 0.0 ? label : 1.0;

  namespace vi = nets::value_input;
  namespace gi = nets::generator_input;
  nets::Scaling v = nets::Scaling::identity(vi::count);
  v.scale[vi::t] = v.scale[vi::tau] = tau_scale;
  v.shift[vi::X] = v.shift[vi::K] = spot;
  v.scale[vi::X] = v.scale[vi::K] = spot_sd;
  v.scale[vi::sigma] = sigma_scale;
  v.out_scale = price_scale;
  nets.value.set_scaling(v);

  nets::Scaling g = nets::Scaling::identity(gi::count);
  g.scale[gi::t] = g.scale[gi::tau] = tau_scale;
  g.shift[gi::X] = g.shift[gi::K] = spot;
  g.scale[gi::X] = g.scale[gi::K] = spot_sd;
  g.scale[gi::Y] = price_scale;
  g.scale[gi::Z] = sigma_scale * spot;  // hedge exposure of a unit-delta position
  g.scale[gi::sigma] = sigma_scale;
  nets.generator.set_scaling(g);
}

NetPair pretrain_model(const TrainPlan& plan, std::span<const PricingSample> train,
                       const TraceSink& sink) {
  NetPair nets{nets::AafNet(plan.value_shape), nets::AafNet(plan.generator_shape)};
  nets::init_params(nets.value, market::derive_seed(plan.seed, 1), 0.0, plan.init);
  nets::init_params(nets.generator, market::derive_seed(plan.seed, 2), 0.0, plan.init);
  if (plan.fit_scaling) {
    fit_scaling(nets, train);
  }
  TrainConfig cfg = plan.pretrain;
  cfg.seed = market::derive_seed(plan.seed, 3);
  run_stage(StageSpec::pretrain(), cfg, train, nets.value, nets.generator, sink);
  return nets;
}

PricingModel train_model(const TrainPlan& plan, std::span<const PricingSample> train,
                         const TraceSink& sink) {
  return finetune_model(plan, pretrain_model(plan, train, sink), train, sink);
}

}  // namespace gpricing::trainer
