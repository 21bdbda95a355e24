#include "commands.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <memory>

#include "gpricing/errors.hpp"
#include "gpricing/evaluation/metrics.hpp"
#include "gpricing/log.hpp"
#include "gpricing/market/bsm_sweep.hpp"
#include "gpricing/nets/checkpoint.hpp"
#include "gpricing/xai/attribution.hpp"

namespace gpricing::cli {

namespace {

namespace fs = std::filesystem;

fs::path out_dir(const RunConfig& cfg, const CommandOptions& opt) {
  const fs::path dir = opt.out ? *opt.out : cfg.out;
  fs::create_directories(dir);
  return dir;
}

fs::path seed_dir(const fs::path& out, std::uint64_t seed) {
  const fs::path dir = out / ("seed-" + std::to_string(seed));
  fs::create_directories(dir);
  return dir;
}

std::vector<std::uint64_t> seeds(const RunConfig& cfg, const CommandOptions& opt) {
  return opt.seed ? std::vector<std::uint64_t>{*opt.seed} : cfg.seeds;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) {
    throw DataError("cannot write " + path.string());
  }
  return os;
}

void require(const fs::path& p, const char* key) {
  if (p.empty()) {
    throw ConfigError(std::string("config: ") + key + " is required for this command");
  }
  if (!fs::exists(p)) {
    throw DataError(std::string(key) + ": file not found: " + p.string());
  }
}

std::vector<OptionContract> load_quotes(const RunConfig& cfg) {
  require(cfg.options, "data.options");
  features::CleaningStats st;
  auto quotes = features::read_options_csv(cfg.options, &st);
  log::info("options: read " + std::to_string(st.read) + ", dropped " +
            std::to_string(st.expired) + " expiring and " + std::to_string(st.below_min) +
            " below the settlement floor, kept " + std::to_string(st.kept));
  if (quotes.empty()) {
    throw DataError("options: no quotes left after cleaning");
  }
  return quotes;
}

std::vector<PricingSample> load_samples(const RunConfig& cfg) {
  const auto quotes = load_quotes(cfg);
  require(cfg.rv_forecast, "data.rv_forecast");
  const auto rv = features::read_rv_csv(cfg.rv_forecast);
  std::unique_ptr<features::SentimentHistory> history;
  if (!cfg.guba_daily.empty()) {
    require(cfg.guba_daily, "data.guba_daily");
    history = std::make_unique<features::SentimentHistory>(features::read_guba_csv(cfg.guba_daily));
  }
  return features::assemble(quotes, rv, history.get());
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

trainer::PricingModel load_model(const fs::path& dir) {
  for (const char* name : {"model.ckpt", "pretrain.ckpt"}) {
    if (fs::exists(dir / name)) {
      return trainer::PricingModel::from_checkpoint(nets::read_checkpoint(dir / name));
    }
  }
  throw DataError("no checkpoint in " + dir.string() + "; run `train` first");
}

void write_trace(const fs::path& path, const std::vector<trainer::TraceRow>& rows) {
  auto os = open_output(path);
  trainer::write_trace_csv(os, rows);
}

}  // namespace

void cmd_simulate(const RunConfig& cfg, const CommandOptions& opt) {
  auto sim = cfg.simulate;
  if (opt.seed) {
    sim.seed = *opt.seed;
  }
  const auto market = features::simulate_market(sim);
  const auto dir = out_dir(cfg, opt);
  {
    auto os = open_output(dir / "options.csv");
    features::write_options_csv(os, market.quotes);
  }
  auto os = open_output(dir / "rv_forecast.csv");
  features::write_rv_csv(os, market.rv);
  log::info("simulate: wrote " + std::to_string(market.quotes.size()) + " quotes to " +
            dir.string());
}

void cmd_features(const RunConfig& cfg, const CommandOptions& opt) {
  const auto rows = load_samples(cfg);
  const auto dir = out_dir(cfg, opt);
  {
    auto os = open_output(dir / "feature_manifest.csv");
    features::write_feature_manifest(os);
  }
  auto os = open_output(dir / "features.csv");
  os << "date,type,strike,underlying,tau_days,moneyness,burn_in,e0,e1,e2,e3,e4\n";
  for (const auto& r : rows) {
    const auto& c = r.contract;
    os << c.date.str() << ',' << (c.type == OptionType::call ? 'C' : 'P') << ',' << num(c.strike)
       << ',' << num(c.underlying) << ',' << c.tau_days << ',' << to_string(r.moneyness) << ','
       << (r.sentiment.burn_in ? 1 : 0);
    for (const double e : r.sentiment.e) {
      os << ',' << num(e);
    }
    os << '\n';
  }
}

void cmd_train(const RunConfig& cfg, const CommandOptions& opt) {
  if (!opt.stage.empty() && opt.stage != "pretrain" && opt.stage != "finetune") {
    throw ConfigError("--stage must be pretrain or finetune");
  }
  const auto rows = load_samples(cfg);
  const auto out = out_dir(cfg, opt);
  for (const auto seed : seeds(cfg, opt)) {
    const auto dir = seed_dir(out, seed);
    const auto split = features::split_dataset(rows, seed);
    trainer::TrainPlan plan = cfg.plan;
    plan.seed = seed;
    std::vector<trainer::TraceRow> trace;
    auto sink = [&](const trainer::TraceRow& r) {
      trace.push_back(r);
      if (r.step % 100 == 0) {
        log::info("seed " + std::to_string(seed) + " " + r.stage + " step " +
                  std::to_string(r.step) + " loss " + num(r.loss.total));
      }
    };

    std::optional<trainer::NetPair> pretrained;
    if (opt.stage != "finetune") {
      pretrained = trainer::pretrain_model(plan, split.train, sink);
      nets::write_checkpoint(dir / "pretrain.ckpt",
                             trainer::PricingModel(*pretrained, cfg.r).to_checkpoint());
      write_trace(dir / "trace_pretrain.csv", trace);
      trace.clear();
    } else {
      if (!fs::exists(dir / "pretrain.ckpt")) {
        throw DataError("finetune: missing " + (dir / "pretrain.ckpt").string());
      }
      pretrained = trainer::PricingModel::from_checkpoint(nets::read_checkpoint(dir / "pretrain.ckpt"))
                       .pretrained();
    }
    if (opt.stage != "pretrain") {
      const auto model = trainer::finetune_model(plan, *pretrained, split.train, sink);
      nets::write_checkpoint(dir / "model.ckpt", model.to_checkpoint());
      write_trace(dir / "trace_finetune.csv", trace);
    }
  }
}

void cmd_price(const RunConfig& cfg, const CommandOptions& opt) {
  const auto rows = load_samples(cfg);
  const auto out = out_dir(cfg, opt);
  for (const auto seed : seeds(cfg, opt)) {
    const auto dir = seed_dir(out, seed);
    const auto model = load_model(dir);
    const auto pred = model.price_all(rows);
    auto os = open_output(dir / "predictions.csv");
    evaluation::write_predictions_csv(os, rows, pred);
  }
}

void cmd_evaluate(const RunConfig& cfg, const CommandOptions& opt) {
  const auto rows = load_samples(cfg);
  const auto out = out_dir(cfg, opt);
  const auto run_seeds = seeds(cfg, opt);
  std::vector<std::vector<evaluation::MetricsReport>> all;
  for (const auto seed : run_seeds) {
    const auto dir = seed_dir(out, seed);
    const auto split = features::split_dataset(rows, seed);
    if (split.test.empty()) {
      throw DataError("evaluate: empty test split for seed " + std::to_string(seed));
    }
    const auto model = load_model(dir);
    const auto pred = model.price_all(split.test);
    const auto report = evaluation::report_by_bucket(split.test, pred);
    {
      auto os = open_output(dir / "report.csv");
      evaluation::write_report_csv(os, report);
    }
    {
      auto os = open_output(dir / "extreme.csv");
      evaluation::write_extreme_csv(os, split.test, pred);
    }
    auto os = open_output(dir / "predictions_test.csv");
    evaluation::write_predictions_csv(os, split.test, pred);
    all.push_back(report);
  }
  // Seed means per bucket; r2 averaged over the seeds where it is defined.
  std::vector<evaluation::MetricsReport> mean = all.front();
  for (std::size_t b = 0; b < mean.size(); ++b) {
    double n = 0.0, mae = 0.0, rmse = 0.0, mape = 0.0, r2 = 0.0;
    int with_rows = 0, with_r2 = 0;
    for (const auto& rep : all) {
      n += static_cast<double>(rep[b].n);
      if (rep[b].n > 0) {
        ++with_rows;
        mae += rep[b].mae;
        rmse += rep[b].rmse;
        mape += rep[b].mape;
      }
      if (rep[b].r2) {
        ++with_r2;
        r2 += *rep[b].r2;
      }
    }
    auto& m = mean[b];
    m.n = static_cast<std::size_t>(std::llround(n / static_cast<double>(all.size())));
    if (with_rows > 0) {
      m.mae = mae / with_rows;
      m.rmse = rmse / with_rows;
      m.mape = mape / with_rows;
    }
    m.r2.reset();
    if (with_r2 > 0) {
      m.r2 = r2 / with_r2;
    }
  }
  auto os = open_output(out / "report_mean.csv");
  evaluation::write_report_csv(os, mean);
}

void cmd_attribute(const RunConfig& cfg, const CommandOptions& opt) {
  if (opt.method != "ig" && opt.method != "shapley") {
    throw ConfigError("--method must be ig or shapley");
  }
  const auto rows = load_samples(cfg);
  const auto out = out_dir(cfg, opt);
  for (const auto seed : seeds(cfg, opt)) {
    const auto dir = seed_dir(out, seed);
    const auto split = features::split_dataset(rows, seed);
    const auto model = load_model(dir);
    std::map<std::string, std::vector<PricingSample>> by_bucket;
    by_bucket["overall"] = split.test;
    for (const auto& r : split.test) {
      by_bucket[bucket_name({r.moneyness, r.contract.type})].push_back(r);
    }
    std::vector<xai::AttributionRow> table;
    if (opt.method == "ig") {
      std::map<std::string, std::vector<xai::AttributionResult>> results;
      for (const auto& r : split.test) {
        const auto res = xai::attribute_price(model, r, cfg.ig_steps);
        results["overall"].push_back(res);
        results[bucket_name({r.moneyness, r.contract.type})].push_back(res);
      }
      for (const auto& [name, res] : results) {
        table.push_back(xai::summarize_ig(name, res));
      }
    } else {
      auto os = open_output(dir / "ablation.csv");
      os << "bucket,e_none,e_rv,e_sent,e_full,phi_rv,phi_sent,total_gain\n";
      for (const auto& [name, bucket_rows] : by_bucket) {
        if (bucket_rows.empty()) {
          continue;
        }
        const auto rep = xai::shapley_ablation(model, bucket_rows);
        os << name << ',' << num(rep.e_none) << ',' << num(rep.e_rv) << ',' << num(rep.e_sent)
           << ',' << num(rep.e_full) << ',' << num(rep.phi.phi_rv) << ','
           << num(rep.phi.phi_sent) << ',' << num(rep.phi.total_gain) << '\n';
        table.push_back({name, "shapley", rep.phi.share_rv, rep.phi.share_sent,
                         rep.phi.total_gain, 0.0});
      }
    }
    auto os = open_output(dir / ("attribution_" + opt.method + ".csv"));
    xai::write_attribution_csv(os, table);
  }
}

void cmd_bsm_sweep(const RunConfig& cfg, const CommandOptions& opt) {
  const auto quotes = load_quotes(cfg);
  const auto table = market::bsm_sweep(quotes, cfg.sigma_grid, cfg.r);
  for (const auto& w : table.warnings) {
    log::warn(w);
  }
  auto os = open_output(out_dir(cfg, opt) / "bsm_sweep.csv");
  os << "month,samples,sigma,mae,is_argmin\n";
  for (const auto& m : table.months) {
    for (std::size_t k = 0; k < table.sigma_grid.size(); ++k) {
      os << m.month << ',' << m.samples << ',' << num(table.sigma_grid[k]) << ',' << num(m.mae[k])
         << ',' << (k == m.argmin ? 1 : 0) << '\n';
    }
  }
}

}  // namespace gpricing::cli
