#include "config.hpp"

#include <functional>
#include <map>
#include <sstream>
#include <string>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "gpricing/errors.hpp"
#include "gpricing/market/bsm_sweep.hpp"

namespace gpricing::cli {

namespace {

namespace pt = boost::property_tree;

using Setter = std::function<void(const std::string&)>;

template <class T>
T parse_value(const std::string& key, const std::string& text) {
  std::istringstream is(text);
  T v{};
  if (!(is >> v) || !(is >> std::ws).eof()) {
    throw ConfigError("config: bad value '" + text + "' for " + key);
  }
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "on" || text == "1" || text == "yes") {
    return true;
  }
  if (text == "false" || text == "off" || text == "0" || text == "no") {
    return false;
  }
  throw ConfigError("config: bad boolean '" + text + "' for " + key);
}

template <class T>
std::vector<T> parse_list(const std::string& key, const std::string& text) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    out.push_back(parse_value<T>(key, item));
  }
  return out;
}

template <class T>
void bind_key(std::map<std::string, Setter>& s, const std::string& key, T& target) {
  s[key] = [&target, key](const std::string& v) { target = parse_value<T>(key, v); };
}

void bind_train(std::map<std::string, Setter>& s, const std::string& section,
                trainer::TrainConfig& c) {
  auto key = [&](const char* k) { return section + "." + k; };
  bind_key(s, key("batch_size"), c.batch_size);
  bind_key(s, key("time_steps"), c.time_steps);
  bind_key(s, key("paths"), c.paths);
  bind_key(s, key("peak_lr"), c.peak_lr);
  bind_key(s, key("min_lr"), c.min_lr);
  bind_key(s, key("steps"), c.steps);
  bind_key(s, key("warmup"), c.warmup);
  bind_key(s, key("clip"), c.clip);
  bind_key(s, key("weight_decay"), c.weight_decay);
  bind_key(s, key("dropout"), c.dropout);
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

}  // namespace

void RunConfig::validate() const {
  if (seeds.empty()) {
    throw ConfigError("config: run.seeds must not be empty");
  }
  if (ig_steps < 1) {
    throw ConfigError("config: attribute.steps must be >= 1");
  }
  if (sigma_grid.empty()) {
    throw ConfigError("config: bsm.grid must not be empty");
  }
  for (const double s : sigma_grid) {
    if (!(s > 0.0)) {
      throw ConfigError("config: bsm.grid entries must be positive");
    }
  }
  simulate.validate();
  plan.pretrain.validate();
  plan.finetune.validate();
}

RunConfig default_config() {
  RunConfig c;
  c.sigma_grid = market::default_sigma_grid();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  pt::ptree tree;
  try {
    pt::read_ini(path.string(), tree);
  } catch (const pt::ini_parser_error& e) {
    if (!std::filesystem::exists(path)) {
      throw DataError("config file not found: " + path.string());
    }
    throw ConfigError(std::string("config: ") + e.what());
  }
  RunConfig c = default_config();
  const auto base = path.parent_path();
  auto& plan = c.plan;
  auto& w = plan.pretrain.weights;
  std::map<std::string, Setter> s;

  s["data.options"] = [&](const std::string& v) { c.options = resolve(base, v); };
  s["data.rv_forecast"] = [&](const std::string& v) { c.rv_forecast = resolve(base, v); };
  s["data.guba_daily"] = [&](const std::string& v) { c.guba_daily = resolve(base, v); };

  auto& sim = c.simulate;
  bind_key(s, "simulate.contracts", sim.contracts);
  bind_key(s, "simulate.sigma_star", sim.sigma_star);
  bind_key(s, "simulate.noise", sim.noise);
  bind_key(s, "simulate.spot0", sim.spot0);
  bind_key(s, "simulate.trading_days", sim.trading_days);
  s["simulate.start"] = [&](const std::string& v) {
    try {
      sim.start = Date::parse(v);
    } catch (const DataError& e) {
      throw ConfigError(std::string("config: simulate.start: ") + e.what());
    }
  };
  bind_key(s, "simulate.moneyness_lo", sim.moneyness_lo);
  bind_key(s, "simulate.moneyness_hi", sim.moneyness_hi);
  bind_key(s, "simulate.strike_step", sim.strike_step);
  bind_key(s, "simulate.tau_min", sim.tau_min);
  bind_key(s, "simulate.tau_max", sim.tau_max);
  bind_key(s, "simulate.seed", sim.seed);

  s["run.seeds"] = [&](const std::string& v) { c.seeds = parse_list<std::uint64_t>("run.seeds", v); };
  s["run.out"] = [&](const std::string& v) { c.out = resolve(base, v); };
  bind_key(s, "run.r", c.r);

  bind_train(s, "pretrain", plan.pretrain);
  bind_train(s, "finetune", plan.finetune);

  bind_key(s, "loss.lambda_price", w.lambda_price);
  bind_key(s, "loss.lambda_terminal", w.lambda_terminal);
  bind_key(s, "loss.lambda_path", w.lambda_path);
  bind_key(s, "loss.omega_rmse", w.omega_rmse);
  bind_key(s, "loss.omega_mape", w.omega_mape);
  bind_key(s, "loss.eps_mape", w.eps_mape);

  int embed = plan.value_shape.embed;
  std::vector<int> hidden = plan.value_shape.hidden;
  bind_key(s, "model.embed", embed);
  s["model.hidden"] = [&](const std::string& v) { hidden = parse_list<int>("model.hidden", v); };
  s["model.sentiment"] = [&](const std::string& v) {
    if (!parse_bool("model.sentiment", v)) {
      plan.gate_override = trainer::GatePolicy::frozen_zero;
    }
  };
  s["model.fit_scaling"] = [&](const std::string& v) { plan.fit_scaling = parse_bool("model.fit_scaling", v); };
  bind_key(s, "model.expansion_gain", plan.init.expansion_gain);
  s["model.buckets"] = [&](const std::string& v) {
    plan.buckets.clear();
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const auto dash = item.find('-');
      if (dash == std::string::npos) {
        throw ConfigError("config: model.buckets entries look like ATM-call");
      }
      try {
        plan.buckets.push_back({parse_moneyness(item.substr(0, dash)),
                                parse_option_type(item.substr(dash + 1))});
      } catch (const Error& e) {
        throw ConfigError(std::string("config: model.buckets: ") + e.what());
      }
    }
  };

  bind_key(s, "attribute.steps", c.ig_steps);
  s["bsm.grid"] = [&](const std::string& v) { c.sigma_grid = parse_list<double>("bsm.grid", v); };

  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) {
      throw ConfigError("config: key '" + section + "' outside a section");
    }
    for (const auto& [key, value] : body) {
      const std::string full = section + "." + key;
      const auto it = s.find(full);
      if (it == s.end()) {
        throw ConfigError("config: unknown key '" + full + "'");
      }
      it->second(value.data());
    }
  }

  plan.value_shape = nets::NetShape::value_net(embed, hidden);
  plan.generator_shape = nets::NetShape::generator_net(embed, hidden);
  plan.finetune.weights = w;
  plan.pretrain.r = plan.finetune.r = c.r;
  c.simulate.r = c.r;
  c.validate();
  return c;
}

}  // namespace gpricing::cli
