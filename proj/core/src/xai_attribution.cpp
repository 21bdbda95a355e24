#include "gpricing/xai/attribution.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "gpricing/errors.hpp"
#include "gpricing/evaluation/metrics.hpp"

namespace gpricing::xai {

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

ArchAdvantage arch_advantage(double e_bsm, double e_tb, double e_ablated) {
  return {e_bsm - e_ablated, e_tb - e_ablated};
}

AttributionResult integrated_gradients(const GradFn& f, std::span<const double> x,
                                       std::span<const double> baseline, int m,
                                       std::span<const int> groups) {
  const std::size_t n = x.size();
  if (n == 0 || baseline.size() != n || (!groups.empty() && groups.size() != n)) {
    throw ValidationError("integrated_gradients: input, baseline and groups must match in size");
  }
  if (m < 1) {
    throw ValidationError("integrated_gradients: need at least one step");
  }
  AttributionResult out;
  std::vector<double> point(n), grad(n), sum(n, 0.0);
  for (int k = 0; k < m; ++k) {
    const double alpha = (k + 0.5) / m;
    for (std::size_t i = 0; i < n; ++i) {
      point[i] = baseline[i] + alpha * (x[i] - baseline[i]);
    }
    std::fill(grad.begin(), grad.end(), 0.0);
    f(point, grad);
    for (std::size_t i = 0; i < n; ++i) {
      sum[i] += grad[i];
    }
  }
  out.attributions.resize(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    out.attributions[i] = (x[i] - baseline[i]) * sum[i] / m;
    total += out.attributions[i];
  }
  std::fill(grad.begin(), grad.end(), 0.0);
  out.f_x = f(x, grad);
  out.f_baseline = f(baseline, grad);
  out.completeness_gap = std::abs(total - (out.f_x - out.f_baseline));

  int n_groups = static_cast<int>(n);
  if (!groups.empty()) {
    n_groups = *std::max_element(groups.begin(), groups.end()) + 1;
    if (*std::min_element(groups.begin(), groups.end()) < 0) {
      throw ValidationError("integrated_gradients: group ids must be >= 0");
    }
  }
  out.group_attributions.assign(static_cast<std::size_t>(n_groups), 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto g = groups.empty() ? i : static_cast<std::size_t>(groups[i]);
    out.group_attributions[g] += out.attributions[i];
  }
  double abs_total = 0.0;
  for (const double a : out.group_attributions) {
    abs_total += std::abs(a);
  }
  out.shares.assign(out.group_attributions.size(), 0.0);
  if (abs_total > 0.0) {
    for (std::size_t g = 0; g < out.shares.size(); ++g) {
      out.shares[g] = std::abs(out.group_attributions[g]) / abs_total;
    }
  }
  return out;
}

GradFn pricing_view(const trainer::PricingModel& model, const PricingSample& sample) {
  namespace vi = nets::value_input;
  if (sample.daily_sigma.empty()) {
    throw ValidationError("pricing_view: sample without a volatility trajectory");
  }
  const nets::AafNet& base = model.nets_for({sample.moneyness, sample.contract.type}).value;
  const double r = model.rate();
  const PricingSample s = sample;
  return [&base, r, s](std::span<const double> in, std::span<double> grad) {
    if (in.size() != kPricingFeatureCount || grad.size() != kPricingFeatureCount) {
      throw ValidationError("pricing_view: expects (sigma, gate)");
    }
    nets::AafNet net = base;
    net.set_gate(in[kGate]);
    Eigen::MatrixXd x(vi::count, 1);
    x << 0.0, s.contract.underlying, s.contract.strike, tau_years(s.contract.tau_days), in[kSigma],
        r;
    const Eigen::MatrixXd e = Eigen::Map<const Eigen::VectorXd>(s.sentiment.e.data(), kSentimentDim);
    nets::ForwardCache cache;
    const int head = nets::head_for(s.contract.type);
    const auto res = net.forward(x, e, head, {}, &cache);
    nets::TrainableMask only_gate(net.params().slices().size(), 0);
    only_gate[static_cast<std::size_t>(net.gate_slice())] = 1;
    nets::ParamVector pgrad(net.params().size(), 0.0);
    nets::InputGrads ig;
    net.backward(cache, Eigen::RowVectorXd::Ones(1), nullptr, pgrad, &only_gate, &ig);
    grad[kSigma] = ig.channels(vi::sigma, 0);
    grad[kGate] = pgrad[net.params().slice(net.gate_slice()).offset];
    return res.value(0);
  };
}

AttributionResult attribute_price(const trainer::PricingModel& model, const PricingSample& sample,
                                  int m) {
  const auto f = pricing_view(model, sample);
  const double gate = model.nets_for({sample.moneyness, sample.contract.type}).value.gate();
  const std::array<double, kPricingFeatureCount> x{sample.daily_sigma.front(), gate};
  const std::array<double, kPricingFeatureCount> x0{kBaselineSigma, 0.0};
  return integrated_gradients(f, x, x0, m);
}

ShapleyResult shapley_two_player(double e_none, double e_rv, double e_sent, double e_full) {
  ShapleyResult r;
  r.phi_rv = 0.5 * ((e_none - e_rv) + (e_sent - e_full));
  r.phi_sent = 0.5 * ((e_none - e_sent) + (e_rv - e_full));
  r.total_gain = r.phi_rv + r.phi_sent;
  if (r.total_gain != 0.0) {
    r.share_rv = r.phi_rv / r.total_gain;
    r.share_sent = r.phi_sent / r.total_gain;
  }
  return r;
}

trainer::PriceOptions AblationConfig::price_options() const {
  trainer::PriceOptions opt;
  if (rv_mode == RvMode::constant) {
    opt.constant_sigma = kBaselineSigma;
  }
  opt.gate_off = sent_mode == SentMode::gated_off;
  return opt;
}

double evaluate_ablation(const trainer::PricingModel& model, std::span<const PricingSample> rows,
                         const AblationConfig& cfg) {
  const auto pred = model.price_all(rows, cfg.price_options());
  std::vector<double> y;
  y.reserve(rows.size());
  for (const auto& r : rows) {
    y.push_back(r.contract.settlement);
  }
  return evaluation::metrics(y, pred).mae;
}

ShapleyReport shapley_ablation(const trainer::PricingModel& model,
                               std::span<const PricingSample> rows) {
  ShapleyReport r;
  r.e_none = evaluate_ablation(model, rows, AblationConfig::none());
  r.e_rv = evaluate_ablation(model, rows, AblationConfig::rv_only());
  r.e_sent = evaluate_ablation(model, rows, AblationConfig::sent_only());
  r.e_full = evaluate_ablation(model, rows, AblationConfig::full());
  r.phi = shapley_two_player(r.e_none, r.e_rv, r.e_sent, r.e_full);
  return r;
}

void write_attribution_csv(std::ostream& os, std::span<const AttributionRow> rows) {
  os << "bucket,method,rv_share,sent_share,total_gain,completeness_gap\n";
  for (const auto& r : rows) {
    const bool ig = r.method == "ig";
    os << r.bucket << ',' << r.method << ',' << num(r.rv_share) << ',' << num(r.sent_share) << ','
       << (ig ? "" : num(r.total_gain)) << ',' << (ig ? num(r.completeness_gap) : "") << '\n';
  }
}

AttributionRow summarize_ig(const std::string& bucket, std::span<const AttributionResult> results) {
  AttributionRow row;
  row.bucket = bucket;
  row.method = "ig";
  double rv = 0.0, sent = 0.0;
  for (const auto& r : results) {
    rv += std::abs(r.group_attributions.at(kSigma));
    sent += std::abs(r.group_attributions.at(kGate));
    row.completeness_gap = std::max(row.completeness_gap, r.completeness_gap);
  }
  if (rv + sent > 0.0) {
    row.rv_share = rv / (rv + sent);
    row.sent_share = sent / (rv + sent);
  }
  return row;
}

}  // namespace gpricing::xai
