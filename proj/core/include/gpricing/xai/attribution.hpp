#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "gpricing/trainer/model.hpp"
#include "gpricing/types.hpp"

namespace gpricing::xai {

struct ArchAdvantage {
  double delta_bsm = 0.0;  // E_B - E_C
  double delta_tb = 0.0;   // E_TB - E_C
};

/// Error reductions of the ablated network (E_C: constant sigma, gate 0) over
/// the BSM (E_B) and TB (E_TB) baselines. Negative deltas are legitimate.
ArchAdvantage arch_advantage(double e_bsm, double e_tb, double e_ablated);

/// f(x) together with its gradient, written into `grad` (same size as x).
using GradFn = std::function<double(std::span<const double> x, std::span<double> grad)>;

struct AttributionResult {
  std::vector<double> attributions;  // per input feature
  std::vector<double> group_attributions;  // features summed per group
  std::vector<double> shares;        // |group| / sum |group|; all 0 if every group is 0
  double f_x = 0.0;
  double f_baseline = 0.0;
  double completeness_gap = 0.0;  // |sum attr - (f(x) - f(x'))|
};

/// Integrated gradients along the straight line from `baseline` to `x`,
/// midpoint rule with m steps. `groups[i]` names the block of feature i
/// (0-based, contiguous ids); empty means one group per feature. Throws
/// ValidationError on size mismatches or m < 1.
AttributionResult integrated_gradients(const GradFn& f, std::span<const double> x,
                                       std::span<const double> baseline, int m = 10,
                                       std::span<const int> groups = {});

/// Attributed inputs of the pricing view: the volatility seen by the price
/// (sigma channel at t = 0) and the sentiment gate.
enum PricingFeature : int { kSigma = 0, kGate = 1, kPricingFeatureCount = 2 };
/// Baseline of the pricing view: constant sigma and the sentiment channel off.
inline constexpr double kBaselineSigma = 0.2;

/// The model price of one quote as a function of (sigma_0, gate), with the
/// gate applied to the quote's bucket network. Gradients are exact
/// (backpropagated through the value network).
GradFn pricing_view(const trainer::PricingModel& model, const PricingSample& sample);

/// IG of the pricing view from (kBaselineSigma, 0) to the quote's actual
/// (sigma_0, gate). Group 0 is volatility, group 1 sentiment.
AttributionResult attribute_price(const trainer::PricingModel& model, const PricingSample& sample,
                                  int m = 10);

struct ShapleyResult {
  double phi_rv = 0.0;
  double phi_sent = 0.0;
  double share_rv = 0.0;  // phi / (phi_rv + phi_sent); 0 when the total is 0
  double share_sent = 0.0;
  double total_gain = 0.0;  // phi_rv + phi_sent
};

/// Exact two-player Shapley split of E_none - E_full.
ShapleyResult shapley_two_player(double e_none, double e_rv, double e_sent, double e_full);

enum class RvMode { trajectory, constant };
enum class SentMode { enabled, gated_off };

struct AblationConfig {
  RvMode rv_mode = RvMode::trajectory;
  SentMode sent_mode = SentMode::enabled;

  static AblationConfig none() { return {RvMode::constant, SentMode::gated_off}; }
  static AblationConfig rv_only() { return {RvMode::trajectory, SentMode::gated_off}; }
  static AblationConfig sent_only() { return {RvMode::constant, SentMode::enabled}; }
  static AblationConfig full() { return {RvMode::trajectory, SentMode::enabled}; }

  trainer::PriceOptions price_options() const;
};

/// Test MAE with inputs replaced at inference time only (no parameter
/// changes). The full configuration prices exactly like PricingModel::price_all.
double evaluate_ablation(const trainer::PricingModel& model, std::span<const PricingSample> rows,
                         const AblationConfig& cfg);

struct ShapleyReport {
  double e_none = 0.0, e_rv = 0.0, e_sent = 0.0, e_full = 0.0;
  ShapleyResult phi;
};

/// Runs the four ablations on `rows` and decomposes the gain.
ShapleyReport shapley_ablation(const trainer::PricingModel& model,
                               std::span<const PricingSample> rows);

/// One line of attribution.csv.
struct AttributionRow {
  std::string bucket;
  std::string method;  // "ig" or "shapley"
  double rv_share = 0.0;
  double sent_share = 0.0;
  double total_gain = 0.0;        // shapley only
  double completeness_gap = 0.0;  // ig only
};

/// Header bucket,method,rv_share,sent_share,total_gain,completeness_gap; the
/// column that does not apply to a method is left empty.
void write_attribution_csv(std::ostream& os, std::span<const AttributionRow> rows);

/// IG summary of a set of quotes: shares of the mean absolute block
/// attributions and the largest completeness gap.
AttributionRow summarize_ig(const std::string& bucket, std::span<const AttributionResult> results);

}  // namespace gpricing::xai
