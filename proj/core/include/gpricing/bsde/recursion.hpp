#pragma once

#include <functional>
#include <span>

#include <Eigen/Core>

#include "gpricing/market/gbm.hpp"
#include "gpricing/nets/network.hpp"
#include "gpricing/types.hpp"

namespace gpricing::bsde {

/// Forward BSDE state for one contract. Rows are time steps, columns paths.
struct RecursionState {
  Eigen::MatrixXd u_path;  // (N+1) x M value-net evaluations
  Eigen::MatrixXd y_path;  // (N+1) x M recursion values; row N is Y_tau
  Eigen::MatrixXd z_path;  // N x M hedge terms
  Eigen::MatrixXd g_path;  // N x M generator outputs
  double u0 = 0.0;

  Eigen::Index steps() const { return z_path.rows(); }
  Eigen::Index paths() const { return z_path.cols(); }
};

/// Value network restricted to one contract: fills u and du/dX for the
/// given points at time t with volatility sigma.
using ValueFn = std::function<void(double t, std::span<const double> x, double sigma,
                                   std::span<double> u, std::span<double> du_dx)>;
/// Generator restricted to one contract.
using GeneratorFn =
    std::function<void(double t, std::span<const double> x, std::span<const double> y,
                       std::span<const double> z, double sigma, std::span<double> g)>;

/// Runs Y_{i+1} = Y_i - g_i dt + Z_i dW_i from Y_0 = u(0, X_0) with
/// Z_i = sigma_i X_i du/dX. The terminal value net is evaluated at
/// (tau, X_N) with the last step's sigma. Throws NumericalError naming the
/// step and path if Y stops being finite.
RecursionState recurse(const ValueFn& value, const GeneratorFn& generator,
                       const market::PathBatch& batch, double tau);

enum class HedgeMode {
  autodiff,           // tangent carried through the network
  finite_difference,  // central difference in X; cross-check only
};

ValueFn value_fn(const nets::AafNet& net, const OptionContract& contract,
                 const SentimentVector& e, double r, HedgeMode mode = HedgeMode::autodiff);
GeneratorFn generator_fn(const nets::AafNet& net, const OptionContract& contract,
                         const SentimentVector& e, double r);

/// recurse() on the networks in evaluation mode.
RecursionState recurse(const nets::AafNet& value, const nets::AafNet& generator,
                       const market::PathBatch& batch, const OptionContract& contract,
                       const SentimentVector& e, double r,
                       HedgeMode mode = HedgeMode::autodiff);

}  // namespace gpricing::bsde
