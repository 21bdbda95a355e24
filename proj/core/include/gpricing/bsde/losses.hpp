#pragma once

#include <span>

#include <Eigen/Core>

#include "gpricing/types.hpp"

namespace gpricing::bsde {

struct LossWeights {
  double lambda_price = 0.8;
  double lambda_terminal = 0.1;
  double lambda_path = 0.1;
  double omega_rmse = 1.0;
  double omega_mape = 1.0;
  double eps_mape = 0.01;  // CNY floor of the MAPE denominator
};

struct LossBreakdown {
  double price = 0.0;
  double terminal = 0.0;
  double path = 0.0;
  double total = 0.0;
  LossWeights weights;
};

/// omega_r * RMSE + omega_m * MAPE, MAPE as a fraction with denominator
/// max(|y|, eps). Throws ValidationError on length mismatch or empty input.
double loss_price(std::span<const double> u0, std::span<const double> y, double omega_r,
                  double omega_m, double eps_mape);

/// RMSE between terminal value-net outputs and the payoff at X_tau.
double loss_terminal(std::span<const double> u_tau, std::span<const double> x_tau, double strike,
                     OptionType type);

/// RMSE over all (step, path) cells. Callers pass rows 0..N-1 only.
/// Throws ValidationError on shape mismatch.
double loss_path(const Eigen::MatrixXd& u_path, const Eigen::MatrixXd& y_path);

/// lambda_1 * price + lambda_2 * terminal + lambda_3 * path.
double total_loss(const LossBreakdown& parts);

}  // namespace gpricing::bsde
