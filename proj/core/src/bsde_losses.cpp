#include "gpricing/bsde/losses.hpp"

#include <cmath>

#include "gpricing/errors.hpp"

namespace gpricing::bsde {

double loss_price(std::span<const double> u0, std::span<const double> y, double omega_r,
                  double omega_m, double eps_mape) {
  if (u0.size() != y.size()) {
    throw ValidationError("loss_price: prediction and label lengths differ");
  }
  if (u0.empty()) {
    throw ValidationError("loss_price: empty batch");
  }
  double sq = 0.0;
  double ape = 0.0;
  for (std::size_t i = 0; i < u0.size(); ++i) {
    const double d = u0[i] - y[i];
    sq += d * d;
    ape += std::abs(d) / std::max(std::abs(y[i]), eps_mape);
  }
  const auto n = static_cast<double>(u0.size());
  return omega_r * std::sqrt(sq / n) + omega_m * ape / n;
}

double loss_terminal(std::span<const double> u_tau, std::span<const double> x_tau, double strike,
                     OptionType type) {
  if (u_tau.size() != x_tau.size() || u_tau.empty()) {
    throw ValidationError("loss_terminal: need equal, nonempty path sets");
  }
  double sq = 0.0;
  for (std::size_t j = 0; j < u_tau.size(); ++j) {
    const double d = u_tau[j] - payoff(type, x_tau[j], strike);
    sq += d * d;
  }
  return std::sqrt(sq / static_cast<double>(u_tau.size()));
}

double loss_path(const Eigen::MatrixXd& u_path, const Eigen::MatrixXd& y_path) {
  if (u_path.rows() != y_path.rows() || u_path.cols() != y_path.cols() || u_path.size() == 0) {
    throw ValidationError("loss_path: U and Y paths must have the same nonempty shape");
  }
  return std::sqrt((u_path - y_path).squaredNorm() / static_cast<double>(u_path.size()));
}

double total_loss(const LossBreakdown& parts) {
  const LossWeights& w = parts.weights;
  return w.lambda_price * parts.price + w.lambda_terminal * parts.terminal +
         w.lambda_path * parts.path;
}

}  // namespace gpricing::bsde
