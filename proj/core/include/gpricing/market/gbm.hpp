#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace gpricing::market {

/// M simulated risk-neutral price paths on a uniform grid of N steps.
struct PathBatch {
  std::size_t paths = 0;
  std::size_t steps = 0;
  double dt = 0.0;                  // years
  std::vector<double> spot;         // paths x (steps + 1), path-major
  std::vector<double> dW;           // paths x steps, Brownian increments
  std::vector<double> sigma_steps;  // per-step annualised volatility

  double x(std::size_t path, std::size_t step) const { return spot[path * (steps + 1) + step]; }
  double dw(std::size_t path, std::size_t step) const { return dW[path * steps + step]; }
  double terminal(std::size_t path) const { return x(path, steps); }
};

/// Exact log-normal stepping under dX = rX dt + sigma_i X dW with
/// piecewise-constant sigma. Path j draws from counter stream (seed, j), so
/// the result is bitwise identical for any `threads`.
/// Throws ValidationError unless x0 > 0 and dt > 0.
PathBatch simulate_paths(double x0, double r, std::span<const double> sigma_steps, double dt,
                         std::size_t paths, std::uint64_t seed, unsigned threads = 1);

/// Same stepping driven by caller-supplied standard normals
/// (paths x steps, path-major). Used to pin the increments in tests.
PathBatch paths_from_normals(double x0, double r, std::span<const double> sigma_steps, double dt,
                             std::size_t paths, std::span<const double> normals);

}  // namespace gpricing::market
