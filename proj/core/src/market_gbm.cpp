#include "gpricing/market/gbm.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <thread>

#include "gpricing/errors.hpp"
#include "gpricing/market/rng.hpp"

namespace gpricing::market {

namespace {

PathBatch make_batch(double x0, double dt, std::span<const double> sigma_steps,
                     std::size_t paths) {
  if (!(x0 > 0.0) || !std::isfinite(x0)) {
    throw ValidationError("simulate_paths: x0 must be positive, got " + std::to_string(x0));
  }
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw ValidationError("simulate_paths: dt must be positive, got " + std::to_string(dt));
  }
  if (sigma_steps.empty()) {
    throw ValidationError("simulate_paths: need at least one step");
  }
  PathBatch b;
  b.paths = paths;
  b.steps = sigma_steps.size();
  b.dt = dt;
  b.sigma_steps.assign(sigma_steps.begin(), sigma_steps.end());
  b.spot.assign(paths * (b.steps + 1), 0.0);
  b.dW.assign(paths * b.steps, 0.0);
  return b;
}

// Fills path j given a source of standard normals.
template <class NormalSource>
void step_path(PathBatch& b, double x0, double r, std::size_t j, NormalSource&& next_normal) {
  const double sqdt = std::sqrt(b.dt);
  double* xs = &b.spot[j * (b.steps + 1)];
  double* dws = &b.dW[j * b.steps];
  xs[0] = x0;
  for (std::size_t i = 0; i < b.steps; ++i) {
    const double s = b.sigma_steps[i];
    const double dw = sqdt * next_normal(i);
    dws[i] = dw;
    xs[i + 1] = xs[i] * std::exp((r - 0.5 * s * s) * b.dt + s * dw);
  }
}

}  // namespace

PathBatch simulate_paths(double x0, double r, std::span<const double> sigma_steps, double dt,
                         std::size_t paths, std::uint64_t seed, unsigned threads) {
  PathBatch b = make_batch(x0, dt, sigma_steps, paths);
  auto run_range = [&](std::size_t begin, std::size_t end) {
    for (std::size_t j = begin; j < end; ++j) {
      CounterRng rng(seed, j);
      step_path(b, x0, r, j, [&](std::size_t) { return rng.normal(); });
    }
  };
  threads = std::max(1u, threads);
  if (threads == 1 || paths < 2 * threads) {
    run_range(0, paths);
    return b;
  }
  std::vector<std::thread> pool;
  const std::size_t chunk = (paths + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    const std::size_t begin = t * chunk;
    const std::size_t end = std::min(paths, begin + chunk);
    if (begin < end) {
      pool.emplace_back(run_range, begin, end);
    }
  }
  for (auto& th : pool) {
    th.join();
  }
  return b;
}

PathBatch paths_from_normals(double x0, double r, std::span<const double> sigma_steps, double dt,
                             std::size_t paths, std::span<const double> normals) {
  PathBatch b = make_batch(x0, dt, sigma_steps, paths);
  if (normals.size() != paths * b.steps) {
    throw ValidationError("paths_from_normals: expected " + std::to_string(paths * b.steps) +
                          " normals, got " + std::to_string(normals.size()));
  }
  for (std::size_t j = 0; j < paths; ++j) {
    step_path(b, x0, r, j, [&](std::size_t i) { return normals[j * b.steps + i]; });
  }
  return b;
}

}  // namespace gpricing::market
