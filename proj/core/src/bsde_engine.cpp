#include "gpricing/bsde/engine.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gpricing/errors.hpp"
#include "gpricing/market/gbm.hpp"
#include "gpricing/market/rng.hpp"
#include "gpricing/market/vol_trajectory.hpp"

namespace gpricing::bsde {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::RowVectorXd;
namespace vi = nets::value_input;
namespace gi = nets::generator_input;

// Sums of the loss parts over one batch, before normalisation.
struct Sums {
  double price_sq = 0.0;
  double price_ape = 0.0;
  double terminal_sq = 0.0;
  double path_sq = 0.0;
};

// Gradient buffers, one per loss part that has its own normaliser.
struct Buffers {
  nets::ParamVector v_price_sq, v_price_ape, v_terminal, v_path, g_path;
};

void axpy(nets::ParamVector& y, double a, const nets::ParamVector& x) {
  if (a == 0.0) {
    return;
  }
  for (std::size_t i = 0; i < y.size(); ++i) {
    y[i] += a * x[i];
  }
}

}  // namespace

std::uint64_t path_seed(std::uint64_t batch_seed, std::size_t index) {
  return market::derive_seed(batch_seed, index, 0);
}

LossEngine::LossEngine(EngineConfig cfg) : cfg_(cfg) {
  if (cfg_.steps < 1 || cfg_.paths < 1) {
    throw ConfigError("LossEngine: steps and paths must be positive");
  }
  if (cfg_.value_dropout < 0.0 || !(cfg_.value_dropout < 1.0)) {
    throw ConfigError("LossEngine: dropout rate must lie in [0, 1)");
  }
}

LossBreakdown LossEngine::evaluate(const nets::AafNet& value, const nets::AafNet& generator,
                                   std::span<const PricingSample* const> batch,
                                   std::uint64_t seed, bool training, NetGradients* grads,
                                   const TrainableMasks* masks) const {
  if (batch.empty()) {
    throw ValidationError("LossEngine: empty batch");
  }
  if (value.shape().kind != nets::NetKind::value ||
      generator.shape().kind != nets::NetKind::generator) {
    throw ConfigError("LossEngine: network kinds do not match their roles");
  }
  const Index N = cfg_.steps;
  const Index M = cfg_.paths;
  const double r = cfg_.r;
  const auto Bc = static_cast<double>(batch.size());
  const double n_terminal = Bc * static_cast<double>(M);
  const double n_path = Bc * static_cast<double>(N * M);
  const LossWeights& w = cfg_.weights;
  const nets::TrainableMask* vmask = masks != nullptr ? &masks->value : nullptr;
  const nets::TrainableMask* gmask = masks != nullptr ? &masks->generator : nullptr;
  const bool generator_frozen = gmask != nullptr && !gmask->empty() &&
                                std::all_of(gmask->begin(), gmask->end(), [](char c) { return c == 0; });

  Sums sums;
  Buffers buf;
  if (grads != nullptr) {
    buf.v_price_sq.assign(value.params().size(), 0.0);
    buf.v_price_ape = buf.v_price_sq;
    buf.v_terminal = buf.v_price_sq;
    buf.v_path = buf.v_price_sq;
    buf.g_path.assign(generator.params().size(), 0.0);
  }

  for (std::size_t c = 0; c < batch.size(); ++c) {
    const PricingSample& s = *batch[c];
    const OptionContract& k = s.contract;
    const double tau = tau_years(k.tau_days);
    const double dt = tau / static_cast<double>(N);
    const double K = k.strike;
    const int head = nets::head_for(k.type);
    const auto sigma =
        market::align_sigma(market::VolTrajectory{s.daily_sigma}, static_cast<std::size_t>(N));
    const auto paths = market::simulate_paths(k.underlying, r, sigma, dt,
                                              static_cast<std::size_t>(M), path_seed(seed, c));
    MatrixXd e(kSentimentDim, 1);
    for (std::size_t q = 0; q < kSentimentDim; ++q) {
      e(static_cast<Index>(q), 0) = s.sentiment.e[q];
    }
    auto dropout = [&](std::uint64_t part) {
      nets::Dropout d;
      if (training && cfg_.value_dropout > 0.0) {
        d.rate = cfg_.value_dropout;
        d.seed = market::derive_seed(seed, c, part);
      }
      return d;
    };
    auto xs = [&](Index i, Index j) {
      return paths.x(static_cast<std::size_t>(j), static_cast<std::size_t>(i));
    };
    const bool want = grads != nullptr;

    // Value net at t = 0 (shared by all paths), interior steps, and expiry.
    nets::ForwardCache c_u0, c_steps, c_term;
    MatrixXd in0(vi::count, 1);
    in0 << 0.0, k.underlying, K, tau, sigma[0], r;
    const auto f_u0 = value.forward(in0, e, head, {vi::X, dropout(1)}, want ? &c_u0 : nullptr);
    const double u0 = f_u0.value(0);

    nets::ForwardResult f_steps;
    if (N > 1) {
      MatrixXd in((vi::count), (N - 1) * M);
      for (Index i = 1; i < N; ++i) {
        for (Index j = 0; j < M; ++j) {
          in.col((i - 1) * M + j) << static_cast<double>(i) * dt, xs(i, j), K, tau,
              sigma[static_cast<std::size_t>(i)], r;
        }
      }
      f_steps = value.forward(in, e, head, {vi::X, dropout(2)}, want ? &c_steps : nullptr);
    }
    MatrixXd in_term(vi::count, M);
    for (Index j = 0; j < M; ++j) {
      in_term.col(j) << tau, xs(N, j), K, tau, sigma.back(), r;
    }
    const auto f_term = value.forward(in_term, e, head, {-1, dropout(3)}, want ? &c_term : nullptr);

    auto U = [&](Index i, Index j) { return i == 0 ? u0 : f_steps.value((i - 1) * M + j); };
    auto Udot = [&](Index i, Index j) {
      return i == 0 ? f_u0.tangent(0) : f_steps.tangent((i - 1) * M + j);
    };

    // Forward recursion.
    MatrixXd Y(N + 1, M);
    MatrixXd Z(N, M);
    Y.row(0).setConstant(u0);
    std::vector<nets::ForwardCache> c_gen(want ? static_cast<std::size_t>(N) : 0);
    for (Index i = 0; i < N; ++i) {
      const double si = sigma[static_cast<std::size_t>(i)];
      MatrixXd in(gi::count, M);
      for (Index j = 0; j < M; ++j) {
        Z(i, j) = si * xs(i, j) * Udot(i, j);
        in.col(j) << static_cast<double>(i) * dt, xs(i, j), Y(i, j), Z(i, j), K, tau, si, r;
      }
      const auto g = generator.forward(in, e, 0, {}, want ? &c_gen[static_cast<std::size_t>(i)] : nullptr);
      for (Index j = 0; j < M; ++j) {
        const double next = Y(i, j) - g.value(j) * dt +
                            Z(i, j) * paths.dw(static_cast<std::size_t>(j), static_cast<std::size_t>(i));
        if (!std::isfinite(next)) {
          throw NumericalError("BSDE recursion: Y non-finite at step " + std::to_string(i + 1) +
                               ", path " + std::to_string(j) + " of batch item " +
                               std::to_string(c));
        }
        Y(i + 1, j) = next;
      }
    }

    // Loss contributions.
    const double d_price = u0 - k.settlement;
    const double denom = std::max(std::abs(k.settlement), w.eps_mape);
    sums.price_sq += d_price * d_price;
    sums.price_ape += std::abs(d_price) / denom;
    RowVectorXd d_term(M);
    for (Index j = 0; j < M; ++j) {
      d_term(j) = f_term.value(j) - payoff(k.type, xs(N, j), K);
      sums.terminal_sq += d_term(j) * d_term(j);
    }
    MatrixXd D(N, M);
    for (Index i = 0; i < N; ++i) {
      for (Index j = 0; j < M; ++j) {
        D(i, j) = U(i, j) - Y(i, j);
      }
    }
    sums.path_sq += D.squaredNorm();
    if (!want) {
      continue;
    }

    // Price part: only u0 is involved.
    RowVectorXd seed1(1);
    seed1(0) = d_price / Bc;
    value.backward(c_u0, seed1, nullptr, buf.v_price_sq, vmask);
    seed1(0) = (d_price > 0.0 ? 1.0 : d_price < 0.0 ? -1.0 : 0.0) / (denom * Bc);
    value.backward(c_u0, seed1, nullptr, buf.v_price_ape, vmask);

    // Terminal part: d/du RMSE^2 / 2 pattern, normalised later.
    value.backward(c_term, d_term / n_terminal, nullptr, buf.v_terminal, vmask);

    // Path part: reverse-time adjoint of the recursion. Seeds are d(sum D^2 / 2n)/d.
    MatrixXd Ybar = MatrixXd::Zero(N + 1, M);
    MatrixXd Zbar(N, M);
    nets::InputGrads ig;
    for (Index i = N - 1; i >= 0; --i) {
      RowVectorXd gbar(M);
      for (Index j = 0; j < M; ++j) {
        const double ybn = Ybar(i + 1, j);
        gbar(j) = -dt * ybn;
        Zbar(i, j) = ybn * paths.dw(static_cast<std::size_t>(j), static_cast<std::size_t>(i));
        Ybar(i, j) += ybn - D(i, j) / n_path;
      }
      if (!gbar.isZero(0.0)) {
        generator.backward(c_gen[static_cast<std::size_t>(i)], gbar, nullptr,
                           generator_frozen ? std::span<double>() : std::span<double>(buf.g_path),
                           gmask, &ig);
        Ybar.row(i) += ig.channels.row(gi::Y);
        Zbar.row(i) += ig.channels.row(gi::Z);
      }
    }
    if (N > 1) {
      RowVectorXd sv((N - 1) * M), st((N - 1) * M);
      for (Index i = 1; i < N; ++i) {
        const double si = sigma[static_cast<std::size_t>(i)];
        for (Index j = 0; j < M; ++j) {
          sv((i - 1) * M + j) = D(i, j) / n_path;
          st((i - 1) * M + j) = Zbar(i, j) * si * xs(i, j);
        }
      }
      value.backward(c_steps, sv, &st, buf.v_path, vmask);
    }
    RowVectorXd sv0(1), st0(1);
    sv0(0) = Ybar.row(0).sum();
    st0(0) = Zbar.row(0).sum() * sigma[0] * k.underlying;
    value.backward(c_u0, sv0, &st0, buf.v_path, vmask);
  }

  LossBreakdown out;
  out.weights = w;
  const double rmse_p = std::sqrt(sums.price_sq / Bc);
  const double mape_p = sums.price_ape / Bc;
  out.price = w.omega_rmse * rmse_p + w.omega_mape * mape_p;
  out.terminal = std::sqrt(sums.terminal_sq / n_terminal);
  out.path = std::sqrt(sums.path_sq / n_path);
  out.total = total_loss(out);
  if (!std::isfinite(out.total)) {
    throw NumericalError("LossEngine: non-finite loss");
  }

  if (grads != nullptr) {
    // d sqrt(S/n) = (1 / RMSE) * d(S / 2n); a zero RMSE contributes nothing.
    auto inv = [](double x) { return x > 0.0 ? 1.0 / x : 0.0; };
    grads->value.assign(value.params().size(), 0.0);
    axpy(grads->value, w.lambda_price * w.omega_rmse * inv(rmse_p), buf.v_price_sq);
    axpy(grads->value, w.lambda_price * w.omega_mape, buf.v_price_ape);
    axpy(grads->value, w.lambda_terminal * inv(out.terminal), buf.v_terminal);
    axpy(grads->value, w.lambda_path * inv(out.path), buf.v_path);
    grads->generator.assign(generator.params().size(), 0.0);
    axpy(grads->generator, w.lambda_path * inv(out.path), buf.g_path);
  }
  return out;
}

}  // namespace gpricing::bsde
