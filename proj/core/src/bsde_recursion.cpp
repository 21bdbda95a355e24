#include "gpricing/bsde/recursion.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "gpricing/errors.hpp"

namespace gpricing::bsde {

using Eigen::Index;
using Eigen::MatrixXd;

RecursionState recurse(const ValueFn& value, const GeneratorFn& generator,
                       const market::PathBatch& batch, double tau) {
  const auto N = static_cast<Index>(batch.steps);
  const auto M = static_cast<Index>(batch.paths);
  if (N < 1 || M < 1 || batch.sigma_steps.size() != batch.steps) {
    throw ValidationError("recurse: malformed path batch");
  }
  if (!(tau > 0.0) || std::abs(batch.dt * static_cast<double>(N) - tau) > 1e-12 * tau) {
    throw ValidationError("recurse: path grid does not span the contract maturity");
  }
  const double dt = batch.dt;
  RecursionState st;
  st.u_path.resize(N + 1, M);
  st.y_path.resize(N + 1, M);
  st.z_path.resize(N, M);
  st.g_path.resize(N, M);

  std::vector<double> x(static_cast<std::size_t>(M)), u(x.size()), du(x.size()), y(x.size()),
      z(x.size()), g(x.size());

  // Step 0 is path independent: evaluate once and broadcast.
  {
    const double x0 = batch.x(0, 0);
    double u0 = 0.0;
    double d0 = 0.0;
    value(0.0, std::span<const double>(&x0, 1), batch.sigma_steps[0], std::span<double>(&u0, 1),
          std::span<double>(&d0, 1));
    st.u0 = u0;
    for (Index j = 0; j < M; ++j) {
      st.u_path(0, j) = u0;
      st.y_path(0, j) = u0;
      z[static_cast<std::size_t>(j)] = batch.sigma_steps[0] * x0 * d0;
    }
  }
  for (Index i = 0; i < N; ++i) {
    const double t = static_cast<double>(i) * dt;
    const double sigma = batch.sigma_steps[static_cast<std::size_t>(i)];
    for (Index j = 0; j < M; ++j) {
      x[static_cast<std::size_t>(j)] = batch.x(static_cast<std::size_t>(j), static_cast<std::size_t>(i));
      y[static_cast<std::size_t>(j)] = st.y_path(i, j);
    }
    if (i > 0) {
      value(t, x, sigma, u, du);
      for (Index j = 0; j < M; ++j) {
        const auto uj = static_cast<std::size_t>(j);
        st.u_path(i, j) = u[uj];
        z[uj] = sigma * x[uj] * du[uj];
      }
    }
    generator(t, x, y, z, sigma, g);
    for (Index j = 0; j < M; ++j) {
      const auto uj = static_cast<std::size_t>(j);
      st.z_path(i, j) = z[uj];
      st.g_path(i, j) = g[uj];
      const double next =
          y[uj] - g[uj] * dt + z[uj] * batch.dw(uj, static_cast<std::size_t>(i));
      if (!std::isfinite(next)) {
        throw NumericalError("recurse: Y became non-finite at step " + std::to_string(i + 1) +
                             ", path " + std::to_string(j));
      }
      st.y_path(i + 1, j) = next;
    }
  }
  for (Index j = 0; j < M; ++j) {
    x[static_cast<std::size_t>(j)] = batch.terminal(static_cast<std::size_t>(j));
  }
  value(tau, x, batch.sigma_steps.back(), u, du);
  for (Index j = 0; j < M; ++j) {
    st.u_path(N, j) = u[static_cast<std::size_t>(j)];
  }
  return st;
}

namespace {

MatrixXd sentiment_column(const SentimentVector& e) {
  MatrixXd m(kSentimentDim, 1);
  for (std::size_t k = 0; k < kSentimentDim; ++k) {
    m(static_cast<Index>(k), 0) = e.e[k];
  }
  return m;
}

}  // namespace

ValueFn value_fn(const nets::AafNet& net, const OptionContract& contract,
                 const SentimentVector& e, double r, HedgeMode mode) {
  namespace vi = nets::value_input;
  const double K = contract.strike;
  const double tau = tau_years(contract.tau_days);
  const int head = nets::head_for(contract.type);
  return [&net, K, tau, r, head, mode, ev = sentiment_column(e)](
             double t, std::span<const double> x, double sigma, std::span<double> u,
             std::span<double> du) {
    const auto B = static_cast<Index>(x.size());
    MatrixXd in(vi::count, B);
    for (Index j = 0; j < B; ++j) {
      in.col(j) << t, x[static_cast<std::size_t>(j)], K, tau, sigma, r;
    }
    if (mode == HedgeMode::autodiff) {
      const auto out = net.forward(in, ev, head, {vi::X, {}});
      for (Index j = 0; j < B; ++j) {
        u[static_cast<std::size_t>(j)] = out.value(j);
        du[static_cast<std::size_t>(j)] = out.tangent(j);
      }
      return;
    }
    const auto out = net.forward(in, ev, head);
    MatrixXd up = in;
    MatrixXd dn = in;
    std::vector<double> h(static_cast<std::size_t>(B));
    for (Index j = 0; j < B; ++j) {
      h[static_cast<std::size_t>(j)] = 1e-4 * std::max(1.0, std::abs(in(vi::X, j)));
      up(vi::X, j) += h[static_cast<std::size_t>(j)];
      dn(vi::X, j) -= h[static_cast<std::size_t>(j)];
    }
    const auto fu = net.forward(up, ev, head);
    const auto fd = net.forward(dn, ev, head);
    for (Index j = 0; j < B; ++j) {
      const auto uj = static_cast<std::size_t>(j);
      u[uj] = out.value(j);
      du[uj] = (fu.value(j) - fd.value(j)) / (2.0 * h[uj]);
    }
  };
}

GeneratorFn generator_fn(const nets::AafNet& net, const OptionContract& contract,
                         const SentimentVector& e, double r) {
  namespace gi = nets::generator_input;
  const double K = contract.strike;
  const double tau = tau_years(contract.tau_days);
  return [&net, K, tau, r, ev = sentiment_column(e)](
             double t, std::span<const double> x, std::span<const double> y,
             std::span<const double> z, double sigma, std::span<double> g) {
    const auto B = static_cast<Index>(x.size());
    MatrixXd in(gi::count, B);
    for (Index j = 0; j < B; ++j) {
      const auto uj = static_cast<std::size_t>(j);
      in.col(j) << t, x[uj], y[uj], z[uj], K, tau, sigma, r;
    }
    const auto out = net.forward(in, ev, 0);
    for (Index j = 0; j < B; ++j) {
      g[static_cast<std::size_t>(j)] = out.value(j);
    }
  };
}

RecursionState recurse(const nets::AafNet& value, const nets::AafNet& generator,
                       const market::PathBatch& batch, const OptionContract& contract,
                       const SentimentVector& e, double r, HedgeMode mode) {
  return recurse(value_fn(value, contract, e, r, mode), generator_fn(generator, contract, e, r),
                 batch, tau_years(contract.tau_days));
}

}  // namespace gpricing::bsde
