#include "gpricing/nets/network.hpp"

#include <cmath>
#include <numbers>

#include "gpricing/errors.hpp"
#include "gpricing/market/rng.hpp"

namespace gpricing::nets {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::RowVectorXd;
using Eigen::VectorXd;

constexpr std::array<std::string_view, value_input::count> kValueChannels{"t",   "X",     "K",
                                                                          "tau", "sigma", "r"};
constexpr std::array<std::string_view, generator_input::count> kGeneratorChannels{
    "t", "X", "Y", "Z", "K", "tau", "sigma", "r"};

// Normalised AAF mixing weights v = w / ||w||.
std::array<double, kBasisCount> mixing(std::span<const double> w, double* norm_out = nullptr) {
  double n2 = 0.0;
  for (const double x : w) {
    n2 += x * x;
  }
  const double norm = std::sqrt(n2);
  std::array<double, kBasisCount> v{};
  for (int k = 0; k < kBasisCount; ++k) {
    v[static_cast<std::size_t>(k)] = w[static_cast<std::size_t>(k)] / norm;
  }
  if (norm_out != nullptr) {
    *norm_out = norm;
  }
  return v;
}

// Values (and optionally first derivatives) of the mixture, without the
// second-derivative work that only backward() needs.
inline void mixture(double x, const std::array<double, kBasisCount>& v, double& f, double* d1) {
  const double s = std::sin(x);
  const double th = std::tanh(x);
  const double cdf = special::normal_cdf(x);
  const double sg = special::sigmoid(x);
  const double sp = special::softplus(x);
  f = v[0] * s + v[1] * th + v[2] * x * cdf + v[3] * x * sg + v[4] * sp;
  if (d1 != nullptr) {
    const double pdf = special::normal_pdf(x);
    *d1 = v[0] * std::cos(x) + v[1] * (1.0 - th * th) + v[2] * (cdf + x * pdf) +
          v[3] * sg * (1.0 + x * (1.0 - sg)) + v[4] * sg;
  }
}

MatrixXd dropout_mask(const Dropout& d, int layer, Index rows, Index cols) {
  MatrixXd mask(rows, cols);
  market::CounterRng rng(market::derive_seed(d.seed, static_cast<std::uint64_t>(layer)), 0);
  const double keep = 1.0 - d.rate;
  const double scale = 1.0 / keep;
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) {
      mask(i, j) = rng.uniform() < keep ? scale : 0.0;
    }
  }
  return mask;
}

bool is_trainable(const TrainableMask* mask, int slice) {
  return mask == nullptr || mask->empty() || (*mask)[static_cast<std::size_t>(slice)] != 0;
}

}  // namespace

NetShape NetShape::value_net(int embed, std::vector<int> hidden) {
  return {NetKind::value, value_input::count, embed, std::move(hidden), 2};
}

NetShape NetShape::generator_net(int embed, std::vector<int> hidden) {
  return {NetKind::generator, generator_input::count, embed, std::move(hidden), 1};
}

std::string_view channel_name(NetKind kind, int channel) {
  if (kind == NetKind::value) {
    return kValueChannels.at(static_cast<std::size_t>(channel));
  }
  return kGeneratorChannels.at(static_cast<std::size_t>(channel));
}

std::string_view head_name(NetKind kind, int head) {
  if (kind == NetKind::generator) {
    return "head";
  }
  return head == 0 ? "head_call" : "head_put";
}

BasisEval eval_basis(double x) {
  BasisEval b{};
  const double s = std::sin(x);
  const double c = std::cos(x);
  b.f[0] = s;
  b.d1[0] = c;
  b.d2[0] = -s;

  const double th = std::tanh(x);
  const double sech2 = 1.0 - th * th;
  b.f[1] = th;
  b.d1[1] = sech2;
  b.d2[1] = -2.0 * th * sech2;

  const double cdf = special::normal_cdf(x);
  const double pdf = special::normal_pdf(x);
  b.f[2] = x * cdf;
  b.d1[2] = cdf + x * pdf;
  b.d2[2] = pdf * (2.0 - x * x);

  const double sg = special::sigmoid(x);
  const double dsg = sg * (1.0 - sg);
  b.f[3] = x * sg;
  b.d1[3] = sg + x * dsg;
  b.d2[3] = dsg * (2.0 + x * (1.0 - 2.0 * sg));

  b.f[4] = special::softplus(x);
  b.d1[4] = sg;
  b.d2[4] = dsg;
  return b;
}

double aaf(double x, std::span<const double> w) {
  const auto v = mixing(w);
  double f = 0.0;
  mixture(x, v, f, nullptr);
  return f;
}

Scaling Scaling::identity(int channels) {
  Scaling s;
  s.shift.assign(static_cast<std::size_t>(channels), 0.0);
  s.scale.assign(static_cast<std::size_t>(channels), 1.0);
  return s;
}

AafNet::AafNet(NetShape shape) : shape_(std::move(shape)) {
  if (shape_.channels < 1 || shape_.embed < 1 || shape_.hidden.empty() || shape_.heads < 1) {
    throw ConfigError("AafNet: degenerate network shape");
  }
  scaling_ = Scaling::identity(shape_.channels);
  const auto E = static_cast<std::size_t>(shape_.embed);
  const auto C = static_cast<std::size_t>(shape_.channels);
  exp_w_ = params_.add("expansion.weight", E, C);
  exp_b_ = params_.add("expansion.bias", E, C);
  sent_w_ = params_.add("sentiment_embed.weight", E, kSentimentDim);
  sent_b_ = params_.add("sentiment_embed.bias", E, 1);
  gate_ = params_.add("gate", 1, 1);
  std::size_t in = static_cast<std::size_t>(shape_.input_width());
  for (std::size_t l = 0; l < shape_.hidden.size(); ++l) {
    const auto out = static_cast<std::size_t>(shape_.hidden[l]);
    if (out < 1) {
      throw ConfigError("AafNet: hidden widths must be positive");
    }
    const std::string tag = "backbone[" + std::to_string(l) + "]";
    dense_w_.push_back(params_.add(tag + ".weight", out, in));
    dense_b_.push_back(params_.add(tag + ".bias", out, 1));
    aaf_.push_back(params_.add("aaf[" + std::to_string(l) + "]", kBasisCount, 1));
    auto w = params_.view(aaf_.back());
    std::copy(kAafInit.begin(), kAafInit.end(), w.begin());
    in = out;
  }
  for (int h = 0; h < shape_.heads; ++h) {
    const std::string tag(head_name(shape_.kind, h));
    head_w_.push_back(params_.add(tag + ".weight", 1, in));
    head_b_.push_back(params_.add(tag + ".bias", 1, 1));
  }
}

double AafNet::gate() const { return params_.view(gate_)[0]; }

void AafNet::set_gate(double gamma) { params_.view(gate_)[0] = gamma; }

void AafNet::set_scaling(Scaling s) {
  const auto C = static_cast<std::size_t>(shape_.channels);
  if (s.shift.size() != C || s.scale.size() != C) {
    throw ConfigError("AafNet::set_scaling: expected one shift and scale per channel");
  }
  auto bad = [](double v) { return !std::isfinite(v); };
  for (std::size_t c = 0; c < C; ++c) {
    if (bad(s.shift[c]) || bad(s.scale[c]) || !(s.scale[c] > 0.0)) {
      throw ConfigError("AafNet::set_scaling: shifts must be finite and scales positive");
    }
  }
  if (bad(s.out_shift) || bad(s.out_scale) || !(s.out_scale > 0.0)) {
    throw ConfigError("AafNet::set_scaling: output scale must be finite and positive");
  }
  scaling_ = std::move(s);
}

int AafNet::enforce_aaf_floor() {
  int touched = 0;
  for (const int id : aaf_) {
    auto w = params_.view(id);
    double n2 = 0.0;
    for (const double x : w) {
      n2 += x * x;
    }
    const double norm = std::sqrt(n2);
    if (norm >= kAafNormFloor) {
      continue;
    }
    ++touched;
    if (norm > 0.0) {
      for (double& x : w) {
        x *= kAafNormFloor / norm;
      }
    } else {
      // Direction lost entirely: fall back to the equal-weight direction.
      for (double& x : w) {
        x = kAafNormFloor / std::sqrt(static_cast<double>(kBasisCount));
      }
    }
  }
  return touched;
}

ForwardResult AafNet::forward(const MatrixXd& x, const MatrixXd& e, int head,
                              const ForwardOptions& opt, ForwardCache* cache) const {
  const Index B = x.cols();
  const Index E = shape_.embed;
  if (x.rows() != shape_.channels || B < 1) {
    throw ValidationError("AafNet::forward: expected " + std::to_string(shape_.channels) +
                          " input channels");
  }
  if (e.rows() != static_cast<Index>(kSentimentDim) || (e.cols() != 1 && e.cols() != B)) {
    throw ValidationError("AafNet::forward: sentiment must be 5 x 1 or 5 x batch");
  }
  if (!x.allFinite() || !e.allFinite()) {
    throw ValidationError("AafNet::forward: non-finite input");
  }
  if (head < 0 || head >= shape_.heads) {
    throw ValidationError("AafNet::forward: head index out of range");
  }
  if (opt.tangent_channel >= shape_.channels) {
    throw ValidationError("AafNet::forward: tangent channel out of range");
  }
  const bool tangent = opt.tangent_channel >= 0;
  const double tangent_scale =
      tangent ? scaling_.scale[static_cast<std::size_t>(opt.tangent_channel)] : 1.0;
  const bool drop = opt.dropout.rate > 0.0;
  if (drop && !(opt.dropout.rate < 1.0)) {
    throw ConfigError("AafNet::forward: dropout rate must lie in [0, 1)");
  }

  // Input layer: per-channel expansion followed by the gated embedding.
  const auto Wexp = params_.matrix(exp_w_);
  const auto bexp = params_.matrix(exp_b_);
  MatrixXd xn(shape_.channels, B);
  for (Index c = 0; c < shape_.channels; ++c) {
    const auto uc = static_cast<std::size_t>(c);
    xn.row(c) = (x.row(c).array() - scaling_.shift[uc]) / scaling_.scale[uc];
  }
  MatrixXd z(shape_.input_width(), B);
  for (Index c = 0; c < shape_.channels; ++c) {
    z.middleRows(c * E, E).noalias() = Wexp.col(c) * xn.row(c);
    z.middleRows(c * E, E).colwise() += bexp.col(c);
  }
  MatrixXd sent = params_.matrix(sent_w_) * e;
  sent.colwise() += params_.matrix(sent_b_).col(0);
  const double gamma = gate();
  if (sent.cols() == 1) {
    z.bottomRows(E).colwise() = gamma * sent.col(0);
  } else {
    z.bottomRows(E) = gamma * sent;
  }

  if (cache != nullptr) {
    cache->x = std::move(xn);
    cache->e = e;
    cache->z0 = z;
    cache->sent = sent;
    cache->layers.assign(shape_.hidden.size(), {});
    cache->head = head;
    cache->tangent_channel = opt.tangent_channel;
    cache->dropout = drop;
  }

  MatrixXd z_dot;
  for (int l = 0; l < layers(); ++l) {
    const auto W = params_.matrix(dense_w_[static_cast<std::size_t>(l)]);
    const auto b = params_.matrix(dense_b_[static_cast<std::size_t>(l)]);
    const auto v = mixing(params_.view(aaf_[static_cast<std::size_t>(l)]));
    MatrixXd a = W * z;
    a.colwise() += b.col(0);
    MatrixXd a_dot;
    if (tangent) {
      if (l == 0) {
        // The tangent of the input layer is the expansion column of the
        // chosen channel, identical for every sample.
        const VectorXd col = W.middleCols(opt.tangent_channel * E, E) *
                             (Wexp.col(opt.tangent_channel) / tangent_scale);
        a_dot = col.replicate(1, B);
      } else {
        a_dot.noalias() = W * z_dot;
      }
    }
    MatrixXd h(a.rows(), B);
    MatrixXd h_dot;
    if (tangent) {
      h_dot.resize(a.rows(), B);
      for (Index j = 0; j < B; ++j) {
        for (Index i = 0; i < a.rows(); ++i) {
          double f = 0.0;
          double d1 = 0.0;
          mixture(a(i, j), v, f, &d1);
          h(i, j) = f;
          h_dot(i, j) = d1 * a_dot(i, j);
        }
      }
    } else {
      for (Index j = 0; j < B; ++j) {
        for (Index i = 0; i < a.rows(); ++i) {
          mixture(a(i, j), v, h(i, j), nullptr);
        }
      }
    }
    MatrixXd mask;
    if (drop) {
      mask = dropout_mask(opt.dropout, l, a.rows(), B);
      h.array() *= mask.array();
      if (tangent) {
        h_dot.array() *= mask.array();
      }
    }
    if (cache != nullptr) {
      LayerCache& lc = cache->layers[static_cast<std::size_t>(l)];
      lc.a = std::move(a);
      lc.h = h;
      lc.a_dot = std::move(a_dot);
      lc.h_dot = h_dot;
      lc.mask = std::move(mask);
    }
    z = std::move(h);
    z_dot = std::move(h_dot);
  }

  ForwardResult out;
  const auto hw = params_.matrix(head_w_[static_cast<std::size_t>(head)]);
  const double hb = params_.view(head_b_[static_cast<std::size_t>(head)])[0];
  out.value = ((hw * z).array() + hb) * scaling_.out_scale + scaling_.out_shift;
  if (tangent) {
    out.tangent = (hw * z_dot) * scaling_.out_scale;
  }
  return out;
}

void AafNet::backward(const ForwardCache& cache, const RowVectorXd& seed_value_raw,
                      const RowVectorXd* seed_tangent_raw, std::span<double> grad,
                      const TrainableMask* trainable, InputGrads* input_grads) const {
  // Fold the output scaling into the seeds.
  const RowVectorXd seed_value = seed_value_raw * scaling_.out_scale;
  RowVectorXd seed_tangent_scaled;
  const RowVectorXd* seed_tangent = nullptr;
  if (seed_tangent_raw != nullptr) {
    seed_tangent_scaled = *seed_tangent_raw * scaling_.out_scale;
    seed_tangent = &seed_tangent_scaled;
  }
  const Index B = cache.z0.cols();
  const Index E = shape_.embed;
  const int L = layers();
  const bool tangent = cache.tangent_channel >= 0 && seed_tangent != nullptr;
  if (seed_value.size() != B || (seed_tangent != nullptr && seed_tangent->size() != B)) {
    throw ValidationError("AafNet::backward: seed size does not match the cached batch");
  }
  if (seed_tangent != nullptr && cache.tangent_channel < 0) {
    throw ValidationError("AafNet::backward: tangent seed given but forward had no tangent");
  }
  if (trainable != nullptr && !trainable->empty() && trainable->size() != params_.slices().size()) {
    throw ValidationError("AafNet::backward: trainable mask size mismatch");
  }
  const bool params_wanted = !grad.empty();
  if (params_wanted && grad.size() != params_.size()) {
    throw ValidationError("AafNet::backward: gradient buffer size mismatch");
  }
  auto wants = [&](int slice) { return params_wanted && is_trainable(trainable, slice); };

  // Lowest layer whose gradient is still needed. -1 means the input layer.
  const bool input_layer_needed = input_grads != nullptr || wants(exp_w_) || wants(exp_b_) ||
                                  wants(sent_w_) || wants(sent_b_) || wants(gate_);
  int lowest = L;
  if (input_layer_needed) {
    lowest = -1;
  } else {
    for (int l = 0; l < L; ++l) {
      const auto ul = static_cast<std::size_t>(l);
      if (wants(dense_w_[ul]) || wants(dense_b_[ul]) || wants(aaf_[ul])) {
        lowest = l;
        break;
      }
    }
  }

  const int head = cache.head;
  const auto hu = static_cast<std::size_t>(head);
  const LayerCache& top = cache.layers.back();
  if (wants(head_w_[hu])) {
    auto g = params_.matrix(head_w_[hu], grad);
    g.noalias() += seed_value * top.h.transpose();
    if (tangent) {
      g.noalias() += *seed_tangent * top.h_dot.transpose();
    }
  }
  if (wants(head_b_[hu])) {
    params_.matrix(head_b_[hu], grad)(0, 0) += seed_value.sum();
  }
  if (lowest >= L) {
    return;
  }

  const auto hw = params_.matrix(head_w_[hu]);
  MatrixXd h_bar = hw.transpose() * seed_value;
  MatrixXd h_dot_bar;
  if (tangent) {
    h_dot_bar = hw.transpose() * *seed_tangent;
  }

  MatrixXd z0_bar;
  VectorXd z0_dot_bar;  // tangent adjoint of the input layer, channel block only
  for (int l = L - 1; l >= std::max(lowest, 0); --l) {
    const auto ul = static_cast<std::size_t>(l);
    const LayerCache& lc = cache.layers[ul];
    if (cache.dropout) {
      h_bar.array() *= lc.mask.array();
      if (tangent) {
        h_dot_bar.array() *= lc.mask.array();
      }
    }
    double norm = 0.0;
    const auto v = mixing(params_.view(aaf_[ul]), &norm);
    const Index R = lc.a.rows();
    MatrixXd a_bar(R, B);
    MatrixXd a_dot_bar;
    if (tangent) {
      a_dot_bar.resize(R, B);
    }
    const bool want_v = wants(aaf_[ul]);
    std::array<double, kBasisCount> v_bar{};
    for (Index j = 0; j < B; ++j) {
      for (Index i = 0; i < R; ++i) {
        const BasisEval be = eval_basis(lc.a(i, j));
        double s1 = 0.0;
        double s2 = 0.0;
        for (std::size_t k = 0; k < kBasisCount; ++k) {
          s1 += v[k] * be.d1[k];
          s2 += v[k] * be.d2[k];
        }
        const double hb = h_bar(i, j);
        if (tangent) {
          const double hdb = h_dot_bar(i, j);
          const double ad = lc.a_dot(i, j);
          a_bar(i, j) = hb * s1 + hdb * ad * s2;
          a_dot_bar(i, j) = hdb * s1;
          if (want_v) {
            for (std::size_t k = 0; k < kBasisCount; ++k) {
              v_bar[k] += hb * be.f[k] + hdb * be.d1[k] * ad;
            }
          }
        } else {
          a_bar(i, j) = hb * s1;
          if (want_v) {
            for (std::size_t k = 0; k < kBasisCount; ++k) {
              v_bar[k] += hb * be.f[k];
            }
          }
        }
      }
    }
    if (want_v) {
      // Project through v = w / ||w||.
      double vv = 0.0;
      for (std::size_t k = 0; k < kBasisCount; ++k) {
        vv += v[k] * v_bar[k];
      }
      auto g = params_.matrix(aaf_[ul], grad);
      for (std::size_t k = 0; k < kBasisCount; ++k) {
        g(static_cast<Index>(k), 0) += (v_bar[k] - v[k] * vv) / norm;
      }
    }

    const MatrixXd& z_prev = l == 0 ? cache.z0 : cache.layers[ul - 1].h;
    const auto W = params_.matrix(dense_w_[ul]);
    if (wants(dense_w_[ul])) {
      auto g = params_.matrix(dense_w_[ul], grad);
      g.noalias() += a_bar * z_prev.transpose();
      if (tangent) {
        if (l == 0) {
          const Index c = cache.tangent_channel;
          const VectorXd s = a_dot_bar.rowwise().sum();
          g.middleCols(c * E, E).noalias() +=
              s * (params_.matrix(exp_w_).col(c).transpose() /
                   scaling_.scale[static_cast<std::size_t>(c)]);
        } else {
          g.noalias() += a_dot_bar * cache.layers[ul - 1].h_dot.transpose();
        }
      }
    }
    if (wants(dense_b_[ul])) {
      params_.matrix(dense_b_[ul], grad).col(0) += a_bar.rowwise().sum();
    }
    if (l > lowest) {
      if (l == 0) {
        z0_bar.noalias() = W.transpose() * a_bar;
        if (tangent) {
          const Index c = cache.tangent_channel;
          z0_dot_bar = W.middleCols(c * E, E).transpose() * a_dot_bar.rowwise().sum();
        }
      } else {
        h_bar.noalias() = W.transpose() * a_bar;
        if (tangent) {
          h_dot_bar.noalias() = W.transpose() * a_dot_bar;
        }
      }
    }
  }
  if (lowest >= 0) {
    return;
  }

  // Input layer.
  const auto Wexp = params_.matrix(exp_w_);
  if (wants(exp_w_) || wants(exp_b_)) {
    for (Index c = 0; c < shape_.channels; ++c) {
      const auto block = z0_bar.middleRows(c * E, E);
      if (wants(exp_w_)) {
        params_.matrix(exp_w_, grad).col(c) +=
            (block.array().rowwise() * cache.x.row(c).array()).rowwise().sum().matrix();
      }
      if (wants(exp_b_)) {
        params_.matrix(exp_b_, grad).col(c) += block.rowwise().sum();
      }
    }
    if (tangent && wants(exp_w_)) {
      params_.matrix(exp_w_, grad).col(cache.tangent_channel) +=
          z0_dot_bar / scaling_.scale[static_cast<std::size_t>(cache.tangent_channel)];
    }
  }
  const auto sent_bar = z0_bar.bottomRows(E);
  const double gamma = gate();
  if (wants(gate_)) {
    double g = 0.0;
    if (cache.sent.cols() == 1) {
      g = cache.sent.col(0).dot(sent_bar.rowwise().sum());
    } else {
      g = (cache.sent.array() * sent_bar.array()).sum();
    }
    params_.matrix(gate_, grad)(0, 0) += g;
  }
  if (wants(sent_w_) || wants(sent_b_)) {
    const MatrixXd s_bar = gamma * sent_bar;
    if (wants(sent_w_)) {
      if (cache.e.cols() == 1) {
        params_.matrix(sent_w_, grad).noalias() += s_bar.rowwise().sum() * cache.e.col(0).transpose();
      } else {
        params_.matrix(sent_w_, grad).noalias() += s_bar * cache.e.transpose();
      }
    }
    if (wants(sent_b_)) {
      params_.matrix(sent_b_, grad).col(0) += s_bar.rowwise().sum();
    }
  }
  if (input_grads != nullptr) {
    input_grads->channels.resize(shape_.channels, B);
    for (Index c = 0; c < shape_.channels; ++c) {
      input_grads->channels.row(c) = (Wexp.col(c).transpose() * z0_bar.middleRows(c * E, E)) /
                                     scaling_.scale[static_cast<std::size_t>(c)];
    }
    input_grads->sent_block = sent_bar;
  }
}

double default_gate_init(Moneyness m) {
  switch (m) {
    case Moneyness::atm:
      return 0.25;
    case Moneyness::itm:
      return 0.0;
    case Moneyness::otm:
      return 1.2;
  }
  return 0.0;
}

void init_params(AafNet& net, std::uint64_t seed, double gate_init, const InitOptions& opt) {
  ParamStore& ps = net.params();
  auto xavier = [&](int slice, double gain, double fan_in, double fan_out) {
    const double bound = gain * std::sqrt(6.0 / (fan_in + fan_out));
    market::CounterRng rng(market::derive_seed(seed, static_cast<std::uint64_t>(slice)), 0);
    for (double& w : ps.view(slice)) {
      w = bound * (2.0 * rng.uniform() - 1.0);
    }
  };
  auto zero = [&](int slice) {
    for (double& w : ps.view(slice)) {
      w = 0.0;
    }
  };
  const NetShape& shape = net.shape();
  // Each expansion block maps one scalar to `embed` features.
  xavier(net.expansion_weight(), opt.expansion_gain, 1.0, shape.embed);
  zero(net.expansion_bias());
  xavier(net.sentiment_weight(), opt.embed_gain, static_cast<double>(kSentimentDim), shape.embed);
  zero(net.sentiment_bias());
  for (int l = 0; l < net.layers(); ++l) {
    const Slice& s = ps.slice(net.dense_weight(l));
    xavier(net.dense_weight(l), opt.dense_gain, static_cast<double>(s.cols),
           static_cast<double>(s.rows));
    zero(net.dense_bias(l));
    auto w = ps.view(net.aaf_weight(l));
    std::copy(kAafInit.begin(), kAafInit.end(), w.begin());
  }
  for (int h = 0; h < shape.heads; ++h) {
    const Slice& s = ps.slice(net.head_weight(h));
    xavier(net.head_weight(h), opt.dense_gain, static_cast<double>(s.cols), 1.0);
    zero(net.head_bias(h));
  }
  net.set_gate(gate_init);
}

double value_forward(const AafNet& net, double t, double X, double K, double tau, double sigma,
                     double r, const SentimentVector& e, OptionType type) {
  if (net.shape().kind != NetKind::value) {
    throw ConfigError("value_forward: not a value network");
  }
  MatrixXd x(value_input::count, 1);
  x << t, X, K, tau, sigma, r;
  const MatrixXd ev = Eigen::Map<const VectorXd>(e.e.data(), kSentimentDim);
  return net.forward(x, ev, head_for(type)).value(0);
}

double generator_forward(const AafNet& net, double t, double X, double Y, double Z, double K,
                         double tau, double sigma, double r, const SentimentVector& e) {
  if (net.shape().kind != NetKind::generator) {
    throw ConfigError("generator_forward: not a generator network");
  }
  MatrixXd x(generator_input::count, 1);
  x << t, X, Y, Z, K, tau, sigma, r;
  const MatrixXd ev = Eigen::Map<const VectorXd>(e.e.data(), kSentimentDim);
  return net.forward(x, ev, 0).value(0);
}

}  // namespace gpricing::nets
