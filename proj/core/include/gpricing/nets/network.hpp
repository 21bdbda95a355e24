#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "gpricing/autodiff/var.hpp"
#include "gpricing/nets/params.hpp"
#include "gpricing/special.hpp"
#include "gpricing/types.hpp"

namespace gpricing::nets {

/// sin, tanh, GELU, SiLU, Softplus.
inline constexpr int kBasisCount = 5;
inline constexpr std::array<double, kBasisCount> kAafInit{0.2, 0.2, 0.2, 0.2, 0.2};
/// Lower bound on the L2 norm of an activation weight vector.
inline constexpr double kAafNormFloor = 1e-6;

enum class NetKind { value, generator };

// Input channel order of the two networks.
namespace value_input {
enum : int { t, X, K, tau, sigma, r, count };
}
namespace generator_input {
enum : int { t, X, Y, Z, K, tau, sigma, r, count };
}

struct NetShape {
  NetKind kind = NetKind::value;
  int channels = value_input::count;
  int embed = 50;
  std::vector<int> hidden{300, 256, 256, 128};
  int heads = 2;

  int input_width() const { return embed * (channels + 1); }

  static NetShape value_net(int embed = 50, std::vector<int> hidden = {300, 256, 256, 128});
  static NetShape generator_net(int embed = 50, std::vector<int> hidden = {300, 256, 256, 128});

  bool operator==(const NetShape&) const = default;
};

std::string_view channel_name(NetKind kind, int channel);
std::string_view head_name(NetKind kind, int head);
/// Value-net head serving an option type (call 0, put 1).
inline int head_for(OptionType type) { return type == OptionType::call ? 0 : 1; }

/// Basis activations and their first two derivatives at x.
struct BasisEval {
  std::array<double, kBasisCount> f, d1, d2;
};
BasisEval eval_basis(double x);

/// (a sin x + b tanh x + c GELU x + d SiLU x + e Softplus x) / ||w||.
double aaf(double x, std::span<const double> w);

/// Inverted dropout on backbone activations; rate 0 disables it.
struct Dropout {
  double rate = 0.0;
  std::uint64_t seed = 0;
};

struct ForwardOptions {
  /// Input channel whose derivative is propagated alongside the value
  /// (value_input::X for the hedge term); -1 disables the tangent.
  int tangent_channel = -1;
  Dropout dropout;
};

struct ForwardResult {
  Eigen::RowVectorXd value;
  Eigen::RowVectorXd tangent;  // empty unless a tangent channel was requested
};

struct LayerCache {
  Eigen::MatrixXd a, h, a_dot, h_dot, mask;
};

/// Activations kept by forward() for a subsequent backward().
struct ForwardCache {
  Eigen::MatrixXd x;     // normalised input, channels x B
  Eigen::MatrixXd e;     // 5 x 1 or 5 x B
  Eigen::MatrixXd z0;    // concatenated input, input_width x B
  Eigen::MatrixXd sent;  // W_s e + b_s before gating, embed x cols(e)
  std::vector<LayerCache> layers;
  int head = 0;
  int tangent_channel = -1;
  bool dropout = false;
};

/// Gradients with respect to the network inputs (seed-weighted, per column).
struct InputGrads {
  Eigen::MatrixXd channels;    // channels x B
  Eigen::MatrixXd sent_block;  // d/d(gated sentiment block), embed x B
};

/// Fixed (non-trainable) affine maps around a network: channel c enters as
/// (x_c - shift_c) / scale_c and the head output leaves as
/// out_shift + out_scale * y. Identity unless set from training data.
struct Scaling {
  std::vector<double> shift, scale;
  double out_shift = 0.0;
  double out_scale = 1.0;

  static Scaling identity(int channels);
  bool operator==(const Scaling&) const = default;
};

/// Per-slice trainability; empty means every slice is trainable.
using TrainableMask = std::vector<char>;

/// Expansion layers, gated sentiment embedding, AAF backbone and heads.
/// Batched evaluation treats each column of the input as one sample.
class AafNet {
 public:
  explicit AafNet(NetShape shape);

  const NetShape& shape() const { return shape_; }
  ParamStore& params() { return params_; }
  const ParamStore& params() const { return params_; }

  double gate() const;
  void set_gate(double gamma);

  const Scaling& scaling() const { return scaling_; }
  /// Throws ConfigError on a size mismatch or a non-positive scale.
  void set_scaling(Scaling s);

  // Slice indices.
  int expansion_weight() const { return exp_w_; }
  int expansion_bias() const { return exp_b_; }
  int sentiment_weight() const { return sent_w_; }
  int sentiment_bias() const { return sent_b_; }
  int gate_slice() const { return gate_; }
  int dense_weight(int layer) const { return dense_w_[static_cast<std::size_t>(layer)]; }
  int dense_bias(int layer) const { return dense_b_[static_cast<std::size_t>(layer)]; }
  int aaf_weight(int layer) const { return aaf_[static_cast<std::size_t>(layer)]; }
  int head_weight(int head) const { return head_w_[static_cast<std::size_t>(head)]; }
  int head_bias(int head) const { return head_b_[static_cast<std::size_t>(head)]; }
  int layers() const { return static_cast<int>(shape_.hidden.size()); }

  /// x: channels x B. e: 5 x 1 (broadcast) or 5 x B. Throws ValidationError
  /// on non-finite inputs or mismatched shapes.
  ForwardResult forward(const Eigen::MatrixXd& x, const Eigen::MatrixXd& e, int head,
                        const ForwardOptions& opt = {}, ForwardCache* cache = nullptr) const;

  /// Accumulates seed-weighted parameter gradients into `grad` (layout of
  /// params(); may be empty when only input gradients are wanted). Slices
  /// masked out by `trainable` are left untouched and the sweep stops as
  /// soon as nothing below needs a gradient.
  void backward(const ForwardCache& cache, const Eigen::RowVectorXd& seed_value,
                const Eigen::RowVectorXd* seed_tangent, std::span<double> grad,
                const TrainableMask* trainable = nullptr, InputGrads* input_grads = nullptr) const;

  /// Renormalises any activation weight vector whose norm fell below the
  /// floor. Returns the number of vectors touched.
  int enforce_aaf_floor();

  bool operator==(const AafNet& other) const {
    return shape_ == other.shape_ && scaling_ == other.scaling_ && params_ == other.params_;
  }

 private:
  NetShape shape_;
  ParamStore params_;
  Scaling scaling_;
  int exp_w_ = 0, exp_b_ = 0, sent_w_ = 0, sent_b_ = 0, gate_ = 0;
  std::vector<int> dense_w_, dense_b_, aaf_, head_w_, head_b_;
};

/// Xavier-uniform initialisation with the gains below; biases zero, AAF
/// weights 0.2 each, gate = gate_init.
struct InitOptions {
  double expansion_gain = 0.01;
  double dense_gain = 1.0;
  double embed_gain = 1.0;
};

void init_params(AafNet& net, std::uint64_t seed, double gate_init, const InitOptions& opt = {});

/// Initial gate per moneyness class: ATM 0.25, ITM 0 (frozen), OTM 1.2.
double default_gate_init(Moneyness m);

// Convenience single-sample evaluation (evaluation mode, no dropout).
double value_forward(const AafNet& net, double t, double X, double K, double tau, double sigma,
                     double r, const SentimentVector& e, OptionType type);
double generator_forward(const AafNet& net, double t, double X, double Y, double Z, double K,
                         double tau, double sigma, double r, const SentimentVector& e);

/// Scalar reference implementation, generic over the number type so it can
/// run on an autodiff tape (Var) or with nested duals (Dual<Var>). Slow; used
/// to cross-check the batched kernels.
template <class T>
T reference_forward(const AafNet& net, std::span<const T> params, std::span<const T> x,
                    std::span<const T> e, int head) {
  using ad::gelu;
  using ad::silu;
  using ad::softplus;
  using std::sin;
  using std::sqrt;
  using std::tanh;
  const NetShape& shape = net.shape();
  const ParamStore& ps = net.params();
  const Scaling& sc = net.scaling();
  auto at = [&](int slice, std::size_t i, std::size_t j) -> const T& {
    const Slice& s = ps.slice(slice);
    return params[s.offset + i + j * s.rows];
  };
  const auto E = static_cast<std::size_t>(shape.embed);
  std::vector<T> z;
  z.reserve(static_cast<std::size_t>(shape.input_width()));
  for (std::size_t c = 0; c < static_cast<std::size_t>(shape.channels); ++c) {
    for (std::size_t k = 0; k < E; ++k) {
      const T xn = (x[c] - sc.shift[c]) * (1.0 / sc.scale[c]);
      z.push_back(at(net.expansion_weight(), k, c) * xn + at(net.expansion_bias(), k, c));
    }
  }
  const T& gamma = at(net.gate_slice(), 0, 0);
  for (std::size_t k = 0; k < E; ++k) {
    T s = at(net.sentiment_bias(), k, 0);
    for (std::size_t j = 0; j < kSentimentDim; ++j) {
      s = s + at(net.sentiment_weight(), k, j) * e[j];
    }
    z.push_back(gamma * s);
  }
  for (int l = 0; l < net.layers(); ++l) {
    const Slice& ws = ps.slice(net.dense_weight(l));
    std::array<T, kBasisCount> v;
    T norm2 = at(net.aaf_weight(l), 0, 0) * at(net.aaf_weight(l), 0, 0);
    for (std::size_t k = 1; k < kBasisCount; ++k) {
      norm2 = norm2 + at(net.aaf_weight(l), k, 0) * at(net.aaf_weight(l), k, 0);
    }
    const T norm = sqrt(norm2);
    for (std::size_t k = 0; k < kBasisCount; ++k) {
      v[k] = at(net.aaf_weight(l), k, 0) / norm;
    }
    std::vector<T> next;
    next.reserve(ws.rows);
    for (std::size_t i = 0; i < ws.rows; ++i) {
      T a = at(net.dense_bias(l), i, 0);
      for (std::size_t j = 0; j < ws.cols; ++j) {
        a = a + at(net.dense_weight(l), i, j) * z[j];
      }
      next.push_back(v[0] * sin(a) + v[1] * tanh(a) + v[2] * gelu(a) + v[3] * silu(a) +
                     v[4] * softplus(a));
    }
    z = std::move(next);
  }
  T out = at(net.head_bias(head), 0, 0);
  for (std::size_t j = 0; j < z.size(); ++j) {
    out = out + at(net.head_weight(head), 0, j) * z[j];
  }
  return out * sc.out_scale + sc.out_shift;
}

}  // namespace gpricing::nets
