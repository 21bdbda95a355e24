#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace gpricing::ad {

/// Primitive operations a tape node can record.
enum class Op : std::uint8_t {
  leaf,      // differentiable input
  constant,  // non-differentiable literal
  add,
  sub,
  mul,
  div,
  neg,
  exp,
  ln,
  sin,
  cos,
  tanh,
  gelu,
  silu,
  softplus,
  sigmoid,
  sqrt,
  max,
  pow2,
  normcdf,
  normpdf,
};

inline constexpr int kOpCount = static_cast<int>(Op::normpdf) + 1;

std::string_view op_name(Op op);

/// Number of parents an operation consumes (0 for leaves and constants).
int op_arity(Op op);

using NodeId = std::uint32_t;

struct Node {
  Op op = Op::leaf;
  std::uint8_t arity = 0;
  std::array<NodeId, 2> parents{};
  double value = 0.0;
  /// Partial derivatives of this node w.r.t. parents[0] and parents[1].
  std::array<double, 2> local_grads{};
};

class Gradients;

/// Append-only scalar computation graph. Parents always precede children,
/// so the node id order is a topological order. A tape is not thread-safe;
/// use one tape per thread.
class Tape {
 public:
  Tape() = default;

  /// Adds a differentiable leaf.
  NodeId variable(double value);
  /// Adds a literal; backward() never reports a gradient for it.
  NodeId constant(double value);

  /// Records `op` applied to existing nodes. Throws ConfigError for tags that
  /// are not recordable operations or whose arity does not match, and
  /// ValidationError if a parent id is not on the tape yet.
  NodeId record(Op op, std::span<const NodeId> parents);

  const Node& node(NodeId id) const { return nodes_[id]; }
  double value(NodeId id) const { return nodes_[id].value; }
  std::size_t size() const { return nodes_.size(); }
  std::span<const NodeId> inputs() const { return inputs_; }

  void reserve(std::size_t n) { nodes_.reserve(n); }
  void clear();

  // Unchecked append used by the Var operator overloads; arguments are
  // produced by this tape so they are valid by construction.
  NodeId push_unary(Op op, NodeId a, double value, double da);
  NodeId push_binary(Op op, NodeId a, NodeId b, double value, double da, double db);

 private:
  std::vector<Node> nodes_;
  std::vector<NodeId> inputs_;
};

/// Adjoints produced by one reverse sweep.
class Gradients {
 public:
  Gradients(std::vector<double> adjoints, std::vector<NodeId> inputs)
      : adjoints_(std::move(adjoints)), inputs_(std::move(inputs)) {}

  /// d output / d node; zero for nodes the output does not depend on.
  double wrt(NodeId id) const { return id < adjoints_.size() ? adjoints_[id] : 0.0; }

  /// Gradient restricted to the tape's leaf variables, in creation order.
  std::vector<double> input_gradient() const;

  std::span<const double> adjoints() const { return adjoints_; }

 private:
  std::vector<double> adjoints_;
  std::vector<NodeId> inputs_;
};

/// Reverse accumulation from `output` (seed 1). Visits nodes in strictly
/// descending id order, each exactly once.
Gradients backward(const Tape& tape, NodeId output);

/// Local partial derivatives of `op` evaluated at the given parent values.
/// Returns {value, d/da, d/db}.
std::array<double, 3> evaluate_op(Op op, double a, double b);

}  // namespace gpricing::ad
