#include "gpricing/autodiff/tape.hpp"

#include <cmath>
#include <string>

#include "gpricing/errors.hpp"
#include "gpricing/special.hpp"

namespace gpricing::ad {

std::string_view op_name(Op op) {
  switch (op) {
    case Op::leaf: return "leaf";
    case Op::constant: return "constant";
    case Op::add: return "add";
    case Op::sub: return "sub";
    case Op::mul: return "mul";
    case Op::div: return "div";
    case Op::neg: return "neg";
    case Op::exp: return "exp";
    case Op::ln: return "ln";
    case Op::sin: return "sin";
    case Op::cos: return "cos";
    case Op::tanh: return "tanh";
    case Op::gelu: return "gelu";
    case Op::silu: return "silu";
    case Op::softplus: return "softplus";
    case Op::sigmoid: return "sigmoid";
    case Op::sqrt: return "sqrt";
    case Op::max: return "max";
    case Op::pow2: return "pow2";
    case Op::normcdf: return "normcdf";
    case Op::normpdf: return "normpdf";
  }
  return "unknown";
}

int op_arity(Op op) {
  switch (op) {
    case Op::leaf:
    case Op::constant: return 0;
    case Op::add:
    case Op::sub:
    case Op::mul:
    case Op::div:
    case Op::max: return 2;
    default: return 1;
  }
}

std::array<double, 3> evaluate_op(Op op, double a, double b) {
  namespace sp = special;
  switch (op) {
    case Op::add: return {a + b, 1.0, 1.0};
    case Op::sub: return {a - b, 1.0, -1.0};
    case Op::mul: return {a * b, b, a};
    case Op::div: return {a / b, 1.0 / b, -a / (b * b)};
    case Op::neg: return {-a, -1.0, 0.0};
    case Op::exp: {
      const double e = std::exp(a);
      return {e, e, 0.0};
    }
    case Op::ln: return {std::log(a), 1.0 / a, 0.0};
    case Op::sin: return {std::sin(a), std::cos(a), 0.0};
    case Op::cos: return {std::cos(a), -std::sin(a), 0.0};
    case Op::tanh: {
      const double t = std::tanh(a);
      return {t, 1.0 - t * t, 0.0};
    }
    case Op::gelu: return {sp::gelu(a), sp::gelu_d1(a), 0.0};
    case Op::silu: return {sp::silu(a), sp::silu_d1(a), 0.0};
    case Op::softplus: return {sp::softplus(a), sp::sigmoid(a), 0.0};
    case Op::sigmoid: {
      const double s = sp::sigmoid(a);
      return {s, s * (1.0 - s), 0.0};
    }
    case Op::sqrt: {
      const double r = std::sqrt(a);
      return {r, 0.5 / r, 0.0};
    }
    // Ties go to the first argument.
    case Op::max: return a >= b ? std::array{a, 1.0, 0.0} : std::array{b, 0.0, 1.0};
    case Op::pow2: return {a * a, 2.0 * a, 0.0};
    case Op::normcdf: return {sp::normal_cdf(a), sp::normal_pdf(a), 0.0};
    case Op::normpdf: {
      const double p = sp::normal_pdf(a);
      return {p, -a * p, 0.0};
    }
    case Op::leaf:
    case Op::constant: break;
  }
  throw ConfigError("evaluate_op: '" + std::string(op_name(op)) + "' is not a recordable operation");
}

NodeId Tape::variable(double value) {
  const auto id = static_cast<NodeId>(nodes_.size());
  nodes_.push_back(Node{Op::leaf, 0, {}, value, {}});
  inputs_.push_back(id);
  return id;
}

NodeId Tape::constant(double value) {
  const auto id = static_cast<NodeId>(nodes_.size());
  nodes_.push_back(Node{Op::constant, 0, {}, value, {}});
  return id;
}

NodeId Tape::record(Op op, std::span<const NodeId> parents) {
  const int tag = static_cast<int>(op);
  if (tag < 0 || tag >= kOpCount || op == Op::leaf || op == Op::constant) {
    throw ConfigError("Tape::record: unknown operation tag " + std::to_string(tag));
  }
  const int arity = op_arity(op);
  if (static_cast<int>(parents.size()) != arity) {
    throw ConfigError("Tape::record: '" + std::string(op_name(op)) + "' takes " +
                      std::to_string(arity) + " parents, got " + std::to_string(parents.size()));
  }
  for (const NodeId p : parents) {
    if (p >= nodes_.size()) {
      throw ValidationError("Tape::record: parent id " + std::to_string(p) + " is not on the tape");
    }
  }
  const double a = nodes_[parents[0]].value;
  const double b = arity == 2 ? nodes_[parents[1]].value : 0.0;
  const auto [v, da, db] = evaluate_op(op, a, b);
  return arity == 2 ? push_binary(op, parents[0], parents[1], v, da, db)
                    : push_unary(op, parents[0], v, da);
}

NodeId Tape::push_unary(Op op, NodeId a, double value, double da) {
  const auto id = static_cast<NodeId>(nodes_.size());
  nodes_.push_back(Node{op, 1, {a, 0}, value, {da, 0.0}});
  return id;
}

NodeId Tape::push_binary(Op op, NodeId a, NodeId b, double value, double da, double db) {
  const auto id = static_cast<NodeId>(nodes_.size());
  nodes_.push_back(Node{op, 2, {a, b}, value, {da, db}});
  return id;
}

void Tape::clear() {
  nodes_.clear();
  inputs_.clear();
}

std::vector<double> Gradients::input_gradient() const {
  std::vector<double> out;
  out.reserve(inputs_.size());
  for (const NodeId id : inputs_) {
    out.push_back(wrt(id));
  }
  return out;
}

Gradients backward(const Tape& tape, NodeId output) {
  if (output >= tape.size()) {
    throw ValidationError("backward: output id " + std::to_string(output) + " is not on the tape");
  }
  std::vector<double> adj(static_cast<std::size_t>(output) + 1, 0.0);
  adj[output] = 1.0;
  for (NodeId id = output + 1; id-- > 0;) {
    const double g = adj[id];
    if (g == 0.0) {
      continue;
    }
    const Node& n = tape.node(id);
    for (int k = 0; k < n.arity; ++k) {
      adj[n.parents[k]] += g * n.local_grads[k];
    }
  }
  return Gradients(std::move(adj), {tape.inputs().begin(), tape.inputs().end()});
}

}  // namespace gpricing::ad
