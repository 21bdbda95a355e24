#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "gpricing/autodiff/tape.hpp"
#include "gpricing/autodiff/var.hpp"
#include "gpricing/errors.hpp"

using namespace gpricing;
using ad::Dual;
using ad::NodeId;
using ad::Op;
using ad::Tape;
using ad::Var;

namespace {

double rel_err(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

TEST(AutodiffRecord, AddValueAndLocalGrads) {
  Tape t;
  const NodeId a = t.variable(2.0);
  const NodeId b = t.variable(3.0);
  const std::array<NodeId, 2> p{a, b};
  const NodeId c = t.record(Op::add, p);
  EXPECT_EQ(t.value(c), 5.0);
  EXPECT_EQ(t.node(c).local_grads[0], 1.0);
  EXPECT_EQ(t.node(c).local_grads[1], 1.0);
}

TEST(AutodiffRecord, MulValueAndLocalGrads) {
  Tape t;
  const std::array<NodeId, 2> p{t.variable(2.0), t.variable(3.0)};
  const NodeId c = t.record(Op::mul, p);
  EXPECT_EQ(t.value(c), 6.0);
  EXPECT_EQ(t.node(c).local_grads[0], 3.0);
  EXPECT_EQ(t.node(c).local_grads[1], 2.0);
}

TEST(AutodiffRecord, SoftplusAtZero) {
  Tape t;
  const std::array<NodeId, 1> p{t.variable(0.0)};
  const NodeId c = t.record(Op::softplus, p);
  EXPECT_NEAR(t.value(c), std::numbers::ln2, 1e-15);
  EXPECT_NEAR(t.node(c).local_grads[0], 0.5, 1e-15);
}

TEST(AutodiffRecord, RejectsNonRecordableTagsAndBadParents) {
  Tape t;
  const std::array<NodeId, 1> one{t.variable(1.0)};
  EXPECT_THROW(t.record(Op::leaf, one), ConfigError);
  EXPECT_THROW(t.record(static_cast<Op>(200), one), ConfigError);
  EXPECT_THROW(t.record(Op::add, one), ConfigError);  // arity mismatch
  const std::array<NodeId, 1> dangling{42};
  EXPECT_THROW(t.record(Op::exp, dangling), ValidationError);
}

TEST(AutodiffBackward, ProductGradient) {
  Tape t;
  const Var x = Var::variable(t, 2.0);
  const Var y = Var::variable(t, 3.0);
  const Var f = x * y;
  const auto g = ad::backward(t, f.id());
  EXPECT_EQ(g.wrt(x.id()), 3.0);
  EXPECT_EQ(g.wrt(y.id()), 2.0);
}

TEST(AutodiffBackward, ExpAtZero) {
  Tape t;
  const Var x = Var::variable(t, 0.0);
  const auto g = ad::backward(t, ad::exp(x).id());
  EXPECT_EQ(g.wrt(x.id()), 1.0);
}

TEST(AutodiffBackward, TanhPlusSinMatchesFiniteDifference) {
  auto f = [](double x) { return std::tanh(x) + std::sin(x); };
  Tape t;
  const Var x = Var::variable(t, 0.3);
  const auto g = ad::backward(t, (ad::tanh(x) + ad::sin(x)).id());
  const double h = 1e-5;
  const double fd = (f(0.3 + h) - f(0.3 - h)) / (2 * h);
  EXPECT_LT(rel_err(g.wrt(x.id()), fd), 1e-6);
}

TEST(AutodiffBackward, DanglingLeafGetsZero) {
  Tape t;
  const Var x = Var::variable(t, 1.5);
  const Var unused = Var::variable(t, 4.0);
  const auto g = ad::backward(t, (x * x).id());
  EXPECT_EQ(g.wrt(unused.id()), 0.0);
  const auto in = g.input_gradient();
  ASSERT_EQ(in.size(), 2u);
  EXPECT_EQ(in[0], 3.0);
  EXPECT_EQ(in[1], 0.0);
}

// Every primitive's local partials against central differences of its value.
TEST(AutodiffPrimitives, LocalGradsMatchFiniteDifferences) {
  const double h = 1e-5;
  for (int k = 0; k < ad::kOpCount; ++k) {
    const Op op = static_cast<Op>(k);
    const int arity = ad::op_arity(op);
    if (arity == 0) {
      continue;
    }
    // Points inside every domain (ln, sqrt, div need positive arguments;
    // max needs distinct ones).
    for (const double a : {0.37, 1.3, 2.1}) {
      const double b = arity == 2 ? 0.81 : 0.0;
      const auto [v, da, db] = ad::evaluate_op(op, a, b);
      (void)v;
      const double fda =
          (ad::evaluate_op(op, a + h, b)[0] - ad::evaluate_op(op, a - h, b)[0]) / (2 * h);
      EXPECT_LT(rel_err(da, fda), 1e-4) << ad::op_name(op) << " d/da at " << a;
      if (arity == 2) {
        const double fdb =
            (ad::evaluate_op(op, a, b + h)[0] - ad::evaluate_op(op, a, b - h)[0]) / (2 * h);
        EXPECT_LT(rel_err(db, fdb), 1e-4) << ad::op_name(op) << " d/db at " << a;
      }
    }
  }
}

TEST(AutodiffPrimitives, GeluIsExactPhiBased) {
  for (const double x : {-2.0, -0.5, 0.0, 0.7, 3.0}) {
    EXPECT_NEAR(ad::evaluate_op(Op::gelu, x, 0.0)[0], x * 0.5 * std::erfc(-x / std::sqrt(2.0)), 1e-15);
  }
}

TEST(AutodiffDirectional, SquareAndSecondOrderFlow) {
  Tape t;
  const Var a = Var::variable(t, 1.0);
  const Var X = Var::variable(t, 3.0);
  const std::array<Var, 1> in{X};
  const std::array<double, 1> dir{1.0};
  auto [u, du] = ad::directional_value_and_grad(
      [&](std::span<const Dual<Var>> x) {
        const Dual<Var> av{a, Var::constant(t, 0.0)};
        return av * ad::square(x[0]);
      },
      in, dir);
  EXPECT_EQ(u.value(), 9.0);
  EXPECT_EQ(du.value(), 6.0);
  // d/da of du/dX = 2X.
  const auto g = ad::backward(t, du.id());
  EXPECT_EQ(g.wrt(a.id()), 6.0);
}

TEST(AutodiffDirectional, ConstantHasZeroDerivative) {
  Tape t;
  const Var X = Var::variable(t, 3.0);
  const std::array<Var, 1> in{X};
  const std::array<double, 1> dir{1.0};
  auto [u, du] = ad::directional_value_and_grad(
      [&](std::span<const Dual<Var>>) {
        return Dual<Var>{Var::constant(t, 7.0), Var::constant(t, 0.0)};
      },
      in, dir);
  EXPECT_EQ(u.value(), 7.0);
  EXPECT_EQ(du.value(), 0.0);
}

// Two-parameter toy net u = w2 * tanh(w1 * X): d/dw of du/dX against a
// finite difference of finite differences.
TEST(AutodiffDirectional, SecondOrderMatchesNestedFiniteDifferences) {
  auto u = [](double w1, double w2, double x) { return w2 * std::tanh(w1 * x); };
  const double w1 = 0.7, w2 = -1.3, x0 = 0.4;
  Tape t;
  const Var v1 = Var::variable(t, w1);
  const Var v2 = Var::variable(t, w2);
  const std::array<Var, 1> in{Var::variable(t, x0)};
  const std::array<double, 1> dir{1.0};
  auto [val, du] = ad::directional_value_and_grad(
      [&](std::span<const Dual<Var>> x) {
        const Dual<Var> a{v1, Var::constant(t, 0.0)};
        const Dual<Var> b{v2, Var::constant(t, 0.0)};
        return b * ad::tanh(a * x[0]);
      },
      in, dir);
  const auto g = ad::backward(t, du.id());
  const double h = 1e-4;
  auto dudx = [&](double p1, double p2) { return (u(p1, p2, x0 + h) - u(p1, p2, x0 - h)) / (2 * h); };
  const double d1 = (dudx(w1 + h, w2) - dudx(w1 - h, w2)) / (2 * h);
  const double d2 = (dudx(w1, w2 + h) - dudx(w1, w2 - h)) / (2 * h);
  EXPECT_LT(rel_err(g.wrt(v1.id()), d1), 1e-3);
  EXPECT_LT(rel_err(g.wrt(v2.id()), d2), 1e-3);
  EXPECT_NEAR(val.value(), u(w1, w2, x0), 1e-15);
}

TEST(AutodiffDeterminism, IdenticalConstructionGivesBitwiseGradients) {
  auto run = [] {
    Tape t;
    std::vector<Var> xs;
    for (int i = 0; i < 5; ++i) xs.push_back(Var::variable(t, 0.1 * (i + 1)));
    Var acc = Var::constant(t, 0.0);
    for (const auto& x : xs) acc = acc + ad::gelu(x) * ad::softplus(x) + ad::sqrt(x);
    return ad::backward(t, acc.id()).input_gradient();
  };
  EXPECT_EQ(run(), run());
}

TEST(AutodiffBackward, ReverseSweepVisitsEveryNodeOnce) {
  // A diamond: f = (x + x) * x has gradient 4x.
  Tape t;
  const Var x = Var::variable(t, 1.25);
  const auto g = ad::backward(t, ((x + x) * x).id());
  EXPECT_EQ(g.wrt(x.id()), 5.0);
}
