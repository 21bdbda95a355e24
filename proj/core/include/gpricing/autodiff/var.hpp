#pragma once

#include <cmath>
#include <span>
#include <utility>
#include <vector>

#include "gpricing/autodiff/tape.hpp"
#include "gpricing/special.hpp"

namespace gpricing::ad {

/// Handle to a node on a Tape. Arithmetic on Vars records new nodes.
class Var {
 public:
  Var() = default;
  Var(Tape& tape, NodeId id) : tape_(&tape), id_(id) {}

  static Var variable(Tape& tape, double v) { return {tape, tape.variable(v)}; }
  static Var constant(Tape& tape, double v) { return {tape, tape.constant(v)}; }

  double value() const { return tape_->value(id_); }
  NodeId id() const { return id_; }
  Tape& tape() const { return *tape_; }

 private:
  Tape* tape_ = nullptr;
  NodeId id_ = 0;
};

namespace detail {

inline Var unary(Op op, const Var& a) {
  const auto [v, da, db] = evaluate_op(op, a.value(), 0.0);
  return {a.tape(), a.tape().push_unary(op, a.id(), v, da)};
}

inline Var binary(Op op, const Var& a, const Var& b) {
  const auto [v, da, db] = evaluate_op(op, a.value(), b.value());
  return {a.tape(), a.tape().push_binary(op, a.id(), b.id(), v, da, db)};
}

inline Var lift(const Var& like, double c) { return Var::constant(like.tape(), c); }

}  // namespace detail

inline Var operator+(const Var& a, const Var& b) { return detail::binary(Op::add, a, b); }
inline Var operator-(const Var& a, const Var& b) { return detail::binary(Op::sub, a, b); }
inline Var operator*(const Var& a, const Var& b) { return detail::binary(Op::mul, a, b); }
inline Var operator/(const Var& a, const Var& b) { return detail::binary(Op::div, a, b); }
inline Var operator-(const Var& a) { return detail::unary(Op::neg, a); }

inline Var operator+(const Var& a, double c) { return a + detail::lift(a, c); }
inline Var operator+(double c, const Var& a) { return detail::lift(a, c) + a; }
inline Var operator-(const Var& a, double c) { return a - detail::lift(a, c); }
inline Var operator-(double c, const Var& a) { return detail::lift(a, c) - a; }
inline Var operator*(const Var& a, double c) { return a * detail::lift(a, c); }
inline Var operator*(double c, const Var& a) { return detail::lift(a, c) * a; }
inline Var operator/(const Var& a, double c) { return a / detail::lift(a, c); }
inline Var operator/(double c, const Var& a) { return detail::lift(a, c) / a; }

inline Var& operator+=(Var& a, const Var& b) { return a = a + b; }
inline Var& operator-=(Var& a, const Var& b) { return a = a - b; }
inline Var& operator*=(Var& a, const Var& b) { return a = a * b; }

inline Var exp(const Var& a) { return detail::unary(Op::exp, a); }
inline Var log(const Var& a) { return detail::unary(Op::ln, a); }
inline Var sin(const Var& a) { return detail::unary(Op::sin, a); }
inline Var cos(const Var& a) { return detail::unary(Op::cos, a); }
inline Var tanh(const Var& a) { return detail::unary(Op::tanh, a); }
inline Var gelu(const Var& a) { return detail::unary(Op::gelu, a); }
inline Var silu(const Var& a) { return detail::unary(Op::silu, a); }
inline Var softplus(const Var& a) { return detail::unary(Op::softplus, a); }
inline Var sigmoid(const Var& a) { return detail::unary(Op::sigmoid, a); }
inline Var sqrt(const Var& a) { return detail::unary(Op::sqrt, a); }
inline Var square(const Var& a) { return detail::unary(Op::pow2, a); }
inline Var normcdf(const Var& a) { return detail::unary(Op::normcdf, a); }
inline Var normpdf(const Var& a) { return detail::unary(Op::normpdf, a); }
inline Var max(const Var& a, const Var& b) { return detail::binary(Op::max, a, b); }

inline double primal_value(const Var& a) { return a.value(); }

// Plain-double counterparts so generic code can call the same names.
inline double gelu(double x) { return special::gelu(x); }
inline double silu(double x) { return special::silu(x); }
inline double softplus(double x) { return special::softplus(x); }
inline double sigmoid(double x) { return special::sigmoid(x); }
inline double square(double x) { return x * x; }
inline double normcdf(double x) { return special::normal_cdf(x); }
inline double normpdf(double x) { return special::normal_pdf(x); }
inline double max(double a, double b) { return a >= b ? a : b; }
inline double primal_value(double a) { return a; }

/// Forward-mode dual number. With T = Var both parts live on a tape, so a
/// reverse sweep differentiates through the tangent (second-order flow).
template <class T>
struct Dual {
  T primal{};
  T tangent{};
};

template <class T>
double primal_value(const Dual<T>& d) {
  return primal_value(d.primal);
}

template <class T>
Dual<T> operator+(const Dual<T>& a, const Dual<T>& b) {
  return {a.primal + b.primal, a.tangent + b.tangent};
}
template <class T>
Dual<T> operator-(const Dual<T>& a, const Dual<T>& b) {
  return {a.primal - b.primal, a.tangent - b.tangent};
}
template <class T>
Dual<T> operator*(const Dual<T>& a, const Dual<T>& b) {
  return {a.primal * b.primal, a.tangent * b.primal + a.primal * b.tangent};
}
template <class T>
Dual<T> operator/(const Dual<T>& a, const Dual<T>& b) {
  const T q = a.primal / b.primal;
  return {q, (a.tangent - q * b.tangent) / b.primal};
}
template <class T>
Dual<T> operator-(const Dual<T>& a) {
  return {-a.primal, -a.tangent};
}
template <class T>
Dual<T> operator*(const Dual<T>& a, double c) {
  return {a.primal * c, a.tangent * c};
}
template <class T>
Dual<T> operator*(double c, const Dual<T>& a) {
  return a * c;
}
template <class T>
Dual<T> operator+(const Dual<T>& a, double c) {
  return {a.primal + c, a.tangent};
}
template <class T>
Dual<T> operator+(double c, const Dual<T>& a) {
  return a + c;
}
template <class T>
Dual<T> operator-(const Dual<T>& a, double c) {
  return {a.primal - c, a.tangent};
}
template <class T>
Dual<T> operator-(double c, const Dual<T>& a) {
  return {c - a.primal, -a.tangent};
}
template <class T>
Dual<T>& operator+=(Dual<T>& a, const Dual<T>& b) {
  return a = a + b;
}

template <class T>
Dual<T> exp(const Dual<T>& a) {
  using std::exp;
  const T e = exp(a.primal);
  return {e, e * a.tangent};
}
template <class T>
Dual<T> log(const Dual<T>& a) {
  using std::log;
  return {log(a.primal), a.tangent / a.primal};
}
template <class T>
Dual<T> sin(const Dual<T>& a) {
  using std::cos;
  using std::sin;
  return {sin(a.primal), cos(a.primal) * a.tangent};
}
template <class T>
Dual<T> cos(const Dual<T>& a) {
  using std::cos;
  using std::sin;
  return {cos(a.primal), -(sin(a.primal) * a.tangent)};
}
template <class T>
Dual<T> tanh(const Dual<T>& a) {
  using std::tanh;
  const T t = tanh(a.primal);
  return {t, (1.0 - t * t) * a.tangent};
}
template <class T>
Dual<T> sigmoid(const Dual<T>& a) {
  const T s = sigmoid(a.primal);
  return {s, s * (1.0 - s) * a.tangent};
}
template <class T>
Dual<T> gelu(const Dual<T>& a) {
  const T& x = a.primal;
  return {gelu(x), (normcdf(x) + x * normpdf(x)) * a.tangent};
}
template <class T>
Dual<T> silu(const Dual<T>& a) {
  const T& x = a.primal;
  const T s = sigmoid(x);
  return {x * s, (s + x * s * (1.0 - s)) * a.tangent};
}
template <class T>
Dual<T> softplus(const Dual<T>& a) {
  return {softplus(a.primal), sigmoid(a.primal) * a.tangent};
}
template <class T>
Dual<T> sqrt(const Dual<T>& a) {
  using std::sqrt;
  const T r = sqrt(a.primal);
  return {r, a.tangent / (2.0 * r)};
}
template <class T>
Dual<T> square(const Dual<T>& a) {
  return {square(a.primal), 2.0 * a.primal * a.tangent};
}
template <class T>
Dual<T> normcdf(const Dual<T>& a) {
  return {normcdf(a.primal), normpdf(a.primal) * a.tangent};
}
template <class T>
Dual<T> normpdf(const Dual<T>& a) {
  const T p = normpdf(a.primal);
  return {p, -(a.primal * p) * a.tangent};
}
template <class T>
Dual<T> max(const Dual<T>& a, const Dual<T>& b) {
  return primal_value(a.primal) >= primal_value(b.primal) ? a : b;
}

/// Evaluates f on duals seeded with `direction` and returns the value and
/// the directional derivative as tape nodes, so an outer backward() sweep
/// differentiates through the derivative as well.
template <class F>
std::pair<Var, Var> directional_value_and_grad(F&& f, std::span<const Var> inputs,
                                                std::span<const double> direction) {
  std::vector<Dual<Var>> x;
  x.reserve(inputs.size());
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    x.push_back({inputs[i], Var::constant(inputs[i].tape(), direction[i])});
  }
  const Dual<Var> y = f(std::span<const Dual<Var>>(x));
  return {y.primal, y.tangent};
}

}  // namespace gpricing::ad
