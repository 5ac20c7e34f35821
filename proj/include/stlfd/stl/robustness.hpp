#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "stlfd/stl/formula.hpp"
#include "stlfd/stl/signal.hpp"

namespace stlfd::stl {

// How temporal windows that run past the last sample are treated.
//   Clip   - restrict the window to available samples; an empty window gives
//            the neutral element (top for G, bottom for F and U).
//   Strict - evaluation fails if any needed sample is missing.
enum class WindowPolicy { Clip, Strict };

inline constexpr double kDefaultRobustnessCap = 1e6;

struct EvalOptions {
  WindowPolicy window = WindowPolicy::Clip;
  double cap = kDefaultRobustnessCap;
};

struct Robustness {
  double raw = 0.0;    // may be +/-infinity
  double value = 0.0;  // raw clamped to [-cap, cap]

  bool satisfied() const { return value >= 0.0; }
};

// (max, min, +inf, -inf). Other semirings can be plugged into the evaluator
// but only this one ships.
struct MaxMinAlgebra {
  static constexpr double top() { return std::numeric_limits<double>::infinity(); }
  static constexpr double bottom() { return -std::numeric_limits<double>::infinity(); }
  static double oplus(double a, double b) { return std::max(a, b); }
  static double otimes(double a, double b) { return std::min(a, b); }
  static double negate(double a) { return -a; }
};

double predicate_value(const Predicate& p, double sample);

inline double clamp_robustness(double raw, double cap) { return std::clamp(raw, -cap, cap); }

namespace detail {

template <class Algebra>
std::vector<double> evaluate(const Formula& f, const Signal& s) {
  const std::size_t n = s.length();
  std::vector<double> out(n);
  switch (f.op()) {
    case Op::Predicate: {
      if (!f.pred().threshold.is_literal()) {
        throw UnboundParameter("unbound parameter '" + f.pred().threshold.param + "'");
      }
      const auto& xs = s.channel(f.pred().channel);
      for (std::size_t t = 0; t < n; ++t) out[t] = predicate_value(f.pred(), xs[t]);
      return out;
    }
    case Op::Not: {
      auto a = evaluate<Algebra>(f.arg(), s);
      for (std::size_t t = 0; t < n; ++t) out[t] = Algebra::negate(a[t]);
      return out;
    }
    case Op::And:
    case Op::Or:
    case Op::Implies: {
      auto a = evaluate<Algebra>(f.lhs(), s);
      auto b = evaluate<Algebra>(f.rhs(), s);
      for (std::size_t t = 0; t < n; ++t) {
        if (f.op() == Op::And) out[t] = Algebra::otimes(a[t], b[t]);
        else if (f.op() == Op::Or) out[t] = Algebra::oplus(a[t], b[t]);
        else out[t] = Algebra::oplus(Algebra::negate(a[t]), b[t]);
      }
      return out;
    }
    case Op::Always:
    case Op::Eventually: {
      if (!f.window().lo.is_literal() || !f.window().hi.is_literal()) {
        throw UnboundParameter("temporal window has unbound parameters");
      }
      auto a = evaluate<Algebra>(f.arg(), s);
      const bool always = f.op() == Op::Always;
      const std::size_t lo = static_cast<std::size_t>(f.window().first());
      const std::size_t hi = static_cast<std::size_t>(f.window().last());
      for (std::size_t t = 0; t < n; ++t) {
        double acc = always ? Algebra::top() : Algebra::bottom();
        const std::size_t end = std::min(t + hi, n - 1);
        for (std::size_t tau = t + lo; tau <= end; ++tau) {
          acc = always ? Algebra::otimes(acc, a[tau]) : Algebra::oplus(acc, a[tau]);
        }
        out[t] = acc;
      }
      return out;
    }
    case Op::Until: {
      if (!f.window().lo.is_literal() || !f.window().hi.is_literal()) {
        throw UnboundParameter("temporal window has unbound parameters");
      }
      auto a = evaluate<Algebra>(f.lhs(), s);
      auto b = evaluate<Algebra>(f.rhs(), s);
      const std::size_t lo = static_cast<std::size_t>(f.window().first());
      const std::size_t hi = static_cast<std::size_t>(f.window().last());
      for (std::size_t t = 0; t < n; ++t) {
        // `held` is the otimes of lhs over [t, tau1).
        double held = Algebra::top();
        for (std::size_t tau = t; tau < std::min(t + lo, n); ++tau) {
          held = Algebra::otimes(held, a[tau]);
        }
        double acc = Algebra::bottom();
        const std::size_t end = std::min(t + hi, n - 1);
        for (std::size_t tau1 = t + lo; tau1 <= end; ++tau1) {
          acc = Algebra::oplus(acc, Algebra::otimes(b[tau1], held));
          held = Algebra::otimes(held, a[tau1]);
        }
        out[t] = acc;
      }
      return out;
    }
  }
  return out;
}

}  // namespace detail

// Raw robustness at every sample index.
template <class Algebra = MaxMinAlgebra>
std::vector<double> robustness_trace(const Formula& f, const Signal& s) {
  if (s.empty()) throw EvalError("signal is empty");
  return detail::evaluate<Algebra>(f, s);
}

Robustness robustness(const Formula& f, const Signal& s, std::size_t t, const EvalOptions& opts = {});

// robustness(f, s, 0) >= 0.
bool satisfies(const Formula& f, const Signal& s, const EvalOptions& opts = {});

// Robustness at t=0 of a partial signal, windows clipped to the samples seen so far.
Robustness robustness_prefix(const Formula& f, const Signal& partial, double cap = kDefaultRobustnessCap);

// Optional bounding transform applied to a spec's robustness before it is
// combined with others.
struct Squash {
  enum class Kind { Identity, Tanh };
  Kind kind = Kind::Identity;
  double scale = 1.0;

  double apply(double rho) const { return kind == Kind::Tanh ? std::tanh(rho / scale) : rho; }
  bool operator==(const Squash&) const = default;
};

// Prefix robustness of a formula over a signal that grows one sample at a
// time. G[a,b](pred) and F[a,b](pred) are tracked with a running min/max;
// any other shape re-evaluates the whole prefix on each push.
class PrefixMonitor {
 public:
  PrefixMonitor(Formula formula, std::vector<std::string> channels,
                double cap = kDefaultRobustnessCap);

  void reset();
  // `sample` is laid out in the channel order given at construction.
  double push(std::span<const double> sample);
  double value() const { return clamp_robustness(raw_, cap_); }
  double raw() const { return raw_; }
  std::size_t length() const { return length_; }
  bool incremental() const { return incremental_; }
  const Formula& formula() const { return formula_; }

 private:
  Formula formula_;
  double cap_;
  bool incremental_ = false;
  bool always_ = false;
  std::size_t channel_index_ = 0;
  std::size_t lo_ = 0;
  std::size_t hi_ = 0;
  double raw_ = 0.0;
  std::size_t length_ = 0;
  Signal history_;
};

}  // namespace stlfd::stl
