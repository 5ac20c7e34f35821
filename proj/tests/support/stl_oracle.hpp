#pragma once

// Independent reference semantics for tests: a Boolean STL evaluator that
// works straight from the definitions, and a random formula/signal
// generator.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "stlfd/stl/formula.hpp"
#include "stlfd/stl/signal.hpp"

namespace oracle {

using stlfd::stl::Comparator;
using stlfd::stl::Formula;
using stlfd::stl::Op;
using stlfd::stl::Signal;

inline bool compare(double x, Comparator cmp, double c) {
  switch (cmp) {
    case Comparator::Greater: return x > c;
    case Comparator::GreaterEq: return x >= c;
    case Comparator::Less: return x < c;
    case Comparator::LessEq: return x <= c;
    case Comparator::Equal: return x == c;
  }
  return false;
}

// Boolean satisfaction at sample t. Windows are clipped to the last sample;
// an empty window makes G true and F, U false.
inline bool holds(const Formula& f, const Signal& s, std::size_t t) {
  const std::size_t n = s.length();
  switch (f.op()) {
    case Op::Predicate:
      return compare(s.channel(f.pred().channel)[t], f.pred().cmp, f.pred().threshold.value);
    case Op::Not: return !holds(f.arg(), s, t);
    case Op::And: return holds(f.lhs(), s, t) && holds(f.rhs(), s, t);
    case Op::Or: return holds(f.lhs(), s, t) || holds(f.rhs(), s, t);
    case Op::Implies: return !holds(f.lhs(), s, t) || holds(f.rhs(), s, t);
    case Op::Always:
    case Op::Eventually: {
      const bool always = f.op() == Op::Always;
      for (std::size_t tau = t + static_cast<std::size_t>(f.window().first());
           tau <= t + static_cast<std::size_t>(f.window().last()) && tau < n; ++tau) {
        const bool v = holds(f.arg(), s, tau);
        if (always && !v) return false;
        if (!always && v) return true;
      }
      return always;
    }
    case Op::Until: {
      for (std::size_t tau = t + static_cast<std::size_t>(f.window().first());
           tau <= t + static_cast<std::size_t>(f.window().last()) && tau < n; ++tau) {
        if (!holds(f.rhs(), s, tau)) continue;
        bool held = true;
        for (std::size_t k = t; k < tau && held; ++k) held = holds(f.lhs(), s, k);
        if (held) return true;
      }
      return false;
    }
  }
  return false;
}

// Values are multiples of 0.25 in [-4, 4] so sums and differences are exact.
class Generator {
 public:
  explicit Generator(std::uint64_t seed) : rng_(seed) {}

  double value() { return static_cast<double>(uniform(-16, 16)) * 0.25; }

  Signal signal(std::size_t length) {
    Signal s;
    for (const char* name : {"x", "y"}) {
      std::vector<double> xs(length);
      for (double& v : xs) v = value();
      s.add_channel(name, std::move(xs));
    }
    return s;
  }

  Signal signal() { return signal(static_cast<std::size_t>(uniform(1, 12))); }

  Formula predicate() {
    static const Comparator cmps[] = {Comparator::Greater, Comparator::GreaterEq, Comparator::Less,
                                      Comparator::LessEq, Comparator::Equal};
    const Comparator cmp = cmps[uniform(0, with_equal_ ? 4 : 3)];
    return Formula::predicate(uniform(0, 1) == 0 ? "x" : "y", cmp, value());
  }

  stlfd::stl::Interval window() {
    const int lo = uniform(0, 3);
    const int hi = lo + uniform(0, 5);
    return {stlfd::stl::Bound::literal(lo), stlfd::stl::Bound::literal(hi)};
  }

  Formula formula(int depth) {
    if (depth <= 1 || uniform(0, 4) == 0) return predicate();
    switch (uniform(0, 6)) {
      case 0: return Formula::negation(formula(depth - 1));
      case 1: return Formula::conjunction(formula(depth - 1), formula(depth - 1));
      case 2: return Formula::disjunction(formula(depth - 1), formula(depth - 1));
      case 3: return Formula::implication(formula(depth - 1), formula(depth - 1));
      case 4: return Formula::always(window(), formula(depth - 1));
      case 5: return Formula::eventually(window(), formula(depth - 1));
      default: return Formula::until(window(), formula(depth - 1), formula(depth - 1));
    }
  }

  Formula formula() { return formula(uniform(1, 4)); }

  void allow_equal(bool on) { with_equal_ = on; }
  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

 private:
  std::mt19937_64 rng_;
  bool with_equal_ = true;
};

}  // namespace oracle
