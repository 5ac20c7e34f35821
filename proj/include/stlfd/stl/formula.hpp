#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>

#include "stlfd/error.hpp"

namespace stlfd::stl {

enum class Comparator { Greater, GreaterEq, Less, LessEq, Equal };

std::string_view to_string(Comparator cmp);

// Named numeric parameters substituted into formulas before evaluation,
// e.g. the horizon T or the BFS deadline T_goal.
using ParamMap = std::map<std::string, double, std::less<>>;

// A numeric literal or a reference to a named parameter.
struct Bound {
  double value = 0.0;
  std::string param;

  static Bound literal(double v) { return {v, {}}; }
  static Bound named(std::string name) { return {0.0, std::move(name)}; }

  bool is_literal() const { return param.empty(); }
  bool operator==(const Bound&) const = default;
};

// Inclusive window [lo, hi] of discrete step offsets.
struct Interval {
  Bound lo;
  Bound hi;

  bool operator==(const Interval&) const = default;
  // Only valid once both ends are literals.
  int first() const { return static_cast<int>(lo.value); }
  int last() const { return static_cast<int>(hi.value); }
};

enum class Op { Predicate, Not, And, Or, Implies, Always, Eventually, Until };

struct Predicate {
  std::string channel;
  Comparator cmp = Comparator::GreaterEq;
  Bound threshold;

  bool operator==(const Predicate&) const = default;
};

class UnboundParameter : public Error {
 public:
  using Error::Error;
};

// Immutable STL formula. Copies share structure.
class Formula {
 public:
  static Formula predicate(std::string channel, Comparator cmp, Bound threshold);
  static Formula predicate(std::string channel, Comparator cmp, double threshold) {
    return predicate(std::move(channel), cmp, Bound::literal(threshold));
  }
  static Formula negation(Formula arg);
  static Formula conjunction(Formula lhs, Formula rhs);
  static Formula disjunction(Formula lhs, Formula rhs);
  static Formula implication(Formula lhs, Formula rhs);
  static Formula always(Interval window, Formula arg);
  static Formula eventually(Interval window, Formula arg);
  static Formula until(Interval window, Formula lhs, Formula rhs);

  Op op() const;
  const Predicate& pred() const;
  const Interval& window() const;
  // Operand of unary nodes, left operand of binary ones.
  const Formula& lhs() const;
  const Formula& rhs() const;
  const Formula& arg() const { return lhs(); }

  bool is_temporal() const;
  bool is_bound() const;
  // Substitutes parameters; throws UnboundParameter for names missing from
  // `params` and ValidationError for windows that become invalid.
  Formula bind(const ParamMap& params) const;

  std::set<std::string> channels() const;
  std::set<std::string> parameters() const;
  // Steps past t that evaluation at t may look at.
  int horizon() const;
  int depth() const;

  // Surface syntax accepted by parse_formula.
  std::string to_string() const;

  // Structural equality.
  bool operator==(const Formula& other) const;

 private:
  struct Node;
  Formula() = default;
  explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

std::ostream& operator<<(std::ostream& os, const Formula& f);

}  // namespace stlfd::stl
