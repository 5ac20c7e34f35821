#include "stlfd/stl/formula.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>
#include <sstream>

namespace stlfd::stl {

struct Formula::Node {
  Op op = Op::Predicate;
  Predicate pred;
  Interval window;
  Formula a;
  Formula b;
};

std::string_view to_string(Comparator cmp) {
  switch (cmp) {
    case Comparator::Greater: return ">";
    case Comparator::GreaterEq: return ">=";
    case Comparator::Less: return "<";
    case Comparator::LessEq: return "<=";
    case Comparator::Equal: return "==";
  }
  return "?";
}

namespace {

void check_window(const Interval& w) {
  auto check_end = [](const Bound& b) {
    if (!b.is_literal()) return;
    if (b.value < 0 || std::floor(b.value) != b.value) {
      throw ValidationError("interval bounds must be non-negative integers");
    }
  };
  check_end(w.lo);
  check_end(w.hi);
  if (w.lo.is_literal() && w.hi.is_literal() && w.hi.value < w.lo.value) {
    throw ValidationError("interval upper bound below lower bound");
  }
}

std::string format_number(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

std::string format_bound(const Bound& b) {
  return b.is_literal() ? format_number(b.value) : b.param;
}

// Binding strength used by the printer; mirrors the parser's precedence.
int level(Op op) {
  switch (op) {
    case Op::Implies: return 1;
    case Op::Or: return 2;
    case Op::And: return 3;
    case Op::Until: return 4;
    default: return 5;
  }
}

void print(std::ostream& os, const Formula& f, int min_level);

void print_child(std::ostream& os, const Formula& f, int min_level) {
  if (level(f.op()) < min_level) {
    os << '(';
    print(os, f, 0);
    os << ')';
  } else {
    print(os, f, min_level);
  }
}

void print_window(std::ostream& os, const Interval& w) {
  os << '[' << format_bound(w.lo) << ',' << format_bound(w.hi) << ']';
}

void print(std::ostream& os, const Formula& f, int) {
  switch (f.op()) {
    case Op::Predicate:
      os << f.pred().channel << ' ' << to_string(f.pred().cmp) << ' '
         << format_bound(f.pred().threshold);
      return;
    case Op::Not:
      os << "not ";
      print_child(os, f.arg(), 5);
      return;
    case Op::And:
      print_child(os, f.lhs(), 3);
      os << " and ";
      print_child(os, f.rhs(), 4);
      return;
    case Op::Or:
      print_child(os, f.lhs(), 2);
      os << " or ";
      print_child(os, f.rhs(), 3);
      return;
    case Op::Implies:
      print_child(os, f.lhs(), 2);
      os << " -> ";
      print_child(os, f.rhs(), 1);
      return;
    case Op::Always:
    case Op::Eventually:
      os << (f.op() == Op::Always ? 'G' : 'F');
      print_window(os, f.window());
      os << '(';
      print(os, f.arg(), 0);
      os << ')';
      return;
    case Op::Until:
      print_child(os, f.lhs(), 4);
      os << " U";
      print_window(os, f.window());
      os << ' ';
      print_child(os, f.rhs(), 5);
      return;
  }
}

}  // namespace

Formula Formula::predicate(std::string channel, Comparator cmp, Bound threshold) {
  auto n = std::make_shared<Node>();
  n->op = Op::Predicate;
  n->pred = {std::move(channel), cmp, std::move(threshold)};
  return Formula(std::move(n));
}

Formula Formula::negation(Formula arg) {
  auto n = std::make_shared<Node>();
  n->op = Op::Not;
  n->a = std::move(arg);
  return Formula(std::move(n));
}

namespace {
template <class Node, class F>
std::shared_ptr<Node> binary(Op op, F lhs, F rhs) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->a = std::move(lhs);
  n->b = std::move(rhs);
  return n;
}
}  // namespace

Formula Formula::conjunction(Formula lhs, Formula rhs) {
  return Formula(binary<Node>(Op::And, std::move(lhs), std::move(rhs)));
}
Formula Formula::disjunction(Formula lhs, Formula rhs) {
  return Formula(binary<Node>(Op::Or, std::move(lhs), std::move(rhs)));
}
Formula Formula::implication(Formula lhs, Formula rhs) {
  return Formula(binary<Node>(Op::Implies, std::move(lhs), std::move(rhs)));
}

Formula Formula::always(Interval window, Formula arg) {
  check_window(window);
  auto n = std::make_shared<Node>();
  n->op = Op::Always;
  n->window = std::move(window);
  n->a = std::move(arg);
  return Formula(std::move(n));
}

Formula Formula::eventually(Interval window, Formula arg) {
  check_window(window);
  auto n = std::make_shared<Node>();
  n->op = Op::Eventually;
  n->window = std::move(window);
  n->a = std::move(arg);
  return Formula(std::move(n));
}

Formula Formula::until(Interval window, Formula lhs, Formula rhs) {
  check_window(window);
  auto n = binary<Node>(Op::Until, std::move(lhs), std::move(rhs));
  n->window = std::move(window);
  return Formula(std::move(n));
}

Op Formula::op() const { return node_->op; }
const Predicate& Formula::pred() const { return node_->pred; }
const Interval& Formula::window() const { return node_->window; }
const Formula& Formula::lhs() const { return node_->a; }
const Formula& Formula::rhs() const { return node_->b; }

bool Formula::is_temporal() const {
  return op() == Op::Always || op() == Op::Eventually || op() == Op::Until;
}

bool Formula::is_bound() const { return parameters().empty(); }

Formula Formula::bind(const ParamMap& params) const {
  auto resolve = [&](const Bound& b) {
    if (b.is_literal()) return b;
    auto it = params.find(b.param);
    if (it == params.end()) throw UnboundParameter("unbound parameter '" + b.param + "'");
    return Bound::literal(it->second);
  };
  auto resolve_window = [&](const Interval& w) {
    Interval out{resolve(w.lo), resolve(w.hi)};
    // Horizons bound from data may be fractional (e.g. a continuous deadline).
    out.lo.value = std::floor(out.lo.value);
    out.hi.value = std::floor(out.hi.value);
    return out;
  };
  switch (op()) {
    case Op::Predicate:
      return predicate(pred().channel, pred().cmp, resolve(pred().threshold));
    case Op::Not:
      return negation(arg().bind(params));
    case Op::And:
      return conjunction(lhs().bind(params), rhs().bind(params));
    case Op::Or:
      return disjunction(lhs().bind(params), rhs().bind(params));
    case Op::Implies:
      return implication(lhs().bind(params), rhs().bind(params));
    case Op::Always:
      return always(resolve_window(window()), arg().bind(params));
    case Op::Eventually:
      return eventually(resolve_window(window()), arg().bind(params));
    case Op::Until:
      return until(resolve_window(window()), lhs().bind(params), rhs().bind(params));
  }
  return *this;
}

std::set<std::string> Formula::channels() const {
  std::set<std::string> out;
  if (op() == Op::Predicate) {
    out.insert(pred().channel);
    return out;
  }
  out = lhs().channels();
  if (op() != Op::Not && op() != Op::Always && op() != Op::Eventually) {
    out.merge(rhs().channels());
  }
  return out;
}

std::set<std::string> Formula::parameters() const {
  std::set<std::string> out;
  if (op() == Op::Predicate) {
    if (!pred().threshold.is_literal()) out.insert(pred().threshold.param);
    return out;
  }
  if (is_temporal()) {
    if (!window().lo.is_literal()) out.insert(window().lo.param);
    if (!window().hi.is_literal()) out.insert(window().hi.param);
  }
  out.merge(lhs().parameters());
  if (op() == Op::And || op() == Op::Or || op() == Op::Implies || op() == Op::Until) {
    out.merge(rhs().parameters());
  }
  return out;
}

int Formula::horizon() const {
  switch (op()) {
    case Op::Predicate: return 0;
    case Op::Not: return arg().horizon();
    case Op::And:
    case Op::Or:
    case Op::Implies: return std::max(lhs().horizon(), rhs().horizon());
    case Op::Always:
    case Op::Eventually: return window().last() + arg().horizon();
    case Op::Until: return window().last() + std::max(lhs().horizon(), rhs().horizon());
  }
  return 0;
}

int Formula::depth() const {
  switch (op()) {
    case Op::Predicate: return 1;
    case Op::Not:
    case Op::Always:
    case Op::Eventually: return 1 + arg().depth();
    default: return 1 + std::max(lhs().depth(), rhs().depth());
  }
}

std::string Formula::to_string() const {
  std::ostringstream os;
  print(os, *this, 0);
  return os.str();
}

bool Formula::operator==(const Formula& other) const {
  if (node_ == other.node_) return true;
  if (!node_ || !other.node_) return false;
  if (op() != other.op()) return false;
  switch (op()) {
    case Op::Predicate: return pred() == other.pred();
    case Op::Not: return arg() == other.arg();
    case Op::And:
    case Op::Or:
    case Op::Implies: return lhs() == other.lhs() && rhs() == other.rhs();
    case Op::Always:
    case Op::Eventually: return window() == other.window() && arg() == other.arg();
    case Op::Until:
      return window() == other.window() && lhs() == other.lhs() && rhs() == other.rhs();
  }
  return false;
}

std::ostream& operator<<(std::ostream& os, const Formula& f) { return os << f.to_string(); }

}  // namespace stlfd::stl
