#include "stlfd/stl/robustness.hpp"

#include <algorithm>
#include <cmath>

namespace stlfd::stl {

double predicate_value(const Predicate& p, double x) {
  const double c = p.threshold.value;
  switch (p.cmp) {
    case Comparator::Greater:
    case Comparator::GreaterEq: return x - c;
    case Comparator::Less:
    case Comparator::LessEq: return c - x;
    case Comparator::Equal: return -std::abs(x - c);
  }
  return 0.0;
}

Robustness robustness(const Formula& f, const Signal& s, std::size_t t, const EvalOptions& opts) {
  if (s.empty()) throw EvalError("signal is empty");
  if (t >= s.length()) {
    throw EvalError("time index " + std::to_string(t) + " outside signal of length " +
                    std::to_string(s.length()));
  }
  if (!f.is_bound()) throw UnboundParameter("formula has unbound parameters: " + f.to_string());
  for (const auto& ch : f.channels()) {
    if (!s.has_channel(ch)) throw EvalError("unknown channel '" + ch + "'");
  }
  if (opts.window == WindowPolicy::Strict &&
      t + static_cast<std::size_t>(f.horizon()) >= s.length()) {
    throw EvalError("formula needs samples up to index " + std::to_string(t + f.horizon()) +
                    " but the signal has " + std::to_string(s.length()));
  }
  const double raw = robustness_trace(f, s)[t];
  return {raw, clamp_robustness(raw, opts.cap)};
}

bool satisfies(const Formula& f, const Signal& s, const EvalOptions& opts) {
  return robustness(f, s, 0, opts).value >= 0.0;
}

Robustness robustness_prefix(const Formula& f, const Signal& partial, double cap) {
  return robustness(f, partial, 0, {WindowPolicy::Clip, cap});
}

PrefixMonitor::PrefixMonitor(Formula formula, std::vector<std::string> channels, double cap)
    : formula_(std::move(formula)), cap_(cap), history_(channels) {
  if (!formula_.is_bound()) {
    throw UnboundParameter("formula has unbound parameters: " + formula_.to_string());
  }
  for (const auto& ch : formula_.channels()) {
    if (std::find(channels.begin(), channels.end(), ch) == channels.end()) {
      throw EvalError("unknown channel '" + ch + "'");
    }
  }
  const Op op = formula_.op();
  if ((op == Op::Always || op == Op::Eventually) && formula_.arg().op() == Op::Predicate) {
    incremental_ = true;
    always_ = op == Op::Always;
    auto it = std::find(channels.begin(), channels.end(), formula_.arg().pred().channel);
    channel_index_ = static_cast<std::size_t>(it - channels.begin());
    lo_ = static_cast<std::size_t>(formula_.window().first());
    hi_ = static_cast<std::size_t>(formula_.window().last());
  }
  reset();
}

void PrefixMonitor::reset() {
  length_ = 0;
  raw_ = always_ ? MaxMinAlgebra::top() : MaxMinAlgebra::bottom();
  if (!incremental_) history_ = Signal(history_.names());
}

double PrefixMonitor::push(std::span<const double> sample) {
  const std::size_t k = length_++;
  if (incremental_) {
    if (k >= lo_ && k <= hi_) {
      const double v = predicate_value(formula_.arg().pred(), sample[channel_index_]);
      raw_ = always_ ? MaxMinAlgebra::otimes(raw_, v) : MaxMinAlgebra::oplus(raw_, v);
    }
  } else {
    history_.append(sample);
    raw_ = robustness_trace(formula_, history_)[0];
  }
  return value();
}

}  // namespace stlfd::stl
