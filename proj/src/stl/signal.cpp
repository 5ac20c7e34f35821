#include "stlfd/stl/signal.hpp"

#include <algorithm>

namespace stlfd::stl {

Signal::Signal(std::vector<std::string> names)
    : names_(std::move(names)), columns_(names_.size()) {}

Signal::Signal(std::initializer_list<std::pair<std::string, std::vector<double>>> channels) {
  for (const auto& [name, values] : channels) add_channel(name, values);
}

void Signal::add_channel(std::string name, std::vector<double> values) {
  if (has_channel(name)) throw EvalError("duplicate channel '" + name + "'");
  if (!names_.empty() && values.size() != length_) {
    throw EvalError("channel '" + name + "' has length " + std::to_string(values.size()) +
                    ", expected " + std::to_string(length_));
  }
  length_ = values.size();
  names_.push_back(std::move(name));
  columns_.push_back(std::move(values));
}

void Signal::append(std::span<const double> sample) {
  if (sample.size() != columns_.size()) throw EvalError("sample width does not match channels");
  for (std::size_t i = 0; i < sample.size(); ++i) columns_[i].push_back(sample[i]);
  ++length_;
}

bool Signal::has_channel(std::string_view name) const {
  return std::find(names_.begin(), names_.end(), name) != names_.end();
}

const std::vector<double>& Signal::channel(std::string_view name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) throw EvalError("unknown channel '" + std::string(name) + "'");
  return columns_[static_cast<std::size_t>(it - names_.begin())];
}

Signal Signal::prefix(std::size_t n) const {
  Signal out(names_);
  n = std::min(n, length_);
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    out.columns_[i].assign(columns_[i].begin(), columns_[i].begin() + static_cast<long>(n));
  }
  out.length_ = n;
  return out;
}

}  // namespace stlfd::stl
