#pragma once

#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "stlfd/error.hpp"

namespace stlfd::stl {

class EvalError : public Error {
 public:
  using Error::Error;
};

// Discrete-time multi-channel real signal. All channels share one length.
class Signal {
 public:
  Signal() = default;
  explicit Signal(std::vector<std::string> names);
  Signal(std::initializer_list<std::pair<std::string, std::vector<double>>> channels);

  void add_channel(std::string name, std::vector<double> values);
  // Appends one sample given in channel-name order.
  void append(std::span<const double> sample);

  std::size_t length() const { return length_; }
  bool empty() const { return length_ == 0; }
  const std::vector<std::string>& names() const { return names_; }
  bool has_channel(std::string_view name) const;
  // Throws EvalError for unknown channels.
  const std::vector<double>& channel(std::string_view name) const;

  // First `n` samples of every channel.
  Signal prefix(std::size_t n) const;

 private:
  std::vector<std::string> names_;
  std::vector<std::vector<double>> columns_;
  std::size_t length_ = 0;
};

}  // namespace stlfd::stl
