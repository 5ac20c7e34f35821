#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "stlfd/error.hpp"
#include "stlfd/stl/formula.hpp"

namespace stlfd::stl {

class ParseError : public ValidationError {
 public:
  ParseError(std::string message, int line, int column, std::vector<std::string> expected);

  int line() const { return line_; }
  int column() const { return column_; }
  const std::vector<std::string>& expected() const { return expected_; }

 private:
  int line_;
  int column_;
  std::vector<std::string> expected_;
};

// Grammar, loosest to tightest binding:
//   formula := implies
//   implies := or ("->" implies)?
//   or      := and ("or" and)*
//   and     := until ("and" until)*
//   until   := unary ("U" window unary)*
//   unary   := "not" unary | ("G"|"F") window "(" formula ")" | "(" formula ")" | pred
//   window  := "[" bound "," bound "]"
//   pred    := ident cmp (number | ident)
// Bounds and thresholds may name parameters (T, T_goal) that are
// substituted with Formula::bind before evaluation.
Formula parse_formula(std::string_view text);

}  // namespace stlfd::stl
