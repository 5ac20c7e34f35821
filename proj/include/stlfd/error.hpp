#pragma once

#include <stdexcept>
#include <string>

namespace stlfd {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input files, bad maps, demonstrations that do not fit an
// environment, inconsistent specification graphs.
class ValidationError : public Error {
 public:
  using Error::Error;
};

}  // namespace stlfd
