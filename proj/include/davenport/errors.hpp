#pragma once

#include <stdexcept>
#include <string>

namespace davenport {

// Malformed or out-of-domain arguments. Maps to CLI exit code 1.
struct InvalidInput : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A size cap would be exceeded. Maps to CLI exit code 2.
struct ResourceLimit : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Non-finite intermediate or an unverifiable numeric claim. Maps to CLI exit code 3.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace davenport
