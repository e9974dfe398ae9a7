#pragma once

#include <stdexcept>
#include <string>

namespace passval {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Input data violates a documented precondition or bound.
struct ValidationError : Error {
  using Error::Error;
};

// Run configuration is internally inconsistent or incomplete.
struct ConfigError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

}  // namespace passval
