#pragma once

#include <stdexcept>
#include <string>

namespace msmsf {

// Exit-code classes surfaced by the CLI: 2 config/usage, 3 data, 4 numeric.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace msmsf
