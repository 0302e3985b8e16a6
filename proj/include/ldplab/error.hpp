#pragma once

#include <stdexcept>
#include <string>

namespace ldplab {

// Raised when a configuration value is missing, malformed or names an
// unknown kind. `key()` is the dotted path of the offending entry.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::runtime_error(key + ": " + message), key_(std::move(key)) {}

  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

// Non-finite states, non-convergence and unrepresentable estimates.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ldplab
