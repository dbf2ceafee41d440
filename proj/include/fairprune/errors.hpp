#pragma once

#include <stdexcept>
#include <string>

namespace fairprune {

// Bad configuration: shape mismatches, invalid hyperparameters, unreadable
// config files. CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Bad or missing data: CSV parse failures, empty groups, checkpoint
// corruption. CLI maps this to exit code 3.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// A broken internal invariant. CLI maps this to exit code 4.
class InternalError : public std::logic_error {
 public:
  explicit InternalError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace fairprune
