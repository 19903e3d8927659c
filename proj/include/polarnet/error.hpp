#pragma once

#include <stdexcept>
#include <string>

namespace polarnet {

/// Invalid configuration, missing inputs, or unmet stage dependencies.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input data. Raised in strict mode, or when the
/// data makes a requested statistic undefined.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace polarnet
