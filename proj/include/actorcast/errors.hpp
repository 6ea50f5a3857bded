#pragma once

#include <stdexcept>
#include <string>

namespace actorcast {

/// Invalid or unreadable configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input data that cannot be turned into a usable log, panel or matrix.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Model input does not match what the model was trained on.
class FeatureMismatchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace actorcast
