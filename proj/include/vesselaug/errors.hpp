#pragma once

#include <stdexcept>

namespace vesselaug {

/// File could not be opened, read, decoded or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input data breaks a contract: unsupported depth, duplicate ids,
/// ambiguous masks, mismatched datasets.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed configuration or command-line usage.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace vesselaug
