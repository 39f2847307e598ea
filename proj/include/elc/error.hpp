#pragma once

#include <stdexcept>
#include <string>

namespace elc {

// Base class for everything the library throws on purpose.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Operand shapes are incompatible. Messages name both shapes.
class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& what) : Error(what) {}
};

// A documented precondition was violated.
class ContractError : public Error {
 public:
  explicit ContractError(const std::string& what) : Error(what) {}
};

// Malformed or inconsistent input data (files, labels, manifests).
class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(what) {}
};

// Bad configuration: unknown keys, unparsable values, invalid combinations.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(what) {}
};

// Persistence-level corruption: checksum mismatch, truncated checkpoint.
class IntegrityError : public Error {
 public:
  explicit IntegrityError(const std::string& what) : Error(what) {}
};

}  // namespace elc
