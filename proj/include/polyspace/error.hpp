#pragma once

#include <stdexcept>
#include <string>

namespace polyspace {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Out-of-range parameters (lookup bits, formats, flags).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// The function cannot be bounded in the requested output format.
class SpecError : public Error {
 public:
  using Error::Error;
};

/// A search limit (k_max, enumeration cap, integer width) was exceeded.
class ResourceLimitError : public Error {
 public:
  using Error::Error;
};

/// A region has no feasible polynomial at the requested shift.
class GenerationError : public Error {
 public:
  GenerationError(const std::string& what, long region)
      : Error(what), region_(region) {}
  long region() const { return region_; }

 private:
  long region_;
};

/// Malformed or inconsistent text file.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Internal invariant broken; always a bug.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace polyspace
