#pragma once

#include <stdexcept>
#include <string>

namespace fdb {

// Invalid user-facing configuration (flags, config file, dimension
// mismatches). The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// The deconvolution multiplier exceeded the overflow guard: the requested
// cutoff is too aggressive for the noise level. Hard error by design; silent
// clipping would fabricate exactly the bias this library exists to remove.
// The CLI maps this to exit code 3.
class OverflowGuardError : public std::runtime_error {
 public:
  OverflowGuardError(const std::string& what, long offending_index)
      : std::runtime_error(what), index(offending_index) {}
  long index;
};

}  // namespace fdb
