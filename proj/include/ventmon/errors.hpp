#pragma once

#include <stdexcept>
#include <string>

namespace ventmon {

/// Invalid configuration or parameter (out-of-range coefficient, threshold, scenario).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// File could not be opened, read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input data is malformed. `reason()` distinguishes the failure.
class DataError : public std::runtime_error {
 public:
  enum class Reason { Empty, Malformed, NonMonotoneTime, NonFinitePressure };

  DataError(Reason reason, const std::string& what)
      : std::runtime_error(what), reason_(reason) {}

  Reason reason() const noexcept { return reason_; }

 private:
  Reason reason_;
};

}  // namespace ventmon
