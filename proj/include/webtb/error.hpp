#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace webtb {

/// Malformed input text (blacklists, replay files, configs). Carries the 1-based line.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Browser control failed (protocol error response, unexpected reply).
class DriverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A command got no reply in time; the browser may still be alive.
class DriverTimeout : public DriverError {
 public:
  using DriverError::DriverError;
};

/// The browser process went away mid-session.
class DriverCrashed : public DriverError {
 public:
  using DriverError::DriverError;
};

/// State purge could not be verified; further measurements would be contaminated.
class PurgeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Interference measurement requested without a matching baseline.
class CalibrationMissing : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace webtb
