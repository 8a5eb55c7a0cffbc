#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tramsim {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A value violates the documented range or invariant of a parameter type.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Integration produced a non-finite quantity.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// A query fell outside the domain of a lookup (e.g. chainage beyond the track).
class RangeError : public Error {
 public:
  using Error::Error;
};

/// A GNSS fix lies farther from the track than the acceptance gate.
class OffTrackError : public Error {
 public:
  OffTrackError(const std::string& what, double lateral_offset)
      : Error(what), lateral_offset_(lateral_offset) {}
  double lateral_offset() const noexcept { return lateral_offset_; }

 private:
  double lateral_offset_;
};

/// Braking simulation reached its time guard without the tram stopping.
class NonStoppingError : public Error {
 public:
  using Error::Error;
};

/// Regression design is rank deficient or there is not enough data.
class IdentifiabilityError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file. `line()` is 1-based; 0 means "whole file".
class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& message)
      : Error(source + (line > 0 ? ":" + std::to_string(line) : std::string{}) + ": " + message),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Inconsistent or missing configuration (CLI options, config keys).
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace tramsim
