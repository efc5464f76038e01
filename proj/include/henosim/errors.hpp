#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace henosim {

/// Malformed text input. Carries the 1-based line number of the offending row.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}

  [[nodiscard]] std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A physical quantity or argument outside its admissible range.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class EmptyInputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration. `key()` names the offending configuration key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::runtime_error(key.empty() ? message : key + ": " + message), key_(std::move(key)) {}

  [[nodiscard]] const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

/// An internal consistency check failed during a run; the run is aborted.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Frame failed size, kind or FCS validation on decode.
class FrameCorrupt : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace henosim
