#pragma once

#include <stdexcept>
#include <string>

namespace fleet_hlc {

// Invalid configuration value. `field()` names the offending setting.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

// Observation or input file content that violates a data contract.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A function was called outside its precondition.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Upper-level forecast step that would drain the battery below zero.
class InfeasibleTransition : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// File could not be read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fleet_hlc
