#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dsearch {

enum class ErrorKind {
  kInvalidConfiguration,
  kStateCorruption,
  kInvalidInput,
  kUndefinedMetric,
  kCalibration,
  kOracleFailure,
  kModelFailure,
  kIo,
};

std::string_view to_string(ErrorKind kind);

// Every failure raised by the library carries a kind so that the harness can
// emit a machine-readable error record. `field` names the offending config
// field when there is one.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message, std::string field = {})
      : std::runtime_error(message), kind_(kind), field_(std::move(field)) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& field() const noexcept { return field_; }

 private:
  ErrorKind kind_;
  std::string field_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message,
                              std::string field = {}) {
  throw Error(kind, message, std::move(field));
}

}  // namespace dsearch
