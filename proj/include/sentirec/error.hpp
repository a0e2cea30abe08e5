#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sentirec {

enum class ErrorKind {
  configuration,
  ingestion,
  empty_input,
  parse,
  validation,
  parameter,
  format,
  dimension_mismatch,
  undefined_metric,
  numerical_failure,
  protocol,
};

constexpr std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::configuration: return "configuration error";
    case ErrorKind::ingestion: return "ingestion error";
    case ErrorKind::empty_input: return "empty input";
    case ErrorKind::parse: return "parse error";
    case ErrorKind::validation: return "validation error";
    case ErrorKind::parameter: return "parameter error";
    case ErrorKind::format: return "format error";
    case ErrorKind::dimension_mismatch: return "dimension mismatch";
    case ErrorKind::undefined_metric: return "undefined metric";
    case ErrorKind::numerical_failure: return "numerical failure";
    case ErrorKind::protocol: return "protocol error";
  }
  return "error";
}

/// Single exception type for the library; `kind()` tells callers which
/// contract was violated so the CLI can map it to an exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  /// True for errors caused by bad input or usage rather than by a failed computation.
  bool is_input_error() const noexcept {
    switch (kind_) {
      case ErrorKind::numerical_failure:
      case ErrorKind::protocol:
      case ErrorKind::undefined_metric:
        return false;
      default:
        return true;
    }
  }

 private:
  ErrorKind kind_;
};

}  // namespace sentirec
