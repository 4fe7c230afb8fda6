#pragma once

#include <stdexcept>
#include <string>

namespace regspec {

enum class ErrorCode {
  invalid_argument,
  invalid_input,
  invalid_penalty,
  normalization_undefined,
  degenerate_data,
  singular_system,
  io_failure,
};

/// Single exception type for the library; `code()` tells callers (the CLI in
/// particular) which failure class they are looking at.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

namespace detail {

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) throw Error(code, message);
}

inline void require_arg(bool condition, const std::string& message) {
  require(condition, ErrorCode::invalid_argument, message);
}

}  // namespace detail
}  // namespace regspec
