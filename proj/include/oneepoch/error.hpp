#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace oneepoch {

// Closed set of failure kinds. The CLI maps invalid_argument to exit code 2
// and every other code to exit code 3.
enum class ErrorCode {
  invalid_argument,
  insufficient_data,
  no_region,
  no_intersection,
  domain_error,
  no_overlap,
  unreachable,
  invalid_schedule,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::insufficient_data: return "insufficient_data";
    case ErrorCode::no_region: return "no_region";
    case ErrorCode::no_intersection: return "no_intersection";
    case ErrorCode::domain_error: return "domain_error";
    case ErrorCode::no_overlap: return "no_overlap";
    case ErrorCode::unreachable: return "unreachable";
    case ErrorCode::invalid_schedule: return "invalid_schedule";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

namespace detail {

inline void require(bool cond, const std::string& what, ErrorCode code = ErrorCode::invalid_argument) {
  if (!cond) throw Error(code, what);
}

}  // namespace detail

}  // namespace oneepoch
