#pragma once

#include <stdexcept>
#include <string>

namespace adiabat {

/// Failure categories. The C API maps these one-to-one onto adiabat_status.
enum class ErrorCode {
  invalid_argument = 1,
  dimension_mismatch = 2,
  numerical = 3,
  config = 4,
  io = 5,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool ok, ErrorCode code, const std::string& what) {
  if (!ok) fail(code, what);
}

}  // namespace adiabat
