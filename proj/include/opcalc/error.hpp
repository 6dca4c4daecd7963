#pragma once

#include <stdexcept>
#include <string>

namespace opcalc {

enum class ErrorCode {
  InvalidArgument = 1,
  DimensionMismatch = 2,
  SpaceMismatch = 3,
  NotSquareIntegrable = 4,
  Parse = 5,
  Validation = 6,
  CapacityExceeded = 7,
  Internal = 99,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace opcalc
