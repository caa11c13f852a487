#pragma once

#include <stdexcept>
#include <string>

namespace slelab {

enum class ErrorCode {
  InvalidArgument = 1,  // precondition on an input value
  Resolution = 2,       // event below what the discretization can resolve
  Internal = 3,         // violated internal invariant (geometry/numerics bug)
  Io = 4,
  ConfigMismatch = 5,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& msg) {
  throw Error(code, msg);
}

inline void require(bool cond, const std::string& msg) {
  if (!cond) fail(ErrorCode::InvalidArgument, msg);
}

}  // namespace slelab
