#ifndef FACEKIT_CORE_ERRORS_HPP_
#define FACEKIT_CORE_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace facekit {

// Error codes are shared across the core, the C API and CLI exit codes.
enum class ErrorCode : int {
  Ok = 0,
  Usage = 2,
  Io = 3,
  Parse = 4,
  Validation = 5,
  Dimension = 6,
  MissingId = 7,
  Degenerate = 8,
  Internal = 9,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& msg)
      : std::runtime_error(msg), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& msg) {
  throw Error(code, msg);
}

inline const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::Ok: return "ok";
    case ErrorCode::Usage: return "usage";
    case ErrorCode::Io: return "io";
    case ErrorCode::Parse: return "parse";
    case ErrorCode::Validation: return "validation";
    case ErrorCode::Dimension: return "dimension";
    case ErrorCode::MissingId: return "missing-id";
    case ErrorCode::Degenerate: return "degenerate";
    case ErrorCode::Internal: return "internal";
  }
  return "unknown";
}

}  // namespace facekit

#endif  // FACEKIT_CORE_ERRORS_HPP_
