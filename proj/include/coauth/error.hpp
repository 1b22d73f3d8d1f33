#pragma once

#include <stdexcept>
#include <string>

namespace coauth {

// Mirrors the integer codes exposed through coauth.h.
enum class ErrorCode {
  kInvalidArgument = 1,
  kIo = 2,
  kParse = 3,
  kConfig = 4,
  kDependency = 5,
  kDomain = 6,
  kMismatch = 7,
  kInternal = 8,
};

const char* error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace coauth
