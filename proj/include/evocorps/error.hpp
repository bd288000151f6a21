#pragma once

#include <stdexcept>
#include <string>

namespace evocorps {

enum class ErrorCode {
  kOk = 0,
  kInvalidConfig,
  kInvalidArgument,
  kNotFound,
  kDuplicate,
  kParse,
  kIo,
  kBackend,
  kIncompleteLog,
};

const char* to_string(ErrorCode code) noexcept;

// Single exception type for the library; the C API maps `code()` onto its
// status enum.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Raised by the gateway once retries are exhausted; carries the role tag of
// the request that failed.
class BackendError : public Error {
 public:
  BackendError(std::string role_tag, const std::string& message)
      : Error(ErrorCode::kBackend, message), role_tag_(std::move(role_tag)) {}

  const std::string& role_tag() const noexcept { return role_tag_; }

 private:
  std::string role_tag_;
};

}  // namespace evocorps
