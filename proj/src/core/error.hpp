// Copyright 2026 The gvae Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef GVAE_CORE_ERROR_HPP_
#define GVAE_CORE_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace gvae {

/// Error categories. The numeric values are mirrored by gvae_status in the
/// C API, so keep them in sync.
enum class ErrorCode : int {
  kInvalidArgument = 1,
  kIo = 2,
  kFormat = 3,
  kConfig = 4,
  kNumeric = 5,
  kState = 6,
  kUnsupported = 7,
  kInternal = 8,
};

const char *ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string &what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void Fail(ErrorCode code, const std::string &what);

inline void Require(bool cond, ErrorCode code, const char *what) {
  if (!cond) Fail(code, what);
}

}  // namespace gvae

#endif  // GVAE_CORE_ERROR_HPP_
