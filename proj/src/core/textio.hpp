// Copyright 2026 The gvae Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef GVAE_CORE_TEXTIO_HPP_
#define GVAE_CORE_TEXTIO_HPP_

#include <fstream>
#include <sstream>
#include <string>

#include "core/error.hpp"

namespace gvae {

inline std::string ReadText(const std::string &path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) Fail(ErrorCode::kIo, "cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

inline void WriteText(const std::string &path, const std::string &text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) Fail(ErrorCode::kIo, "cannot write " + path);
  f << text;
  if (!f) Fail(ErrorCode::kIo, "write failed: " + path);
}

}  // namespace gvae

#endif  // GVAE_CORE_TEXTIO_HPP_
