#pragma once

#include <charconv>
#include <string>

namespace vcl {

/// Shortest decimal string that parses back to exactly `x`.
inline std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

}  // namespace vcl
