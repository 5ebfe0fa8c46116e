#pragma once

#include <charconv>
#include <cstdint>
#include <string>

namespace tfim {

// Shortest decimal representation that round-trips the double exactly.
// Locale-independent by construction.
inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::string format_int(std::int64_t v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace tfim
