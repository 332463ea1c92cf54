#ifndef JOINTPROF_SRC_TEXT_UTIL_HPP
#define JOINTPROF_SRC_TEXT_UTIL_HPP

#include <charconv>
#include <cmath>
#include <string>

namespace jointprof {

// Shortest decimal form that parses back to the same double.
inline std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace jointprof

#endif  // JOINTPROF_SRC_TEXT_UTIL_HPP
