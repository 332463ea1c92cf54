#ifndef JOINTPROF_VERSION_HPP
#define JOINTPROF_VERSION_HPP

namespace jointprof {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace jointprof

#endif  // JOINTPROF_VERSION_HPP
