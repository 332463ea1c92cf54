#ifndef JOINTPROF_SHA256_HPP
#define JOINTPROF_SHA256_HPP

#include <string>
#include <string_view>

namespace jointprof {

// Hex digest of the SHA-256 of `data`; used for input digests in run
// manifests.
std::string sha256_hex(std::string_view data);

}  // namespace jointprof

#endif  // JOINTPROF_SHA256_HPP
