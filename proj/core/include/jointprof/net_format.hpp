#ifndef JOINTPROF_NET_FORMAT_HPP
#define JOINTPROF_NET_FORMAT_HPP

#include <string>

#include "jointprof/network.hpp"

namespace jointprof {

// Native JSON document:
//   {"format": "jointprof-net", "version": 1, "name": "...",
//    "variables": [{"name", "outcomes": [...], "parents": [...],
//                   "cpt": [[...], ...]}, ...]}
// cpt lists one column per parent configuration, configuration j in
// mixed-radix order over the parent list (last parent fastest). Variables
// must already be in topological order (parents declared first).
// Throws ParseError with positioned diagnostics.
Network parse_native(const std::string& text);

// Round-trip-safe serialization: parse_native(write_native(net)) rebuilds
// an identical network, every probability bit-exact.
std::string write_native(const Network& net);

// Classic BIF dialect subset: `network`, discrete `variable` blocks,
// `probability` blocks with `table` rows or per-parent-configuration rows,
// `property` strings kept as opaque annotations. Declaration order need not
// be topological; the parser sorts and rejects cycles. Continuous variables
// and any construct outside the documented grammar are unsupported errors.
Network parse_bif(const std::string& text);

// Loads a file, dispatching on extension: .bif uses parse_bif, anything
// else the native parser.
Network load_network(const std::string& path);

}  // namespace jointprof

#endif  // JOINTPROF_NET_FORMAT_HPP
