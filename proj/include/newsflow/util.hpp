#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace newsflow {

/// Shortest decimal rendering that parses back to the same double.
/// Used by every CSV/JSON writer so repeated runs are byte-identical.
std::string format_double(double v);

/// FNV-1a 64-bit; stable content hash for config hashing and report bundles.
std::uint64_t fnv1a64(std::string_view bytes);
std::string to_hex(std::uint64_t v);

std::string lower_ascii(std::string_view s);
std::string_view trim(std::string_view s);

}  // namespace newsflow
