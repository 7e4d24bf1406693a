#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace cslab {

/// Shortest-safe round-trip text for a double: printf "%.17g". Non-finite
/// values print as "nan", "inf", "-inf".
std::string fmt17(double value);

/// 64-bit FNV-1a, used for config hashes in run manifests.
std::uint64_t fnv1a64(std::string_view bytes) noexcept;

std::string hex64(std::uint64_t value);

}  // namespace cslab
