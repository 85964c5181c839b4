#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace cateval {

/// 64-bit FNV-1a. Used for source digests and config fingerprints; stable
/// across platforms and runs, not cryptographic.
std::uint64_t fnv1a64(std::string_view data);

/// Hex form of fnv1a64, fixed 16 lowercase digits.
std::string digest_hex(std::string_view data);

}  // namespace cateval
