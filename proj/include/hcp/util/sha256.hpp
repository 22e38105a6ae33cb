#pragma once

#include <string>
#include <string_view>

namespace hcp::util {

/// Lowercase hex SHA-256 digest of `data`.
std::string sha256_hex(std::string_view data);

/// Stable 64-bit FNV-1a hash, used wherever a platform-independent
/// deterministic hash is needed (per-record seeds, shuffles).
uint64_t fnv1a64(std::string_view data);

}  // namespace hcp::util
