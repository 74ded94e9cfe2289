#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace guiforge {

/// Hex-encoded SHA-256 of the given bytes (lowercase, 64 chars).
std::string sha256_hex(std::string_view bytes);

/// First 12 hex chars of sha256_hex; used where a compact stable id is enough.
std::string short_digest(std::string_view bytes);

/// First 8 bytes of the SHA-256 as a big-endian integer. Used to derive
/// deterministic per-key choices (lexicon picks, stub scores).
std::uint64_t digest_u64(std::string_view bytes);

}  // namespace guiforge
