#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace fogsim {

using Digest = std::array<uint8_t, 32>;

// SHA-256 (FIPS 180-4).
Digest sha256(std::span<const uint8_t> data);
Digest sha256(std::string_view data);

std::string to_hex(const Digest& d);
Digest digest_from_hex(std::string_view hex);

// Leading zero bits of the digest, big-endian byte order; range [0, 256].
int leading_zero_bits(const Digest& d);

}  // namespace fogsim
