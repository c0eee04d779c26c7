#pragma once

// Resume state for long single-target runs.
//
// Byte layout, all integers little-endian regardless of host:
//   offset  size  field
//   0       8     magic "MERTCKPT"
//   8       4     version (1)
//   12      4     reserved, zero
//   16      16    n (low 64 bits, then high 64 bits)
//   32      8     u
//   40      8     next_y1 (first y not yet applied)
//   48      8     M(next_y1 - 1), two's complement
//   56      8     K, number of accumulators
//   64      8*K   accumulators for k = 1..K (modulo 2^64)

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "mertens/uint128.hpp"

namespace mertens {

struct Checkpoint {
    u128 n = 0;
    u64 u = 0;
    u64 next_y1 = 1;
    i64 m_prev = 0;
    std::vector<u64> acc;
};

inline constexpr std::string_view checkpoint_magic = "MERTCKPT";
inline constexpr std::uint32_t checkpoint_version = 1;

std::string encode_checkpoint(const Checkpoint& cp);
Checkpoint decode_checkpoint(std::string_view bytes);

// Writes to a temporary sibling and renames it into place.
void write_checkpoint(const std::string& path, const Checkpoint& cp);
Checkpoint read_checkpoint(const std::string& path);

}  // namespace mertens
