#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace mertens {

using u64 = std::uint64_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;
using i128 = __int128;

inline constexpr u128 u128_max = ~u128{0};

// Parses a non-negative decimal integer ("123", "1e16" and "10^16" are also
// accepted). Throws ParseError on malformed input or overflow.
u128 parse_u128(std::string_view text);

std::string to_string(u128 value);
std::string to_string(i128 value);

inline u64 high64(u128 x) { return static_cast<u64>(x >> 64); }
inline u64 low64(u128 x) { return static_cast<u64>(x); }

// floor(sqrt(x))
u64 isqrt(u128 x);

// ceil(sqrt(x))
inline u64 ceil_sqrt(u128 x) {
    u64 r = isqrt(x);
    return static_cast<u128>(r) * r == x ? r : r + 1;
}

// floor(log2(x)) for x >= 1.
inline unsigned floor_log2(u128 x) {
    u64 hi = high64(x);
    if (hi) return 127u - static_cast<unsigned>(__builtin_clzll(hi));
    return 63u - static_cast<unsigned>(__builtin_clzll(low64(x)));
}

// floor(x^(1/3))
u64 icbrt(u128 x);

}  // namespace mertens
