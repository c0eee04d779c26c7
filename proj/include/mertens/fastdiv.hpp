#pragma once

// Division of 64-bit numerators by a run-time invariant divisor using a
// precomputed multiply / add / shift sequence.
//
// For d = 2^k the quotient is a plain shift. Otherwise, with f = floor(log2 d),
// the multiplier m = floor(2^(64+f) / d) + 1 is used directly when the rounding
// error e = d - 2^(64+f) mod d is below 2^f ("round-up" scheme):
//     q = mulhi(m, n) >> f
// and otherwise a 65-bit multiplier is emulated with the "add-indicator" scheme:
//     t = mulhi(m, n);  q = (((n - t) >> 1) + t) >> f
// with m = floor(2^(65+f) / d) + 1 - 2^64.

#include <cstdint>
#include <vector>

#include "mertens/uint128.hpp"

namespace mertens {

struct DivisorConstants {
    enum class Scheme : std::uint8_t { shift, round_up, add_indicator };

    u64 d = 1;
    u64 m = 0;
    std::uint8_t s = 0;
    Scheme scheme = Scheme::shift;
};

DivisorConstants precompute_divisor(u64 d);

inline u64 mulhi64(u64 a, u64 b) { return static_cast<u64>((static_cast<u128>(a) * b) >> 64); }

inline u64 fast_div(u64 n, const DivisorConstants& c) {
    switch (c.scheme) {
        case DivisorConstants::Scheme::shift:
            return n >> c.s;
        case DivisorConstants::Scheme::round_up:
            return mulhi64(c.m, n) >> c.s;
        case DivisorConstants::Scheme::add_indicator:
        default: {
            const u64 t = mulhi64(c.m, n);
            return (((n - t) >> 1) + t) >> c.s;
        }
    }
}

// Constants for every divisor 1..cap, stored structure-of-arrays: the
// multiplier and a packed byte (shift in the low 6 bits, add flag in bit 6,
// zero multiplier meaning pure shift).
class DivisorTable {
public:
    DivisorTable() = default;
    u64 cap() const { return cap_; }
    bool covers(u64 d) const { return d >= 1 && d <= cap_; }
    std::size_t memory_bytes() const { return magic_.size() * sizeof(u64) + meta_.size(); }

    DivisorConstants entry(u64 d) const;

    // floor(n / d); native division when d is outside the table.
    u64 divide(u64 n, u64 d) const {
        if (d > cap_) return n / d;
        const u64 m = magic_[d];
        const std::uint8_t meta = meta_[d];
        const unsigned s = meta & 0x3F;
        if (m == 0) return n >> s;
        const u64 t = mulhi64(m, n);
        if (meta & 0x40) return (((n - t) >> 1) + t) >> s;
        return t >> s;
    }

    // floor(v / d) for a 128-bit numerator: the 64-bit fast path when v fits,
    // native wide division otherwise.
    u128 divide(u128 v, u64 d) const {
        if (high64(v) == 0) return divide(low64(v), d);
        return v / d;
    }

    void release() {
        magic_.clear();
        magic_.shrink_to_fit();
        meta_.clear();
        meta_.shrink_to_fit();
        cap_ = 0;
    }

private:
    friend DivisorTable build_table(u64 cap, u64 memory_budget);
    u64 cap_ = 0;
    std::vector<u64> magic_;          // index d, entry 0 unused
    std::vector<std::uint8_t> meta_;
};

inline constexpr u64 divisor_table_entry_bytes = sizeof(u64) + 1;

// Throws ResourceLimitError when cap entries do not fit the budget.
DivisorTable build_table(u64 cap, u64 memory_budget = u64{1} << 32);

}  // namespace mertens
