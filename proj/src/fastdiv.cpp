#include "mertens/fastdiv.hpp"

#include "mertens/errors.hpp"
#include "mertens/parallel.hpp"

namespace mertens {

DivisorConstants precompute_divisor(u64 d) {
    if (d == 0) throw PreconditionError("precompute_divisor: divisor must be >= 1");
    DivisorConstants c;
    c.d = d;
    const unsigned f = 63u - static_cast<unsigned>(__builtin_clzll(d));
    if ((d & (d - 1)) == 0) {
        c.scheme = DivisorConstants::Scheme::shift;
        c.s = static_cast<std::uint8_t>(f);
        return c;
    }
    const u128 num = u128{1} << (64 + f);
    u64 m = static_cast<u64>(num / d);  // < 2^64 because d > 2^f
    const u64 rem = static_cast<u64>(num % d);
    const u64 e = d - rem;
    if (e < (u64{1} << f)) {
        c.scheme = DivisorConstants::Scheme::round_up;
    } else {
        // floor(2^(65+f) / d) - 2^64, computed from the halves above
        m += m;
        const u64 twice_rem = rem + rem;
        if (twice_rem >= d || twice_rem < rem) m += 1;
        c.scheme = DivisorConstants::Scheme::add_indicator;
    }
    c.m = m + 1;
    c.s = static_cast<std::uint8_t>(f);
    return c;
}

DivisorConstants DivisorTable::entry(u64 d) const {
    if (!covers(d)) throw PreconditionError("DivisorTable: divisor outside table");
    DivisorConstants c;
    c.d = d;
    c.m = magic_[d];
    c.s = meta_[d] & 0x3F;
    c.scheme = c.m == 0 ? DivisorConstants::Scheme::shift
               : (meta_[d] & 0x40) ? DivisorConstants::Scheme::add_indicator
                                    : DivisorConstants::Scheme::round_up;
    return c;
}

DivisorTable build_table(u64 cap, u64 memory_budget) {
    if (cap < 1) throw PreconditionError("build_table: cap must be >= 1");
    const long double need = static_cast<long double>(cap + 1) * divisor_table_entry_bytes;
    if (need > static_cast<long double>(memory_budget))
        throw ResourceLimitError("build_table: " + std::to_string(cap) + " divisors exceed memory budget");
    DivisorTable t;
    t.cap_ = cap;
    t.magic_.assign(cap + 1, 0);
    t.meta_.assign(cap + 1, 0);
    constexpr u64 chunk = 1 << 16;
    parallel_for((cap + chunk) / chunk, [&](u64 c) {
        const u64 lo = std::max<u64>(1, c * chunk);
        const u64 hi = std::min(cap, c * chunk + chunk - 1);
        for (u64 d = lo; d <= hi; ++d) {
            const DivisorConstants k = precompute_divisor(d);
            t.magic_[d] = k.scheme == DivisorConstants::Scheme::shift ? 0 : k.m;
            t.meta_[d] = static_cast<std::uint8_t>(
                k.s | (k.scheme == DivisorConstants::Scheme::add_indicator ? 0x40 : 0));
        }
    });
    return t;
}

}  // namespace mertens
