#include "mertens/sieve.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <sstream>

#include "mertens/errors.hpp"
#include "mertens/parallel.hpp"

namespace mertens {

namespace {

constexpr u64 chunk_len = u64{1} << 18;

inline u64 first_offset(u128 y1, u64 p) {
    u64 r = static_cast<u64>(y1 % p);
    return r == 0 ? 0 : p - r;
}

inline std::int8_t sign_of(i64 v) { return static_cast<std::int8_t>((v > 0) - (v < 0)); }

// Cells of the log-prime sieve over [y1, y2] before classification.
void logprime_fill(u128 y1, u128 y2, const LogPrimeTable& table, const WheelTable& wheel, std::uint8_t* cells) {
    const u64 len = static_cast<u64>(y2 - y1) + 1;
    const u64 period = WheelTable::period;
    u64 phase = static_cast<u64>(y1 % period);
    for (u64 done = 0; done < len;) {
        u64 take = std::min(len - done, period - phase);
        std::memcpy(cells + done, wheel.residues.data() + phase, take);
        done += take;
        phase = 0;
    }

    const u64 limit = ceil_sqrt(y2);
    for (const LogPrime& lp : table.entries) {
        const u64 p = lp.p;
        if (p > limit) break;
        if (p > 7) {
            const std::uint8_t l = lp.l;
            for (u64 j = first_offset(y1, p); j < len; j += p) cells[j] = static_cast<std::uint8_t>(cells[j] + l);
        }
        if (p > 3) {
            const u128 pp128 = static_cast<u128>(p) * p;
            if (pp128 > y2) continue;
            const u64 pp = static_cast<u64>(pp128);
            for (u64 j = first_offset(y1, pp); j < len; j += pp) cells[j] |= 0x80;
        }
    }
}

void logprime_classify(u128 y1, u64 len, const std::uint8_t* cells, std::int8_t* mu) {
    u64 i = 0;
    while (i < len) {
        const u128 y = y1 + i;
        const unsigned lg = floor_log2(y);
        // the threshold is constant until the next power of two
        const u128 next_pow = lg >= 127 ? u128_max : (u128{1} << (lg + 1));
        const u64 run_end = static_cast<u64>(std::min<u128>(static_cast<u128>(len), next_pow - y1));
        const int threshold = logprime_threshold(lg);
        for (; i < run_end; ++i) {
            const std::uint8_t a = cells[i];
            const int odd = a & 1;
            if (a & 0x80) {
                mu[i] = 0;
            } else if (static_cast<int>(a) > threshold) {
                mu[i] = static_cast<std::int8_t>(1 - 2 * odd);
            } else {
                mu[i] = static_cast<std::int8_t>(-1 + 2 * odd);
            }
        }
    }
}

void naive_range(u64 y1, u64 y2, const PrimeList& primes, std::int8_t* mu) {
    const u64 len = y2 - y1 + 1;
    std::vector<i64> acc(len, 1);
    const u64 limit = ceil_sqrt(y2);
    for (u64 p : primes.primes) {
        if (p > limit) break;
        const i64 neg = -static_cast<i64>(p);
        for (u64 j = first_offset(y1, p); j < len; j += p) acc[j] *= neg;
        const u128 pp128 = static_cast<u128>(p) * p;
        if (pp128 > y2) continue;
        const u64 pp = static_cast<u64>(pp128);
        for (u64 j = first_offset(y1, pp); j < len; j += pp) acc[j] = 0;
    }
    for (u64 j = 0; j < len; ++j) {
        const i64 a = acc[j];
        if (a == 0) {
            mu[j] = 0;
        } else if (static_cast<u64>(a < 0 ? -a : a) == y1 + j) {
            mu[j] = sign_of(a);
        } else {
            mu[j] = static_cast<std::int8_t>(-sign_of(a));
        }
    }
}

}  // namespace

PrimeList generate_primes(u64 limit, u64 memory_budget) {
    if (limit < 2) throw PreconditionError("generate_primes: limit must be >= 2");
    // odd-only bitmap plus a generous estimate of the output list
    const long double est_count = 1.3L * limit / std::max(1.0L, std::log(static_cast<long double>(limit))) + 16;
    const long double need = limit / 2.0L + est_count * 8.0L;
    if (need > static_cast<long double>(memory_budget))
        throw ResourceLimitError("generate_primes: limit " + std::to_string(limit) + " exceeds memory budget");

    PrimeList out;
    out.limit = limit;
    out.primes.reserve(static_cast<std::size_t>(est_count));
    out.primes.push_back(2);
    const u64 half = (limit - 1) / 2;  // index i <-> 2i + 1, i in [1, half]
    std::vector<std::uint8_t> composite(half + 1, 0);
    for (u64 i = 1; i <= half; ++i) {
        if (composite[i]) continue;
        const u64 p = 2 * i + 1;
        out.primes.push_back(p);
        const u128 sq = static_cast<u128>(p) * p;
        if (sq > limit) continue;
        for (u64 j = static_cast<u64>(sq) / 2; j <= half; j += p) composite[j] = 1;
    }
    return out;
}

LogPrimeTable build_log_prime_table(const PrimeList& primes) {
    LogPrimeTable t;
    t.limit = primes.limit;
    t.entries.reserve(primes.primes.size());
    for (u64 p : primes.primes) t.entries.push_back({p, log_prime(p)});
    return t;
}

WheelTable build_wheel() {
    WheelTable w;
    w.residues.assign(WheelTable::period, 0);
    for (u64 p : {2u, 3u, 5u, 7u}) {
        const std::uint8_t l = log_prime(p);
        for (u64 r = 0; r < WheelTable::period; r += p) w.residues[r] = static_cast<std::uint8_t>(w.residues[r] + l);
    }
    for (u64 sq : {4u, 9u})
        for (u64 r = 0; r < WheelTable::period; r += sq) w.residues[r] |= 0x80;
    return w;
}

MoebiusBlock sieve_block_naive(u128 y1, u128 y2, const PrimeList& primes, bool parallel) {
    if (y1 < 1 || y2 < y1) throw PreconditionError("sieve_block_naive: need 1 <= y1 <= y2");
    if (y2 >= (u128{1} << 63)) throw PreconditionError("sieve_block_naive: y2 must be below 2^63");
    if (primes.limit < ceil_sqrt(y2)) throw PreconditionError("sieve_block_naive: prime list does not reach ceil(sqrt(y2))");

    MoebiusBlock block;
    block.y1 = y1;
    block.y2 = y2;
    const u64 len = static_cast<u64>(y2 - y1) + 1;
    block.mu.resize(len);
    const u64 lo = static_cast<u64>(y1);
    if (!parallel) {
        naive_range(lo, lo + len - 1, primes, block.mu.data());
        return block;
    }
    const u64 nchunks = (len + chunk_len - 1) / chunk_len;
    parallel_for(nchunks, [&](u64 c) {
        const u64 a = lo + c * chunk_len;
        const u64 b = std::min(lo + len - 1, a + chunk_len - 1);
        naive_range(a, b, primes, block.mu.data() + (a - lo));
    });
    return block;
}

std::vector<std::uint8_t> logprime_cells(u128 y1, u128 y2, const LogPrimeTable& table, const WheelTable& wheel) {
    std::vector<std::uint8_t> cells(static_cast<std::size_t>(y2 - y1) + 1);
    logprime_fill(y1, y2, table, wheel, cells.data());
    return cells;
}

MoebiusBlock sieve_block_logprime(u128 y1, u128 y2, const LogPrimeTable& table, const WheelTable& wheel) {
    if (y1 < 2 || y2 < y1) throw PreconditionError("sieve_block_logprime: need 2 <= y1 <= y2");
    if (y2 >= logprime_validity_bound) throw PrecisionError("sieve_block_logprime: y2 must be below 10^27");
    if (table.limit < ceil_sqrt(y2))
        throw PreconditionError("sieve_block_logprime: log-prime table does not reach ceil(sqrt(y2))");
    if (wheel.residues.size() != WheelTable::period) throw PreconditionError("sieve_block_logprime: wheel not built");

    MoebiusBlock block;
    block.y1 = y1;
    block.y2 = y2;
    const u64 len = static_cast<u64>(y2 - y1) + 1;
    block.mu.resize(len);
    const u64 nchunks = (len + chunk_len - 1) / chunk_len;
    parallel_for(nchunks, [&](u64 c) {
        const u64 off = c * chunk_len;
        const u64 n = std::min(len - off, chunk_len);
        std::vector<std::uint8_t> cells(n);
        logprime_fill(y1 + off, y1 + off + n - 1, table, wheel, cells.data());
        logprime_classify(y1 + off, n, cells.data(), block.mu.data() + off);
    });
    return block;
}

void accumulate_mertens(MoebiusBlock& block, i64 m_start) {
    if (block.mu.size() >= (u64{1} << 31)) throw PreconditionError("accumulate_mertens: block too long for 32-bit prefix");
    block.m_start = m_start;
    block.prefix.resize(block.mu.size());
    std::int32_t run = 0;
    for (std::size_t i = 0; i < block.mu.size(); ++i) {
        run += block.mu[i];
        block.prefix[i] = run;
    }
    block.m_end = m_start + run;
}

std::string dump_block(const MoebiusBlock& block) {
    std::ostringstream os;
    for (std::size_t i = 0; i < block.mu.size(); ++i) {
        os << to_string(block.y1 + i) << ' ' << static_cast<int>(block.mu[i]);
        if (block.has_prefix()) os << ' ' << block.m_start + block.prefix[i];
        os << '\n';
    }
    return os.str();
}

MoebiusSieve::MoebiusSieve(u128 max_y, Strategy strategy, u64 memory_budget) : max_y_(max_y), strategy_(strategy) {
    if (strategy == Strategy::naive && max_y >= (u128{1} << 63))
        throw PreconditionError("naive sieve is limited to y < 2^63");
    if (strategy == Strategy::logprime && max_y >= logprime_validity_bound)
        throw PrecisionError("log-prime sieve is limited to y < 10^27");
    primes_ = generate_primes(std::max<u64>(2, ceil_sqrt(max_y)), memory_budget);
    if (strategy == Strategy::logprime) {
        table_ = build_log_prime_table(primes_);
        wheel_ = build_wheel();
    }
}

MoebiusBlock MoebiusSieve::sieve(u128 y1, u128 y2) const {
    if (y2 > max_y_) throw PreconditionError("MoebiusSieve: block beyond configured maximum");
    if (strategy_ == Strategy::naive || y1 >= 2) {
        return strategy_ == Strategy::naive ? sieve_block_naive(y1, y2, primes_)
                                            : sieve_block_logprime(y1, y2, table_, wheel_);
    }
    // mu(1) = 1 is special-cased ahead of the log-prime classification
    MoebiusBlock block;
    if (y2 >= 2) block = sieve_block_logprime(2, y2, table_, wheel_);
    block.y1 = y1;
    block.y2 = y2;
    block.mu.insert(block.mu.begin(), std::int8_t{1});
    return block;
}

}  // namespace mertens
