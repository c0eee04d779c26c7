#pragma once

// Segmented Moebius sieving.
//
// Two interchangeable strategies produce mu(y) over a block [y1, y2]:
//
//  * naive: a signed 64-bit product per cell. Every prime p <= ceil(sqrt(y2))
//    multiplies the cells of its multiples by -p and zeroes the cells of
//    multiples of p^2. A surviving cell equal to +-y has been fully factored
//    and its sign is mu(y); otherwise exactly one prime factor above the sieving
//    limit is missing and the sign is flipped.
//
//  * log-prime: an 8-bit approximate logarithm per cell. Each prime adds
//    l = floor(log2 p) | 1 (always odd, so the low bit tracks the parity of the
//    number of sieved primes) and squares set the top bit. A cell larger than
//    logprime_threshold(floor(log2 y)) is taken as fully factored. The first primes {2,3,5,7}
//    and squares {4,9} come from a precomputed wheel of period 13860.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mertens/uint128.hpp"

namespace mertens {

struct PrimeList {
    std::vector<u64> primes;  // ascending, all primes <= limit
    u64 limit = 0;
};

struct LogPrime {
    u64 p;
    std::uint8_t l;
};

struct LogPrimeTable {
    std::vector<LogPrime> entries;
    u64 limit = 0;
};

struct WheelTable {
    static constexpr u64 period = 2 * 2 * 3 * 3 * 5 * 7 * 11;  // 13860
    std::vector<std::uint8_t> residues;  // residues[r]: state of any y == r (mod period)
};

// mu over [y1, y2]. After accumulate_mertens the block also answers M(y) for
// every y it covers.
struct MoebiusBlock {
    u128 y1 = 0;
    u128 y2 = 0;
    std::vector<std::int8_t> mu;
    i64 m_start = 0;  // M(y1 - 1)
    i64 m_end = 0;    // M(y2)
    // prefix[i] = mu[0] + ... + mu[i], relative to m_start
    std::vector<std::int32_t> prefix;

    u64 size() const { return mu.size(); }
    bool has_prefix() const { return prefix.size() == mu.size(); }
    i64 mertens_at(u128 y) const { return m_start + prefix[static_cast<std::size_t>(y - y1)]; }
};

// A fully factored squarefree y with b = floor(log2 y) has a cell sum of at
// least b minus the rounding losses of its primes; a y missing one prime
// q > sqrt(y) has at most (b+1)/2 plus the rounding gains of its cofactor.
// floor(3b/4) separates the two for every b <= 89 (exhaustive for b <= 24,
// knapsack bounds on losses and gains above). floor(log2 y) - 1 does not:
// 33 = 3 * 11 sums to 4.
inline constexpr int logprime_threshold(unsigned b) { return static_cast<int>(3 * b / 4); }

inline constexpr u128 logprime_validity_bound = static_cast<u128>(1000000000000000000ull) * 1000000000ull;  // 10^27

// All primes <= limit. `memory_budget` bounds the working bitmap and output.
PrimeList generate_primes(u64 limit, u64 memory_budget = u64{1} << 32);

// floor(log2 p) | 1
inline std::uint8_t log_prime(u64 p) {
    return static_cast<std::uint8_t>((63u - static_cast<unsigned>(__builtin_clzll(p))) | 1u);
}

LogPrimeTable build_log_prime_table(const PrimeList& primes);

WheelTable build_wheel();

// Requires y1 >= 1, y1 <= y2 < 2^63 and primes.limit >= ceil(sqrt(y2)).
MoebiusBlock sieve_block_naive(u128 y1, u128 y2, const PrimeList& primes, bool parallel = true);

// Requires y1 >= 2, y2 < 10^27 and table.limit >= ceil(sqrt(y2)).
MoebiusBlock sieve_block_logprime(u128 y1, u128 y2, const LogPrimeTable& table, const WheelTable& wheel);

// Raw 8-bit accumulator cells of the log-prime sieve (before classification).
std::vector<std::uint8_t> logprime_cells(u128 y1, u128 y2, const LogPrimeTable& table, const WheelTable& wheel);

// Sets m_start/m_end and the prefix sums. m_start must be M(y1 - 1).
void accumulate_mertens(MoebiusBlock& block, i64 m_start);

// Text dump, one "y mu M" line per element (block must be accumulated).
std::string dump_block(const MoebiusBlock& block);

// Reusable sieving context for a fixed upper bound: primes, log-primes and
// the wheel. Blocks starting at y1 = 1 get mu(1) = 1 prepended.
class MoebiusSieve {
public:
    enum class Strategy { naive, logprime };

    explicit MoebiusSieve(u128 max_y, Strategy strategy = Strategy::logprime, u64 memory_budget = u64{1} << 32);

    MoebiusBlock sieve(u128 y1, u128 y2) const;
    u128 max_y() const { return max_y_; }
    Strategy strategy() const { return strategy_; }

private:
    u128 max_y_;
    Strategy strategy_;
    PrimeList primes_;
    LogPrimeTable table_;
    WheelTable wheel_;
};

}  // namespace mertens
