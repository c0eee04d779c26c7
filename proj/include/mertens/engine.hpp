#pragma once

// Exact M(n) through the identity  sum_{x=1}^{v} M(floor(v/x)) = 1.
//
// One pass sieves y = 1..u in ascending blocks. Every array element k
// (1 <= k <= K = floor(n/u)) stands for the target v_k = floor(n/k) >= u and
// absorbs, as the blocks stream past,
//   * the direct terms  -M(floor(v_k/x))  for floor(K/k) < x <= floor(v_k/t_k),
//     whose quotients lie in [t_k, u), and
//   * the grouped terms -(floor(v_k/y) - floor(v_k/(y+1))) M(y)  for y < t_k,
//     which collect every x > floor(v_k/t_k) by the value of its quotient.
// The remaining terms x <= floor(K/k) are other array elements and are
// resolved by finalize() in descending-target order. As a by-product every
// M(floor(n/c)), c <= K, is exact after one run.
//
// Accumulators are unsigned and wrap modulo 2^64: partial sums can exceed the
// signed range long before the final values (which are tiny) are reached.

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mertens/fastdiv.hpp"
#include "mertens/sieve.hpp"
#include "mertens/uint128.hpp"

namespace mertens {

struct RegionConfig {
    double c1 = 2.0;   // dense region:  y <  c1 sqrt(n/x)
    double c2 = 20.0;  // semi-dense:    y <  c2 sqrt(n/x)
    double c3 = 2.0;   // sparse tail:   y >  c3 sqrt(n)
    void validate() const;
};

enum class Region : int { r1 = 1, r2 = 2, r3 = 3, r4 = 4 };

// Half-open boundaries; a y exactly on a boundary goes to the higher region.
Region classify_region(u64 x, u128 y, u128 n, const RegionConfig& cfg);

struct EngineConfig {
    double u_alpha = 1.0;
    u64 u = 0;            // 0: choose_u
    u64 block_len = 0;    // 0: max(ceil(sqrt(u)), 2^22), capped at u
    RegionConfig regions;
    u64 memory_budget = u64{2} << 30;
    u64 divisor_cap = u64{1} << 26;
    u64 sparse_block_factor = 4;  // block_len >= factor * sqrt(u) once only sparse work remains
    MoebiusSieve::Strategy sieve = MoebiusSieve::Strategy::logprime;
    // record M(floor(n/c)) for c > K as well (values below u); single target only
    bool capture_small_quotients = false;
    std::string checkpoint_path;   // empty: no checkpointing
    double checkpoint_seconds = 60.0;
};

// Bytes held per array element (target, split, accumulator, cursor state).
inline constexpr u64 harmonic_element_bytes = 56;

// u with ceil(sqrt(n)) < u <= n, near alpha (n N)^(2/3), raised so that the
// N arrays of floor(n/u) elements fit half of mem_budget.
u64 choose_u(u128 n, u64 num_targets, u64 mem_budget, double alpha = 1.0);

struct ApplyStats {
    u64 dense_terms = 0;  // grouped-walk (y, k) pairs
    u64 jump_terms = 0;   // direct x-enumeration hits
};

class HarmonicArray {
public:
    HarmonicArray(u128 n, u64 u, const RegionConfig& cfg = {});

    u128 n() const { return n_; }
    u64 u() const { return u_; }
    u64 size() const { return size_; }
    u128 target(u64 k) const { return v_[k]; }
    u64 split_point(u64 k) const { return t_[k]; }
    u64 max_split_point() const { return size_ ? t_[1] : 0; }
    u128 next_y() const { return next_y_; }
    bool finalized() const { return finalized_; }

    // Blocks must arrive in ascending order, each exactly once, starting at 1,
    // and carry prefix sums (accumulate_mertens).
    ApplyStats apply_block(const MoebiusBlock& block, const DivisorTable& table, const RegionConfig& cfg);

    // Requires every y in [1, u] to have been applied.
    void finalize();

    // M(floor(n/k)) for 1 <= k <= size(), after finalize().
    i64 value(u64 k) const;
    std::vector<i64> values() const;

    const std::vector<u64>& raw_accumulators() const { return acc_; }
    // Resume from a checkpoint taken before block starting at next_y.
    void restore(u128 next_y, std::vector<u64> acc);

private:
    void reset_cursors();

    u128 n_;
    u64 u_;
    u64 size_;
    u128 next_y_ = 1;
    bool finalized_ = false;
    std::vector<u128> v_;    // index k, entry 0 unused
    std::vector<u64> t_;
    std::vector<u64> x_lo_;  // first x of the direct range
    std::vector<u64> acc_;
    std::vector<u64> cur_x_;  // next (largest unprocessed) direct x
    std::vector<u64> cur_q_;  // floor(v_k / cur_x_)
};

struct EngineStats {
    u64 blocks = 0;
    u64 sieved = 0;
    ApplyStats terms;
    u64 divisor_cap = 0;
    bool sparse_mode_reached = false;
    double seconds = 0;
};

struct MertensResult {
    u128 n = 0;
    i64 value = 0;
    u64 u = 0;
    u64 block_len = 0;
    std::vector<i64> by_index;  // by_index[k-1] = M(floor(n/k)), k <= K
    std::vector<std::pair<u64, i64>> small_values;  // ascending (y, M(y)) for y = floor(n/c) < u, if captured
    EngineStats stats;

    // M(floor(n/c)) if known from this run.
    std::optional<i64> at_quotient(u128 c) const;
};

MertensResult mertens_exact(u128 n, const EngineConfig& cfg = {});

// Several targets sharing one sieve pass; u scales with the number of targets.
std::vector<MertensResult> mertens_many(const std::vector<u128>& ns, const EngineConfig& cfg = {});

inline constexpr u64 naive_default_ceiling = 10000000000ull;  // 10^10

// Verification oracle: M(n) by streaming the naive (64-bit product) sieve.
i64 mertens_naive(u64 n, u64 ceiling = naive_default_ceiling);

// M at each of the given points from a single naive pass (any order).
std::vector<i64> mertens_naive_many(const std::vector<u64>& ns, u64 ceiling = naive_default_ceiling);

}  // namespace mertens
