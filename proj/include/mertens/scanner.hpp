#pragma once

// Searches built on the exact engine and on the explicit formula:
//   * extreme_search: largest |M(n)|/sqrt(n) in a range, by exact values on a
//     refining grid, pruning gaps with a random-walk crossing estimate and
//     sweeping the remaining gaps with the sieve;
//   * threshold_scan: flags grid points of ln x where a few-term head of q is
//     large, reusing head values across near-periods, then evaluates many
//     terms only at flagged points;
//   * record and histogram reducers over q streams.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mertens/bitmap.hpp"
#include "mertens/engine.hpp"
#include "mertens/uint128.hpp"
#include "mertens/zeros.hpp"

namespace mertens {

// Share of squarefree integers; the variance per step of M as a random walk.
inline constexpr double squarefree_density = 0.60792710185402662866;  // 6/pi^2

struct GridPoint {
    u128 n = 0;
    i64 m = 0;
    double ratio = 0;  // m / sqrt(n)
};

struct GridResult {
    std::vector<GridPoint> points;  // ascending n
};

// Exact M at every n (any order, duplicates allowed); one shared sieve pass.
GridResult exact_grid(std::vector<u128> ns, const EngineConfig& cfg = {});

struct CrossingQuery {
    u128 a = 0, b = 0;
    i64 ma = 0, mb = 0;
    i64 m0 = 0;
    double sigma = squarefree_density;
};

// Estimate for a walk pinned at M(a) and M(b) to reach M0 in between:
//   exp(-(Ma - M0)(Mb - M0) / (2 sigma (b - a))),
// for M0 above both endpoints (negate all three for a downward query).
// Throws PreconditionError outside that regime.
double crossing_probability(const CrossingQuery& q);

// Exact large-gap limit for a pinned walk (Brownian bridge):
//   exp(-2 (M0 - Ma)(M0 - Mb) / (sigma (b - a))).
// Always at most crossing_probability.
double bridge_crossing_probability(const CrossingQuery& q);

// 1 - prod(1 - p_i) over adjacent grid pairs, with M0 = ratio0 sqrt(g) at the
// geometric mean g of each pair; ratio0 < 0 asks about downward excursions.
// A pair already at or past M0 counts as p = 1.
double aggregate_extreme_probability(const GridResult& grid, double ratio0);

struct ExtremeSearchConfig {
    std::uint64_t initial_grid = 64;
    double refine_threshold = 0.05;
    std::uint64_t sieve_gap_ceiling = std::uint64_t{1} << 24;
    std::uint64_t subdivide = 8;  // new points per refined gap, minus one
    int sign = 0;                 // 0: largest |ratio|, +1: largest, -1: smallest
    EngineConfig engine;
};

struct ExtremeResult {
    GridPoint best;
    GridResult grid;                   // every exactly evaluated grid point
    std::uint64_t exact_evaluations = 0;
    std::uint64_t swept = 0;           // integers covered by sieve sweeps
    std::uint64_t rounds = 0;
    double residual_probability = 0;   // aggregate over gaps neither swept nor refined
    std::string caveat;
};

ExtremeResult extreme_search(u128 n_lo, u128 n_hi, const ExtremeSearchConfig& cfg = {});

struct ScanConfig {
    std::string ln_start = "0";
    double step = 0;
    std::uint64_t count = 0;
    std::size_t n_a = 4;       // head split: terms [0, n_a) and [n_a, n_b)
    std::size_t n_b = 7;
    double t_head = 0.425;
    std::size_t n_full = 0;    // 0: whole table
    double t_full = 0.9;
    // Near-period multipliers m (period m 2pi / z_1) for the two head parts;
    // 0 disables reuse. The period must be a whole number of steps.
    std::uint64_t m_a = 0;
    std::uint64_t m_b = 0;
    double margin_budget = 0.05;     // re-anchor once the drift bound passes this
    std::uint64_t max_cache = std::uint64_t{1} << 24;  // longest period kept, in steps
    std::uint64_t chunk = std::uint64_t{1} << 20;      // points per rebased frame
};

struct ScanHit {
    std::uint64_t index = 0;
    std::string ln_x;
    double q_head = 0;
    double q_full = 0;
};

struct ScanStats {
    std::uint64_t points = 0;
    std::uint64_t reused = 0;        // points with at least one head part from a previous period
    std::uint64_t head_direct = 0;   // points whose head was computed from scratch
    std::uint64_t flagged = 0;
    std::uint64_t full_evaluations = 0;
    std::uint64_t reanchors = 0;
    std::uint64_t period_a = 0, period_b = 0;  // in steps, 0 when unused
};

struct ScanResult {
    FlagBitmap flags;  // |q_{n_b}| >= t_head, exactly as direct evaluation decides
    std::vector<ScanHit> hits;  // flagged points with |q_{n_full}| >= t_full
    ScanStats stats;
};

ScanResult threshold_scan(const ZeroTable& table, const ScanConfig& cfg);

struct Record {
    std::string ln_x;
    double q = 0;
};

struct Records {
    std::vector<Record> positive;  // strictly increasing q
    std::vector<Record> negative;  // strictly decreasing q
};

// Stream ordered by ln x. A value >= 0 is a record when it beats every earlier
// positive record, a negative value when it is below every earlier one.
Records running_extremes(const std::vector<std::pair<std::string, double>>& stream);

struct Histogram {
    std::vector<double> edges;
    std::vector<std::uint64_t> positive, negative;  // counts of |q| in (edges[i], edges[i+1]]
    std::uint64_t below = 0, above = 0;             // |q| outside (edges.front(), edges.back()]
};

Histogram tail_histogram(const std::vector<double>& values, const std::vector<double>& edges);

}  // namespace mertens
