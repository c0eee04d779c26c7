#include "mertens/scanner.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <optional>

#include "mertens/errors.hpp"
#include "mertens/explicit_formula.hpp"

namespace mertens {

namespace {

double to_double(u128 x) { return static_cast<double>(x); }

GridPoint make_point(u128 n, i64 m) { return {n, m, static_cast<double>(m) / std::sqrt(to_double(n))}; }

// Upward excursion of a pinned walk in real-valued levels; d1, d2 > 0.
double walk_estimate(double d1, double d2, double gap, double sigma) {
    return std::clamp(std::exp(-d1 * d2 / (2 * sigma * gap)), 0.0, 1.0);
}

void check_query(const CrossingQuery& q) {
    if (q.b <= q.a) throw PreconditionError("crossing query needs b > a");
    if (!(q.sigma > 0)) throw PreconditionError("crossing query needs sigma > 0");
    const bool up = q.m0 > std::max(q.ma, q.mb);
    const bool down = q.m0 < std::min(q.ma, q.mb);
    if (!up && !down) throw PreconditionError("M0 must lie strictly above or strictly below both endpoint values");
}

}  // namespace

GridResult exact_grid(std::vector<u128> ns, const EngineConfig& cfg) {
    std::sort(ns.begin(), ns.end());
    ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
    if (!ns.empty() && ns.front() == 0) throw PreconditionError("grid points must be positive");
    GridResult grid;
    if (ns.empty()) return grid;
    const auto results = mertens_many(ns, cfg);
    for (std::size_t i = 0; i < ns.size(); ++i) grid.points.push_back(make_point(ns[i], results[i].value));
    return grid;
}

double crossing_probability(const CrossingQuery& q) {
    check_query(q);
    const double d1 = std::fabs(static_cast<double>(q.m0 - q.ma));
    const double d2 = std::fabs(static_cast<double>(q.m0 - q.mb));
    return walk_estimate(d1, d2, to_double(q.b - q.a), q.sigma);
}

double bridge_crossing_probability(const CrossingQuery& q) {
    check_query(q);
    const double d1 = std::fabs(static_cast<double>(q.m0 - q.ma));
    const double d2 = std::fabs(static_cast<double>(q.m0 - q.mb));
    return std::clamp(std::exp(-2 * d1 * d2 / (q.sigma * to_double(q.b - q.a))), 0.0, 1.0);
}

double aggregate_extreme_probability(const GridResult& grid, double ratio0) {
    if (grid.points.size() < 2) throw PreconditionError("aggregate probability needs at least two grid points");
    const double dir = ratio0 < 0 ? -1.0 : 1.0;
    double miss = 1.0;
    for (std::size_t i = 0; i + 1 < grid.points.size(); ++i) {
        const GridPoint& p = grid.points[i];
        const GridPoint& r = grid.points[i + 1];
        if (r.n <= p.n) throw PreconditionError("grid points must be strictly increasing");
        const double level = std::fabs(ratio0) * std::sqrt(std::sqrt(to_double(p.n)) * std::sqrt(to_double(r.n)));
        const double d1 = level - dir * static_cast<double>(p.m);
        const double d2 = level - dir * static_cast<double>(r.m);
        const double prob = (d1 <= 0 || d2 <= 0) ? 1.0 : walk_estimate(d1, d2, to_double(r.n - p.n), squarefree_density);
        miss *= 1.0 - prob;
    }
    return 1.0 - miss;
}

namespace {

class ExtremeSearch {
public:
    ExtremeSearch(u128 n_lo, u128 n_hi, const ExtremeSearchConfig& cfg) : lo_(n_lo), hi_(n_hi), cfg_(cfg) {}

    ExtremeResult run() {
        std::vector<u128> first{lo_, hi_};
        const u128 span = hi_ - lo_;
        const u64 g = std::max<u64>(cfg_.initial_grid, 2);
        for (u64 i = 1; i + 1 < g; ++i) first.push_back(lo_ + span * i / (g - 1));
        evaluate(first);

        std::vector<std::pair<u128, u128>> pending;
        for (auto it = known_.begin(); std::next(it) != known_.end(); ++it) pending.push_back({it->first, std::next(it)->first});
        std::vector<std::pair<u128, u128>> dropped;

        while (!pending.empty()) {
            ++result_.rounds;
            std::vector<std::pair<u128, u128>> sweep, refine;
            for (const auto& gap : pending) {
                if (gap.second - gap.first <= 1) continue;
                if (gap_probability(gap.first, gap.second) <= cfg_.refine_threshold) {
                    dropped.push_back(gap);
                } else if (gap.second - gap.first <= cfg_.sieve_gap_ceiling) {
                    sweep.push_back(gap);
                } else {
                    refine.push_back(gap);
                }
            }
            for (const auto& gap : sweep) sweep_gap(gap.first, gap.second);

            std::vector<u128> next;
            const u64 parts = std::max<u64>(cfg_.subdivide, 1) + 1;
            for (const auto& [a, b] : refine)
                for (u64 i = 1; i < parts; ++i) next.push_back(a + (b - a) * i / parts);
            evaluate(next);
            pending.clear();
            for (const auto& [a, b] : refine) {
                auto it = known_.find(a);
                for (; it->first != b; ++it) pending.push_back({it->first, std::next(it)->first});
            }
        }

        double miss = 1.0;
        for (const auto& [a, b] : dropped) miss *= 1.0 - gap_probability(a, b);
        result_.residual_probability = 1.0 - miss;
        for (const auto& [n, m] : known_) result_.grid.points.push_back(make_point(n, m));
        result_.best = best_;
        result_.caveat =
            "gap probabilities model M as a lazy random walk with step variance 6/pi^2; M(n)/sqrt(n) is observed "
            "to spread far less (about 0.11), so the walk model overstates excursions";
        return std::move(result_);
    }

private:
    double score(i64 m, u128 n) const {
        const double r = static_cast<double>(m) / std::sqrt(to_double(n));
        return cfg_.sign == 0 ? std::fabs(r) : cfg_.sign * r;
    }

    void consider(u128 n, i64 m) {
        if (!have_best_ || score(m, n) > score(best_.m, best_.n)) {
            best_ = make_point(n, m);
            have_best_ = true;
        }
    }

    void evaluate(std::vector<u128> ns) {
        std::erase_if(ns, [&](u128 n) { return known_.count(n) != 0; });
        if (ns.empty()) return;
        const GridResult g = exact_grid(ns, cfg_.engine);
        result_.exact_evaluations += g.points.size();
        for (const GridPoint& p : g.points) {
            known_[p.n] = p.m;
            consider(p.n, p.m);
        }
    }

    // Chance that (a, b) holds a better score than the current best.
    double gap_probability(u128 a, u128 b) const {
        const double target = score(best_.m, best_.n);
        const double level = target * std::sqrt(std::sqrt(to_double(a)) * std::sqrt(to_double(b)));
        const double ma = static_cast<double>(known_.at(a));
        const double mb = static_cast<double>(known_.at(b));
        double miss = 1.0;
        for (int dir : {1, -1}) {
            if (cfg_.sign != 0 && dir != cfg_.sign) continue;
            const double d1 = level - dir * ma;
            const double d2 = level - dir * mb;
            const double p = (d1 <= 0 || d2 <= 0) ? 1.0 : walk_estimate(d1, d2, to_double(b - a), squarefree_density);
            miss *= 1.0 - p;
        }
        return 1.0 - miss;
    }

    // Every integer strictly between a and b, from the exact M(a).
    void sweep_gap(u128 a, u128 b) {
        if (!sieve_) sieve_ = std::make_unique<MoebiusSieve>(hi_, cfg_.engine.sieve, cfg_.engine.memory_budget);
        constexpr u64 block = u64{1} << 20;
        i64 m = known_.at(a);
        for (u128 y1 = a + 1; y1 < b; y1 += block) {
            const u128 y2 = std::min<u128>(y1 + block - 1, b - 1);
            MoebiusBlock blk = sieve_->sieve(y1, y2);
            accumulate_mertens(blk, m);
            for (u64 i = 0; i < blk.size(); ++i) {
                const i64 mi = m + blk.prefix[i];
                const u128 y = y1 + i;
                if (!have_best_ || score(mi, y) > score(best_.m, best_.n)) consider(y, mi);
            }
            m = blk.m_end;
            result_.swept += blk.size();
        }
    }

    u128 lo_, hi_;
    const ExtremeSearchConfig& cfg_;
    std::map<u128, i64> known_;
    GridPoint best_;
    bool have_best_ = false;
    std::unique_ptr<MoebiusSieve> sieve_;
    ExtremeResult result_;
};

}  // namespace

ExtremeResult extreme_search(u128 n_lo, u128 n_hi, const ExtremeSearchConfig& cfg) {
    if (n_lo < 1 || n_hi < n_lo) throw PreconditionError("extreme search needs 1 <= n_lo <= n_hi");
    if (cfg.sign < -1 || cfg.sign > 1) throw PreconditionError("sign must be -1, 0 or +1");
    return ExtremeSearch(n_lo, n_hi, cfg).run();
}

namespace {

// One head part with reuse over a near-period of `period` steps.
struct PartCache {
    std::size_t begin = 0, end = 0;
    u64 period = 0;          // 0: no reuse
    double drift = 0;        // bound on |part(j + period) - part(j)|
    std::vector<double> values;
    u64 anchor = 0;
    bool anchored = false;

    // Value at j (and its error bound) if the cache can supply it.
    std::optional<std::pair<double, double>> lookup(u64 j, double budget) const {
        if (!period || !anchored || j < anchor + period) return std::nullopt;
        const u64 r = (j - anchor) / period;
        const double margin = static_cast<double>(r) * drift;
        if (margin > budget) return std::nullopt;
        return std::make_pair(values[(j - anchor) % period], margin);
    }

    // Called with the exact value at every j that lookup could not serve.
    void store(u64 j, double v, ScanStats& stats) {
        if (!period) return;
        if (!anchored || j >= anchor + period) {
            if (anchored) ++stats.reanchors;
            anchor = j;
            anchored = true;
        }
        values[j - anchor] = v;
    }
};

PartCache make_part(const ZeroTable& table, std::size_t begin, std::size_t end, u64 m, double step, u64 max_cache) {
    PartCache part;
    part.begin = begin;
    part.end = end;
    if (m == 0 || begin == end) return part;
    const double z1 = table.entries[0].z;
    const double steps = static_cast<double>(m) * 2 * M_PI / (z1 * step);
    const double whole = std::nearbyint(steps);
    if (std::fabs(steps - whole) > 1e-6 * std::max(1.0, whole))
        throw PreconditionError("inconsistent step: the near-period m 2pi/z_1 = " + std::to_string(steps) +
                                " steps is not a whole number of steps");
    if (whole > static_cast<double>(max_cache)) return part;  // too long to keep; evaluate directly
    part.period = static_cast<u64>(whole);
    const double span = whole * step;
    for (std::size_t i = begin; i < end; ++i) {
        const ZeroEntry& e = table.entries[i];
        const double turn = e.z * span;
        const double e_i = std::remainder(turn, 2 * M_PI);
        // |cos(t + e) - cos t| <= |e|; slack covers rounding in z * span
        part.drift += 2 * e.a * (std::fabs(e_i) + 4e-16 * std::fabs(turn) + 1e-15);
    }
    part.values.assign(part.period, 0.0);
    return part;
}

}  // namespace

ScanResult threshold_scan(const ZeroTable& table, const ScanConfig& cfg) {
    const std::size_t n_full = cfg.n_full ? cfg.n_full : table.size();
    if (!(cfg.n_a <= cfg.n_b && cfg.n_b <= table.size() && n_full <= table.size()))
        throw PreconditionError("need n_a <= n_b <= table size and n_full <= table size");
    if (!(cfg.step > 0) && cfg.count > 1) throw PreconditionError("step must be positive");
    if (cfg.chunk == 0) throw PreconditionError("chunk must be positive");
    if (!is_decimal(cfg.ln_start)) throw ParseError("ln_start is not a decimal number: '" + cfg.ln_start + "'");

    ScanResult res;
    res.flags = FlagBitmap(cfg.ln_start, cfg.step, cfg.count, cfg.t_head);
    PartCache part_a = make_part(table, 0, cfg.n_a, cfg.m_a, cfg.step, cfg.max_cache);
    PartCache part_b = make_part(table, cfg.n_a, cfg.n_b, cfg.m_b, cfg.step, cfg.max_cache);
    res.stats.period_a = part_a.period;
    res.stats.period_b = part_b.period;
    const bool reuse = part_a.period || part_b.period;

    const ZeroTable used{{table.entries.begin(), table.entries.begin() + static_cast<std::ptrdiff_t>(std::max(n_full, cfg.n_b))}, table.source};
    for (u64 c0 = 0; c0 < cfg.count; c0 += cfg.chunk) {
        const u64 c1 = std::min(cfg.count, c0 + cfg.chunk);
        const ShiftedTable frame = rebase(used, decimal_add_scaled(cfg.ln_start, c0, cfg.step));
        for (u64 j = c0; j < c1; ++j) {
            const double delta = static_cast<double>(j - c0) * cfg.step;
            if (reuse) {
                const auto ca = part_a.lookup(j, cfg.margin_budget);
                const auto cb = part_b.lookup(j, cfg.margin_budget);
                if (ca && cb) {
                    ++res.stats.reused;
                    if (std::fabs(ca->first + cb->first) + ca->second + cb->second < cfg.t_head) continue;
                } else {
                    ++(ca || cb ? res.stats.reused : res.stats.head_direct);
                    const double va = ca ? ca->first : q_partial(frame, 0, cfg.n_a, delta);
                    const double vb = cb ? cb->first : q_partial(frame, cfg.n_a, cfg.n_b, delta);
                    if (!ca) part_a.store(j, va, res.stats);
                    if (!cb) part_b.store(j, vb, res.stats);
                    const double margin = (ca ? ca->second : 0.0) + (cb ? cb->second : 0.0);
                    if (std::fabs(va + vb) + margin + 1e-12 < cfg.t_head) continue;
                }
            } else {
                ++res.stats.head_direct;
            }
            // the flag itself always comes from a direct evaluation
            const double head = q_eval(frame, cfg.n_b, delta);
            if (std::fabs(head) < cfg.t_head) continue;
            res.flags.set(j);
            ++res.stats.flagged;
            const double full = q_eval(frame, n_full, delta);
            ++res.stats.full_evaluations;
            if (std::fabs(full) >= cfg.t_full)
                res.hits.push_back({j, decimal_add_scaled(cfg.ln_start, j, cfg.step), head, full});
        }
    }
    res.stats.points = cfg.count;
    return res;
}

Records running_extremes(const std::vector<std::pair<std::string, double>>& stream) {
    Records out;
    for (const auto& [ln_x, q] : stream) {
        if (q >= 0) {
            if (out.positive.empty() || q > out.positive.back().q) out.positive.push_back({ln_x, q});
        } else if (out.negative.empty() || q < out.negative.back().q) {
            out.negative.push_back({ln_x, q});
        }
    }
    return out;
}

Histogram tail_histogram(const std::vector<double>& values, const std::vector<double>& edges) {
    if (edges.size() < 2) throw PreconditionError("histogram needs at least two edges");
    for (std::size_t i = 1; i < edges.size(); ++i)
        if (!(edges[i] > edges[i - 1])) throw PreconditionError("histogram edges must be strictly ascending");
    Histogram h;
    h.edges = edges;
    h.positive.assign(edges.size() - 1, 0);
    h.negative.assign(edges.size() - 1, 0);
    for (double v : values) {
        const double a = std::fabs(v);
        if (a <= edges.front()) {
            ++h.below;
            continue;
        }
        if (a > edges.back()) {
            ++h.above;
            continue;
        }
        // first edge >= a closes the bin from the right
        const auto bin = static_cast<std::size_t>(std::lower_bound(edges.begin(), edges.end(), a) - edges.begin()) - 1;
        (v >= 0 ? h.positive : h.negative)[bin]++;
    }
    return h;
}

}  // namespace mertens
