#include "mertens/engine.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>

#include "mertens/checkpoint.hpp"
#include "mertens/errors.hpp"
#include "mertens/parallel.hpp"

namespace mertens {

void RegionConfig::validate() const {
    if (!(c1 > 1.0) || !(c2 > c1) || !(c3 >= 1.0))
        throw PreconditionError("region config needs 1 < c1 < c2 and c3 >= 1");
}

Region classify_region(u64 x, u128 y, u128 n, const RegionConfig& cfg) {
    if (x < 1 || y < 1) throw PreconditionError("classify_region: x and y must be >= 1");
    const long double yl = static_cast<long double>(y);
    const long double scale = std::sqrt(static_cast<long double>(n) / static_cast<long double>(x));
    if (yl < cfg.c1 * scale) return Region::r1;
    if (yl < cfg.c2 * scale) return Region::r2;
    if (yl >= cfg.c3 * std::sqrt(static_cast<long double>(n))) return Region::r4;
    return Region::r3;
}

u64 choose_u(u128 n, u64 num_targets, u64 mem_budget, double alpha) {
    if (n < 4) throw PreconditionError("choose_u: n must be >= 4");
    if (num_targets < 1) num_targets = 1;
    if (!(alpha > 0)) throw PreconditionError("choose_u: alpha must be positive");
    const u128 u_cap = std::min<u128>(n, u128{1} << 62);
    const u64 u_min = ceil_sqrt(n) + 1;

    const long double nl = static_cast<long double>(n);
    long double ideal = alpha * std::pow(nl * static_cast<long double>(num_targets), 2.0L / 3.0L);
    u128 u = ideal >= static_cast<long double>(u_cap) ? u_cap : static_cast<u128>(std::max(1.0L, ideal));
    u = std::max<u128>(u, u_min);

    // N arrays of floor(n/u) elements in half of the budget
    const long double per_array = static_cast<long double>(mem_budget) / 2.0L / harmonic_element_bytes / num_targets;
    if (per_array < 1.0L) throw ResourceLimitError("choose_u: memory budget cannot hold a single array element");
    const long double need_u = std::ceil(nl / per_array);
    if (need_u > static_cast<long double>(u)) {
        u = need_u >= static_cast<long double>(u_cap) ? u_cap : static_cast<u128>(need_u);
        // floor(n/u) may still be one too many after rounding
        while (u < u_cap && static_cast<long double>(n / u) > per_array) ++u;
    }
    u = std::min(u, u_cap);
    if (static_cast<long double>(n / u) > per_array)
        throw ResourceLimitError("choose_u: even u = n exceeds the memory budget");
    return static_cast<u64>(u);
}

HarmonicArray::HarmonicArray(u128 n, u64 u, const RegionConfig& cfg) : n_(n), u_(u) {
    if (u < 1) throw PreconditionError("HarmonicArray: u must be >= 1");
    cfg.validate();
    const u128 size = n / u;
    if (size > (u128{1} << 40)) throw ResourceLimitError("HarmonicArray: too many elements");
    size_ = static_cast<u64>(size);
    v_.assign(size_ + 1, 0);
    t_.assign(size_ + 1, 0);
    x_lo_.assign(size_ + 1, 0);
    acc_.assign(size_ + 1, 1);
    cur_x_.assign(size_ + 1, 0);
    cur_q_.assign(size_ + 1, 0);
    acc_[0] = 0;
    for (u64 k = 1; k <= size_; ++k) {
        const u128 v = high64(n) == 0 ? static_cast<u128>(low64(n) / k) : n / k;
        v_[k] = v;
        // dense walk up to the first power of two at or above the region-1 boundary
        const long double want = std::ceil(cfg.c1 * static_cast<long double>(ceil_sqrt(v)));
        u64 t = 1;
        while (static_cast<long double>(t) < want && t < (u64{1} << 62)) t <<= 1;
        t_[k] = std::min(t, u);
        x_lo_[k] = std::max<u64>(2, size_ / k + 1);
    }
    reset_cursors();
}

void HarmonicArray::reset_cursors() {
    for (u64 k = 1; k <= size_; ++k) {
        const u128 v = v_[k];
        u128 x = v / t_[k];
        if (next_y_ > 1) x = std::min<u128>(x, v / next_y_);
        cur_x_[k] = static_cast<u64>(std::min<u128>(x, u128{1} << 63));
        cur_q_[k] = cur_x_[k] >= x_lo_[k] ? static_cast<u64>(v / cur_x_[k]) : ~u64{0};
    }
}

ApplyStats HarmonicArray::apply_block(const MoebiusBlock& block, const DivisorTable& table, const RegionConfig&) {
    if (finalized_) throw PreconditionError("apply_block: array already finalized");
    if (block.y1 != next_y_)
        throw PreconditionError("apply_block: blocks must be applied in ascending order exactly once (expected y1 = " +
                                to_string(next_y_) + ", got " + to_string(block.y1) + ")");
    if (!block.has_prefix()) throw PreconditionError("apply_block: block lacks Mertens prefix sums");
    if (block.y2 > u_) throw PreconditionError("apply_block: block extends beyond u");

    const u64 y1 = static_cast<u64>(block.y1);
    const u64 y2 = static_cast<u64>(block.y2);
    const i64 m_start = block.m_start;
    const std::int32_t* prefix = block.prefix.data();
    auto mertens_at = [&](u64 y) { return static_cast<u64>(m_start + prefix[y - y1]); };

    // heavy elements sit at small k, so hand out small chunks first
    const u64 chunk = std::max<u64>(1, size_ / (64 * std::max(1u, worker_count())));
    const u64 nchunks = size_ ? (size_ + chunk - 1) / chunk : 0;
    std::vector<ApplyStats> chunk_stats(nchunks);

    parallel_for(nchunks, [&](u64 c) {
        ApplyStats st;
        const u64 k_lo = 1 + c * chunk;
        const u64 k_hi = std::min(size_, k_lo + chunk - 1);
        for (u64 k = k_lo; k <= k_hi; ++k) {
            const u128 v = v_[k];
            const u64 t = t_[k];
            u64 acc = acc_[k];

            // grouped terms, every y below t_k: consecutive walk
            if (y1 < t) {
                const u64 y_end = std::min(y2, t - 1);
                if (high64(v) == 0) {
                    const u64 v64 = low64(v);
                    u64 q = table.divide(v64, y1);
                    for (u64 y = y1; y <= y_end; ++y) {
                        const u64 qn = table.divide(v64, y + 1);
                        acc -= (q - qn) * mertens_at(y);
                        q = qn;
                    }
                } else {
                    u128 q = table.divide(v, y1);
                    for (u64 y = y1; y <= y_end; ++y) {
                        const u128 qn = table.divide(v, y + 1);
                        acc -= static_cast<u64>(q - qn) * mertens_at(y);
                        q = qn;
                    }
                }
                st.dense_terms += y_end - y1 + 1;
            }

            // direct terms: x descends while its quotient lands in this block
            u64 x = cur_x_[k];
            const u64 x_lo = x_lo_[k];
            if (x >= x_lo) {
                u64 q = cur_q_[k];
                while (q <= y2) {
                    acc -= mertens_at(q);
                    ++st.jump_terms;
                    if (--x < x_lo) break;
                    q = static_cast<u64>(table.divide(v, x));
                }
                cur_x_[k] = x;
                cur_q_[k] = x >= x_lo ? q : ~u64{0};
            }
            acc_[k] = acc;
        }
        chunk_stats[c] = st;
    }, true);

    next_y_ = block.y2 + 1;
    ApplyStats total;
    for (const ApplyStats& s : chunk_stats) {
        total.dense_terms += s.dense_terms;
        total.jump_terms += s.jump_terms;
    }
    return total;
}

void HarmonicArray::finalize() {
    if (finalized_) return;
    if (next_y_ <= u_) throw PreconditionError("finalize: not every block up to u has been applied");
    for (u64 k = size_; k >= 1; --k) {
        u64 s = 0;
        for (u64 j = 2 * k; j <= size_; j += k) s += acc_[j];
        acc_[k] -= s;
    }
    finalized_ = true;
}

i64 HarmonicArray::value(u64 k) const {
    if (!finalized_) throw PreconditionError("HarmonicArray: value requested before finalize");
    if (k < 1 || k > size_) throw PreconditionError("HarmonicArray: index out of range");
    return static_cast<i64>(acc_[k]);
}

std::vector<i64> HarmonicArray::values() const {
    std::vector<i64> out;
    out.reserve(size_);
    for (u64 k = 1; k <= size_; ++k) out.push_back(value(k));
    return out;
}

void HarmonicArray::restore(u128 next_y, std::vector<u64> acc) {
    if (acc.size() != size_) throw PreconditionError("restore: accumulator count does not match array size");
    if (next_y < 1 || next_y > static_cast<u128>(u_) + 1) throw PreconditionError("restore: next_y out of range");
    std::copy(acc.begin(), acc.end(), acc_.begin() + 1);
    next_y_ = next_y;
    finalized_ = false;
    reset_cursors();
}

std::optional<i64> MertensResult::at_quotient(u128 c) const {
    if (c == 0) return std::nullopt;
    if (c == 1) return value;
    if (c <= by_index.size()) return by_index[static_cast<std::size_t>(c - 1)];
    const u128 y = n / c;
    if (y == 0) return 0;
    auto it = std::lower_bound(small_values.begin(), small_values.end(), static_cast<u64>(y),
                               [](const std::pair<u64, i64>& e, u64 v) { return e.first < v; });
    if (it != small_values.end() && it->first == y) return it->second;
    return std::nullopt;
}

namespace {

std::vector<u64> small_quotient_values(u128 n, u64 size_k) {
    std::vector<u64> out;
    u128 c = static_cast<u128>(size_k) + 1;
    while (c <= n) {
        const u128 v = n / c;
        out.push_back(static_cast<u64>(v));
        c = n / v + 1;
    }
    std::reverse(out.begin(), out.end());
    return out;
}

}  // namespace

std::vector<MertensResult> mertens_many(const std::vector<u128>& ns, const EngineConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    cfg.regions.validate();
    if (ns.empty()) return {};
    for (u128 n : ns)
        if (n < 1) throw PreconditionError("mertens: n must be >= 1");
    const u128 n_max = *std::max_element(ns.begin(), ns.end());
    const u64 count = ns.size();

    u64 u;
    if (cfg.u) {
        u = cfg.u;
        if (n_max >= 4 && u <= ceil_sqrt(n_max)) throw PreconditionError("mertens: u must exceed ceil(sqrt(n))");
    } else {
        u = n_max < 4 ? static_cast<u64>(n_max) : choose_u(n_max, count, cfg.memory_budget, cfg.u_alpha);
    }
    if (static_cast<u128>(u) >= logprime_validity_bound) throw PrecisionError("mertens: u beyond sieve validity bound");

    u64 block_len = cfg.block_len ? cfg.block_len : std::max<u64>(ceil_sqrt(u), u64{1} << 22);
    block_len = std::min(block_len, u);
    const u64 block_bytes = 7;  // mu + prefix + sieve cell
    if (static_cast<long double>(block_len) * block_bytes > cfg.memory_budget / 2)
        throw ResourceLimitError("mertens: sieve block does not fit the memory budget");

    long double array_bytes = 0;
    for (u128 n : ns) array_bytes += static_cast<long double>(n / u) * harmonic_element_bytes;
    if (array_bytes > static_cast<long double>(cfg.memory_budget))
        throw ResourceLimitError("mertens: harmonic arrays exceed the memory budget");

    if (cfg.capture_small_quotients && count != 1)
        throw PreconditionError("mertens: small-quotient capture is available for single targets only");
    const bool use_checkpoint = !cfg.checkpoint_path.empty();
    if (use_checkpoint && (count != 1 || cfg.capture_small_quotients))
        throw PreconditionError("mertens: checkpointing is available for plain single-target runs only");

    std::vector<HarmonicArray> arrays;
    arrays.reserve(count);
    for (u128 n : ns) arrays.emplace_back(n, u, cfg.regions);

    // targets at or below u are read straight off the sieve
    std::vector<std::pair<u64, std::size_t>> direct;
    for (std::size_t i = 0; i < count; ++i)
        if (ns[i] <= u && arrays[i].size() == 0) direct.emplace_back(static_cast<u64>(ns[i]), i);
    std::sort(direct.begin(), direct.end());
    std::vector<i64> direct_values(count, 0);

    std::vector<u64> small_ys;
    std::vector<i64> small_ms;
    if (cfg.capture_small_quotients) {
        const long double est = 2.0L * std::sqrt(static_cast<long double>(ns[0])) * 16.0L;
        if (est > static_cast<long double>(cfg.memory_budget) / 2)
            throw ResourceLimitError("mertens: small-quotient capture exceeds the memory budget");
        small_ys = small_quotient_values(ns[0], arrays[0].size());
        small_ms.assign(small_ys.size(), 0);
    }

    u64 max_split = 0;
    for (const HarmonicArray& a : arrays) max_split = std::max(max_split, a.max_split_point());
    u64 cap = std::min<u64>(cfg.divisor_cap, max_split + 1);
    cap = std::min<u64>(cap, cfg.memory_budget / 4 / divisor_table_entry_bytes);
    DivisorTable table = cap >= 1 ? build_table(cap, cfg.memory_budget) : DivisorTable{};

    const MoebiusSieve sieve(u, cfg.sieve, cfg.memory_budget);

    u64 y = 1;
    i64 m_run = 0;
    if (use_checkpoint && std::filesystem::exists(cfg.checkpoint_path)) {
        Checkpoint cp = read_checkpoint(cfg.checkpoint_path);
        if (cp.n != ns[0] || cp.u != u)
            throw PreconditionError("checkpoint " + cfg.checkpoint_path + " belongs to a different job (n or u differ)");
        arrays[0].restore(cp.next_y1, std::move(cp.acc));
        y = cp.next_y1;
        m_run = cp.m_prev;
    }

    EngineStats stats;
    stats.divisor_cap = table.cap();
    auto last_save = std::chrono::steady_clock::now();
    std::size_t direct_pos = 0;
    std::size_t small_pos = 0;
    while (direct_pos < direct.size() && direct[direct_pos].first < y) ++direct_pos;

    while (y <= u) {
        if (!stats.sparse_mode_reached && y >= max_split &&
            classify_region(1, y, n_max, cfg.regions) == Region::r4) {
            // only sparse jumps remain: drop the divisor table, widen blocks
            stats.sparse_mode_reached = true;
            table.release();
            const u64 wide = std::min<u64>(u, cfg.sparse_block_factor * ceil_sqrt(u));
            if (static_cast<long double>(wide) * block_bytes <= cfg.memory_budget / 2)
                block_len = std::max(block_len, wide);
        }
        const u64 y2 = static_cast<u64>(std::min<u128>(u, static_cast<u128>(y) + block_len - 1));
        MoebiusBlock block = sieve.sieve(y, y2);
        accumulate_mertens(block, m_run);
        for (HarmonicArray& a : arrays) {
            const ApplyStats s = a.apply_block(block, table, cfg.regions);
            stats.terms.dense_terms += s.dense_terms;
            stats.terms.jump_terms += s.jump_terms;
        }
        for (; direct_pos < direct.size() && direct[direct_pos].first <= y2; ++direct_pos)
            direct_values[direct[direct_pos].second] = block.mertens_at(direct[direct_pos].first);
        for (; small_pos < small_ys.size() && small_ys[small_pos] <= y2; ++small_pos)
            if (small_ys[small_pos] >= y) small_ms[small_pos] = block.mertens_at(small_ys[small_pos]);

        m_run = block.m_end;
        ++stats.blocks;
        stats.sieved += y2 - y + 1;
        y = y2 + 1;

        if (use_checkpoint && y <= u &&
            std::chrono::duration<double>(std::chrono::steady_clock::now() - last_save).count() >= cfg.checkpoint_seconds) {
            Checkpoint cp;
            cp.n = ns[0];
            cp.u = u;
            cp.next_y1 = y;
            cp.m_prev = m_run;
            cp.acc.assign(arrays[0].raw_accumulators().begin() + 1, arrays[0].raw_accumulators().end());
            write_checkpoint(cfg.checkpoint_path, cp);
            last_save = std::chrono::steady_clock::now();
        }
    }

    stats.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::vector<MertensResult> out(count);
    for (std::size_t i = 0; i < count; ++i) {
        HarmonicArray& a = arrays[i];
        a.finalize();
        MertensResult& r = out[i];
        r.n = ns[i];
        r.u = u;
        r.block_len = block_len;
        r.by_index = a.values();
        r.value = a.size() ? r.by_index[0] : direct_values[i];
        r.stats = stats;
    }
    if (cfg.capture_small_quotients) {
        out[0].small_values.reserve(small_ys.size());
        for (std::size_t i = 0; i < small_ys.size(); ++i) out[0].small_values.emplace_back(small_ys[i], small_ms[i]);
    }
    if (use_checkpoint) std::filesystem::remove(cfg.checkpoint_path);
    return out;
}

MertensResult mertens_exact(u128 n, const EngineConfig& cfg) { return std::move(mertens_many({n}, cfg)[0]); }

namespace {
constexpr u64 naive_block = u64{1} << 20;
}

i64 mertens_naive(u64 n, u64 ceiling) {
    if (n > ceiling) throw PreconditionError("mertens_naive: n above the configured ceiling " + std::to_string(ceiling));
    if (n == 0) return 0;
    const PrimeList primes = generate_primes(std::max<u64>(2, ceil_sqrt(n)));
    const u64 blocks = (n + naive_block - 1) / naive_block;
    std::vector<i64> sums(blocks, 0);
    // each block is sieved serially; blocks run in parallel
    parallel_for(blocks, [&](u64 b) {
        const u64 a = 1 + b * naive_block;
        const u64 e = std::min(n, a + naive_block - 1);
        const MoebiusBlock blk = sieve_block_naive(a, e, primes, false);
        i64 s = 0;
        for (std::int8_t m : blk.mu) s += m;
        sums[b] = s;
    });
    return std::accumulate(sums.begin(), sums.end(), i64{0});
}

std::vector<i64> mertens_naive_many(const std::vector<u64>& ns, u64 ceiling) {
    std::vector<i64> out(ns.size(), 0);
    if (ns.empty()) return out;
    std::vector<std::size_t> order(ns.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return ns[a] < ns[b]; });
    const u64 n_max = ns[order.back()];
    if (n_max > ceiling) throw PreconditionError("mertens_naive: n above the configured ceiling " + std::to_string(ceiling));
    const PrimeList primes = generate_primes(std::max<u64>(2, ceil_sqrt(n_max)));
    std::size_t pos = 0;
    while (pos < order.size() && ns[order[pos]] == 0) ++pos;
    i64 m_run = 0;
    for (u64 a = 1; a <= n_max && pos < order.size(); a += naive_block) {
        const u64 e = std::min(n_max, a + naive_block - 1);
        MoebiusBlock blk = sieve_block_naive(a, e, primes);
        accumulate_mertens(blk, m_run);
        for (; pos < order.size() && ns[order[pos]] <= e; ++pos) out[order[pos]] = blk.mertens_at(ns[order[pos]]);
        m_run = blk.m_end;
    }
    return out;
}

}  // namespace mertens
