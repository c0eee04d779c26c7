// Acceptance run: one PASS/FAIL line per criterion.
//
//   acceptance [--only N,...] [--expect-fail N,...]
//
// The exit status is nonzero when a criterion fails that is not listed in
// --expect-fail. Listed criteria still print their real verdict. The slow
// M(10^16) criterion runs only with MERTENS_ACCEPTANCE_SLOW=1.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mertens/engine.hpp"
#include "mertens/explicit_formula.hpp"
#include "mertens/fastdiv.hpp"
#include "mertens/quasiperiod.hpp"
#include "mertens/scanner.hpp"
#include "mertens/sieve.hpp"
#include "mertens/zeros.hpp"
#include "mp_oracle.hpp"
#include "random_walk.hpp"

using namespace mertens;

namespace {

enum class Verdict { pass, fail, skip };

struct Outcome {
    Verdict verdict;
    std::string detail;
};

Outcome pass(std::string d) { return {Verdict::pass, std::move(d)}; }
Outcome fail(std::string d) { return {Verdict::fail, std::move(d)}; }
Outcome check(bool ok, std::string d) { return {ok ? Verdict::pass : Verdict::fail, std::move(d)}; }

template <class... Args>
std::string format(const char* fmt, Args... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, fmt, args...);
    return buf;
}

const ZeroTable& bundled() {
    static const ZeroTable t = load_table(std::string(MERTENS_DATA_DIR) + "/zeros_2000.txt");
    return t;
}

Outcome oracle_equivalence() {
    std::vector<u64> ns;
    for (u64 n = 1; n <= 10000; ++n) ns.push_back(n);
    std::mt19937_64 rng(20110101);
    std::uniform_int_distribution<u64> pick(1, 100000000);
    for (int i = 0; i < 100; ++i) ns.push_back(pick(rng));
    const std::vector<i64> naive = mertens_naive_many(ns);
    for (std::size_t i = 0; i < ns.size(); ++i) {
        const i64 exact = mertens_exact(ns[i]).value;
        if (exact != naive[i])
            return fail(format("n=%llu exact=%lld naive=%lld", (unsigned long long)ns[i], (long long)exact,
                               (long long)naive[i]));
    }
    return pass(format("%zu values match the naive sieve", ns.size()));
}

Outcome record_ratio() {
    const u128 n = 7766842813ull;
    const MertensResult r = mertens_exact(n);
    const double ratio = std::fabs(static_cast<double>(r.value)) / std::sqrt(static_cast<double>(n));
    const std::string shown = format("%.6f", ratio);
    return check(shown == "0.570591", format("M(7766842813)=%lld, |M|/sqrt(n)=%s", (long long)r.value, shown.c_str()));
}

Outcome large_value() {
    const char* flag = std::getenv("MERTENS_ACCEPTANCE_SLOW");
    if (!flag || std::string(flag) != "1") return {Verdict::skip, "opt-in, set MERTENS_ACCEPTANCE_SLOW=1"};
    const u128 n = parse_u128("10000000000000000");
    const MertensResult r = mertens_exact(n);
    if (r.value != -3195437) return fail(format("M(10^16)=%lld", (long long)r.value));
    // quotient-map values against direct runs
    for (u64 c : {1000ull, 100ull, 10ull}) {
        const auto from_map = r.at_quotient(c);
        const i64 direct = mertens_exact(n / c).value;
        if (!from_map || *from_map != direct)
            return fail(format("M(10^16/%llu) map=%lld direct=%lld", (unsigned long long)c,
                               from_map ? (long long)*from_map : 0LL, (long long)direct));
    }
    return pass("M(10^16)=-3195437; M(10^13..10^15) from the quotient map match direct runs");
}

Outcome simultaneous_quotients() {
    const u128 n = 10000000000ull;
    const MertensResult r = mertens_exact(n);
    EngineConfig other;
    other.u_alpha = 0.5;
    std::ostringstream detail;
    for (u64 c : {2ull, 3ull, 7ull, 10ull, 100ull}) {
        const auto from_map = r.at_quotient(c);
        const i64 direct = mertens_exact(n / c, other).value;
        if (!from_map || *from_map != direct)
            return fail(format("c=%llu map=%lld direct=%lld", (unsigned long long)c,
                               from_map ? (long long)*from_map : 0LL, (long long)direct));
        detail << "M(n/" << c << ")=" << direct << ' ';
    }
    return pass(detail.str());
}

Outcome sieve_equivalence() {
    const u128 top = 1000000000000ull;
    const u64 len = 100000;
    const MoebiusSieve logprime(top, MoebiusSieve::Strategy::logprime);
    const MoebiusSieve naive(top, MoebiusSieve::Strategy::naive);
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<u64> pick(1, static_cast<u64>(top) - len + 1);
    for (int i = 0; i < 50; ++i) {
        const u64 y1 = i == 0 ? 1 : i == 1 ? static_cast<u64>(top) - len + 1 : pick(rng);
        const MoebiusBlock a = logprime.sieve(y1, y1 + len - 1), b = naive.sieve(y1, y1 + len - 1);
        if (a.mu != b.mu) {
            std::size_t j = 0;
            while (a.mu[j] == b.mu[j]) ++j;
            return fail(format("block at %llu differs at y=%llu", (unsigned long long)y1, (unsigned long long)(y1 + j)));
        }
    }
    return pass("50 blocks of 10^5 up to 10^12 identical");
}

Outcome fast_division() {
    std::mt19937_64 rng(6);
    std::vector<u64> ds = {1, 2, 3, 5, 6, 7, 641, 65535, 65536, 65537, ~0ull, ~0ull - 1, 1ull << 63, (1ull << 63) + 1,
                           (1ull << 63) - 1, 6700417, 274177, 0xFFFFFFFFull, 0x100000001ull};
    for (int k = 1; k < 64; ++k) {
        ds.push_back(1ull << k);
        ds.push_back((1ull << k) - 1);
        ds.push_back((1ull << k) + 1);
    }
    std::vector<u64> ns = {0, 1, 2, ~0ull, ~0ull - 1, 1ull << 63, (1ull << 63) - 1, 1ull << 32, (1ull << 32) - 1};
    u64 checked = 0;
    for (u64 d : ds) {
        const DivisorConstants c = precompute_divisor(d);
        for (u64 n : ns) {
            for (u64 v : {n, d * (n / d ? n / d : 1), d * (n / d ? n / d : 1) - 1}) {
                ++checked;
                if (fast_div(v, c) != v / d)
                    return fail(format("n=%llu d=%llu", (unsigned long long)v, (unsigned long long)d));
            }
        }
    }
    for (u64 i = 0; i < 10000000; ++i) {
        const u64 d = std::max<u64>(1, rng() >> (rng() % 64));
        const u64 n = rng() >> (rng() % 64);
        ++checked;
        if (fast_div(n, precompute_divisor(d)) != n / d)
            return fail(format("n=%llu d=%llu", (unsigned long long)n, (unsigned long long)d));
    }
    return pass(format("%llu pairs match native division", (unsigned long long)checked));
}

Outcome quasiperiods() {
    const ZeroTable& t = bundled();
    for (std::size_t i = 0; i < 7; ++i)
        if (significant_digits(t.entries[i].z_dec) < 12) return fail("table carries fewer than 12 digits for z_1..z_7");
    std::ostringstream detail;
    bool ok = true;
    for (auto [k_lo, k_hi, m] : {std::tuple<std::size_t, std::size_t, u64>{2, 4, 274243136},
                                 std::tuple<std::size_t, std::size_t, u64>{5, 7, 242101728}}) {
        const QuasiPeriod at = quasiperiod_at(t, k_lo, k_hi, m);
        ok = ok && at.max_residual() <= 0.0013;
        detail << "m=" << m << " residuals";
        for (double r : at.residuals) detail << ' ' << format("%.6f", r);
        const QuasiPeriod found = find_quasiperiod(t, k_lo, k_hi, m, 0.0013);
        ok = ok && found.m <= m && found.max_residual() <= 0.0013;
        detail << " (search: first m=" << found.m << ", max " << format("%.6f", found.max_residual()) << "); ";
    }
    return check(ok, detail.str());
}

Outcome explicit_formula_residual() {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> lg(std::log(1e8), std::log(1e10));
    std::vector<u128> ns;
    for (int i = 0; i < 100; ++i) ns.push_back(static_cast<u128>(std::llround(std::exp(lg(rng)))));
    const std::vector<MertensResult> exact = mertens_many(ns);
    auto stats_for = [&](std::size_t terms) {
        std::vector<std::pair<double, double>> pairs;
        for (std::size_t i = 0; i < ns.size(); ++i) {
            const double x = static_cast<double>(ns[i]);
            const std::string ln_x = format("%.17g", std::log(x));
            pairs.push_back({static_cast<double>(exact[i].value) / std::sqrt(x), q_at(bundled(), terms, ln_x)});
        }
        return residual_stats(pairs);
    };
    const ResidualStats s500 = stats_for(500), s1000 = stats_for(1000), s2000 = stats_for(2000);
    return check(s1000.std < 1e-2 && s2000.std <= s500.std,
                 format("std q_500 %.3e, q_1000 %.3e, q_2000 %.3e (mean q_1000 %.2e)", s500.std, s1000.std, s2000.std,
                        s1000.mean));
}

Outcome crossing_monte_carlo() {
    struct Config {
        std::int64_t steps, end, level;
    };
    const double sigma = squarefree_density;
    std::ostringstream detail;
    bool ok = true;
    int i = 0;
    for (const Config& c : {Config{10000, 0, 60}, Config{10000, 30, 80}, Config{40000, -40, 120}}) {
        const double empirical = walk_oracle::crossing_frequency(c.steps, c.end, c.level, sigma, 100000, 90 + i++);
        CrossingQuery q;
        q.a = 1;
        q.b = 1 + static_cast<u128>(c.steps);
        q.ma = 0;
        q.mb = c.end;
        q.m0 = c.level;
        q.sigma = sigma;
        const double formula = crossing_probability(q), bridge = bridge_crossing_probability(q);
        const double rel = std::fabs(empirical - formula) / formula;
        ok = ok && rel <= 0.2;
        detail << format("[T=%lld end=%lld M0=%lld: walks %.4f formula %.4f bridge %.4f] ", (long long)c.steps,
                         (long long)c.end, (long long)c.level, empirical, formula, bridge);
    }
    return check(ok, detail.str());
}

std::vector<bool> direct_flags(const std::string& ln_start, double step, u64 count, std::size_t terms, double t) {
    const ShiftedTable shifted = rebase(bundled(), ln_start);
    std::vector<bool> out(count);
    for (u64 j = 0; j < count; ++j) out[j] = std::fabs(q_eval(shifted, terms, static_cast<double>(j) * step)) >= t;
    return out;
}

Outcome scan_soundness() {
    const double z1 = bundled().entries[0].z;
    std::ostringstream detail;
    for (const char* start : {"1000", "1000000000", "100000000000"}) {
        // plain head split at the table step, then exact period reuse of the first term
        ScanConfig plain;
        plain.ln_start = start;
        plain.step = M_PI / (3072 * z1);
        plain.count = 100000;
        plain.t_head = 0.3;
        plain.n_full = 200;
        ScanConfig reuse = plain;
        reuse.step = 2 * M_PI / (6144 * z1);
        reuse.n_a = 1;
        reuse.m_a = 1;
        u64 flagged = 0, reused = 0;
        for (const ScanConfig& cfg : {plain, reuse}) {
            const ScanResult r = threshold_scan(bundled(), cfg);
            const std::vector<bool> expect = direct_flags(start, cfg.step, cfg.count, cfg.n_b, cfg.t_head);
            for (u64 j = 0; j < cfg.count; ++j)
                if (r.flags.test(j) != expect[j])
                    return fail(format("ln x=%s index %llu differs", start, (unsigned long long)j));
            flagged += r.flags.popcount();
            reused += r.stats.reused;
        }
        detail << "ln x=" << start << ": " << flagged << " flags, " << reused << " reused; ";
    }
    return pass(detail.str());
}

Outcome rebase_precision() {
    const std::string x0 = "100000000000";
    const ShiftedTable t = rebase(bundled(), x0);
    double worst = 0;
    for (std::size_t i = 0; i < bundled().size(); ++i) {
        const ZeroEntry& e = bundled().entries[i];
        const double want = mp_oracle::shifted_phase(e.b_dec, e.z_dec, x0);
        double diff = std::fabs(t.b[i] - want);
        diff = std::min(diff, 2 * M_PI - diff);
        worst = std::max(worst, diff);
    }
    return check(worst < 1e-10, format("2000 phases at x0=10^11, worst error %.2e", worst));
}

}  // namespace

int main(int argc, char** argv) {
    std::set<int> only, expect_fail;
    auto parse_list = [](const std::string& s, std::set<int>& out) {
        std::stringstream ss(s);
        std::string item;
        while (std::getline(ss, item, ',')) out.insert(std::stoi(item));
    };
    for (int i = 1; i + 1 < argc; i += 2) {
        const std::string arg = argv[i];
        if (arg == "--only") parse_list(argv[i + 1], only);
        else if (arg == "--expect-fail") parse_list(argv[i + 1], expect_fail);
        else {
            std::fprintf(stderr, "usage: %s [--only N,...] [--expect-fail N,...]\n", argv[0]);
            return 2;
        }
    }

    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"oracle equivalence", oracle_equivalence},
        {"record ratio at 7766842813", record_ratio},
        {"M(10^16)", large_value},
        {"simultaneous quotients at 10^10", simultaneous_quotients},
        {"log-prime vs naive sieve", sieve_equivalence},
        {"fast division", fast_division},
        {"quasiperiods", quasiperiods},
        {"explicit-formula residual", explicit_formula_residual},
        {"crossing probability vs random walks", crossing_monte_carlo},
        {"scan soundness", scan_soundness},
        {"rebase precision", rebase_precision},
    };

    int unexpected = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i + 1);
        if (!only.empty() && !only.count(id)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = fail(std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const char* word = o.verdict == Verdict::pass ? "PASS" : o.verdict == Verdict::fail ? "FAIL" : "SKIP";
        const char* note = o.verdict == Verdict::fail && expect_fail.count(id) ? " (expected)" : "";
        std::printf("criterion %2d %s%s  %s (%.1f s): %s\n", id, word, note, criteria[i].first, secs, o.detail.c_str());
        std::fflush(stdout);
        if (o.verdict == Verdict::fail && !expect_fail.count(id)) ++unexpected;
    }
    if (only.empty() || only.count(12))
        std::printf("criterion 12 SKIP  M(10^22) and the 10^19 extreme: out of scope for a desk run\n");
    return unexpected ? 1 : 0;
}
