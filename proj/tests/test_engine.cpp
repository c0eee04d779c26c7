#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>

#include "doctest.h"
#include "mertens/checkpoint.hpp"
#include "mertens/engine.hpp"
#include "mertens/errors.hpp"
#include "mertens/parallel.hpp"
#include "oracles.hpp"

using namespace mertens;

namespace {

const std::vector<std::int64_t>& oracle_m() {
    static const auto table = oracle::mertens_table(1000000);
    return table;
}

EngineConfig small_config() {
    EngineConfig cfg;
    cfg.memory_budget = u64{256} << 20;
    return cfg;
}

}  // namespace

TEST_CASE("choose_u bounds") {
    const u64 u6 = choose_u(1000000, 1, u64{1} << 30);
    CHECK(u6 > 1000);
    CHECK(u6 >= 5000);
    CHECK(u6 <= 20000);

    const u64 budget = u64{1} << 30;
    const u64 u12 = choose_u(1000000000000ull, 1, budget);
    CHECK(1000000000000ull / u12 <= budget / 8);

    for (u64 b : {u64{1} << 10, u64{1} << 20, u64{1} << 30}) {
        const u64 u = choose_u(100, 1, b);
        CHECK(u > 10);
        CHECK(u <= 100);
    }
    // a tight budget pushes u up so the array shrinks
    const u64 tight = choose_u(1000000000000ull, 1, 64 * harmonic_element_bytes);
    CHECK(1000000000000ull / tight * harmonic_element_bytes <= 32 * harmonic_element_bytes);
    // more targets, larger u
    CHECK(choose_u(1000000000, 100, budget) > choose_u(1000000000, 1, budget));
    CHECK_THROWS_AS(choose_u(3, 1, budget), PreconditionError);
    CHECK_THROWS_AS(choose_u(1000000, 1, 8), ResourceLimitError);
}

TEST_CASE("classify_region") {
    const RegionConfig cfg;
    CHECK(classify_region(1, 1, 1000000, cfg) == Region::r1);
    CHECK(classify_region(57, 1, 1000000000000ull, cfg) == Region::r1);
    // boundary y = c1 sqrt(n/x) is the first point of region 2
    CHECK(classify_region(1, 20000, 100000000, cfg) == Region::r2);
    CHECK(classify_region(1, 19999, 100000000, cfg) == Region::r1);
    const u128 n = 10000000000000000ull;  // sqrt = 10^8
    CHECK(classify_region(1, 2000000001ull, n, cfg) == Region::r4);
    CHECK(classify_region(100, 2000000001ull, n, cfg) == Region::r4);
    CHECK(classify_region(10000, 1500000, n, cfg) == Region::r1);
    CHECK(classify_region(10000, 5000000, n, cfg) == Region::r2);
    CHECK(classify_region(10000, 50000000, n, cfg) == Region::r3);
    CHECK_THROWS_AS(classify_region(0, 5, 100, cfg), PreconditionError);
    RegionConfig bad;
    bad.c2 = 1.5;
    CHECK_THROWS_AS(bad.validate(), PreconditionError);
}

TEST_CASE("small exact values against factorization") {
    EngineConfig cfg = small_config();
    cfg.u = 20;
    CHECK(mertens_exact(100, cfg).value == oracle_m()[100]);
    CHECK(oracle_m()[100] == 1);

    CHECK(mertens_exact(10000).value == -23);
    CHECK(mertens_exact(1000000).value == 212);
    CHECK(oracle_m()[1000000] == 212);
    CHECK(mertens_exact(2).value == 0);
    CHECK(mertens_exact(1).value == 1);
    CHECK(mertens_exact(3).value == -1);
    CHECK(mertens_exact(4).value == -1);
}

TEST_CASE("exhaustive agreement with factorization for n <= 3000") {
    for (u64 n = 1; n <= 3000; ++n) REQUIRE(mertens_exact(n).value == oracle_m()[n]);
}

TEST_CASE("every array element is exact") {
    const u64 n = 100000;
    const MertensResult r = mertens_exact(n);
    REQUIRE(r.by_index.size() == n / r.u);
    for (u64 k = 1; k <= r.by_index.size(); ++k) REQUIRE(r.by_index[k - 1] == oracle_m()[n / k]);
}

TEST_CASE("standard identity over the full quotient map") {
    for (u64 n : {u64{10}, u64{997}, u64{65536}, u64{1000000}}) {
        EngineConfig cfg;
        cfg.capture_small_quotients = true;
        const MertensResult r = mertens_exact(n, cfg);
        // sum_{x=1}^{n} M(floor(n/x)), grouped by distinct quotient
        i64 total = 0;
        for (u64 x = 1; x <= n;) {
            const u64 q = n / x;
            const u64 x_next = n / q + 1;
            const auto m = r.at_quotient(x);
            REQUIRE(m.has_value());
            REQUIRE(*m == oracle_m()[q]);
            total += static_cast<i64>(x_next - x) * *m;
            x = x_next;
        }
        CHECK(total == 1);
    }
}

TEST_CASE("hand trace of the first block for n = 30") {
    // u = 7: K = 4, targets 30, 15, 10, 7. Block [1,1] adds only grouped
    // terms -(floor(v/1) - floor(v/2)) * M(1).
    HarmonicArray arr(30, 7);
    REQUIRE(arr.size() == 4);
    const MoebiusSieve sieve(7);
    const DivisorTable table = build_table(16);
    MoebiusBlock b1 = sieve.sieve(1, 1);
    accumulate_mertens(b1, 0);
    arr.apply_block(b1, table, {});
    const auto& acc = arr.raw_accumulators();
    CHECK(static_cast<i64>(acc[1]) == 1 - (30 - 15));
    CHECK(static_cast<i64>(acc[2]) == 1 - (15 - 7));
    CHECK(static_cast<i64>(acc[3]) == 1 - (10 - 5));
    CHECK(static_cast<i64>(acc[4]) == 1 - (7 - 3));

    MoebiusBlock rest = sieve.sieve(2, 7);
    accumulate_mertens(rest, b1.m_end);
    arr.apply_block(rest, table, {});
    arr.finalize();
    CHECK(arr.value(1) == -3);
    CHECK(arr.value(2) == oracle_m()[15]);
    CHECK(arr.value(4) == oracle_m()[7]);
}

TEST_CASE("block contract violations") {
    HarmonicArray arr(1000, 100);
    const MoebiusSieve sieve(100);
    const DivisorTable table = build_table(64);
    MoebiusBlock b = sieve.sieve(1, 50);
    accumulate_mertens(b, 0);
    MoebiusBlock skip = sieve.sieve(60, 100);
    accumulate_mertens(skip, 0);
    MoebiusBlock no_prefix = sieve.sieve(1, 50);

    CHECK_THROWS_AS(arr.apply_block(no_prefix, table, {}), PreconditionError);
    CHECK_THROWS_AS(arr.apply_block(skip, table, {}), PreconditionError);
    arr.apply_block(b, table, {});
    CHECK_THROWS_AS(arr.apply_block(b, table, {}), PreconditionError);
    CHECK_THROWS_AS(arr.finalize(), PreconditionError);
    CHECK_THROWS_AS(arr.value(1), PreconditionError);
}

TEST_CASE("random n up to 10^8 match the naive oracle") {
    std::mt19937_64 rng(99);
    std::vector<u64> ns;
    for (int i = 0; i < 12; ++i) ns.push_back(1 + rng() % 100000000);
    const auto naive = mertens_naive_many(ns);
    for (std::size_t i = 0; i < ns.size(); ++i) CHECK(mertens_exact(ns[i]).value == naive[i]);
}

TEST_CASE("result does not depend on u, block length, sieve strategy or workers") {
    const u64 n = 30000000;
    const i64 expect = mertens_naive(n);
    const u64 s = ceil_sqrt(n);
    for (u64 u : {s + 1, u64{50000}, u64{200000}, u64{3000000}}) {
        EngineConfig cfg;
        cfg.u = u;
        const u64 root = ceil_sqrt(u);
        for (u64 len : {root, 4 * root}) {
            cfg.block_len = len;
            REQUIRE(mertens_exact(n, cfg).value == expect);
        }
    }
    EngineConfig naive_cfg;
    naive_cfg.sieve = MoebiusSieve::Strategy::naive;
    CHECK(mertens_exact(n, naive_cfg).value == expect);

    EngineConfig tiny_table;
    tiny_table.divisor_cap = 10;
    CHECK(mertens_exact(n, tiny_table).value == expect);

    for (unsigned w : {1u, 3u}) {
        set_worker_count(w);
        CHECK(mertens_exact(n).value == expect);
    }
    set_worker_count(0);

    EngineConfig explicit_bad;
    explicit_bad.u = s - 1;
    CHECK_THROWS_AS(mertens_exact(n, explicit_bad), PreconditionError);
}

TEST_CASE("simultaneous quotients agree with direct runs") {
    const u64 n = 100000000;
    const MertensResult r = mertens_exact(n);
    for (u64 c : {2, 3, 7, 10, 100}) {
        REQUIRE(r.at_quotient(c).has_value());
        CHECK(*r.at_quotient(c) == mertens_exact(n / c).value);
    }
}

TEST_CASE("several targets share one sieve") {
    const std::vector<u128> ns = {123456789, 123456790, 100000000, 5, 77777777};
    const auto rs = mertens_many(ns);
    REQUIRE(rs.size() == ns.size());
    for (std::size_t i = 0; i < ns.size(); ++i) CHECK(rs[i].value == mertens_exact(ns[i]).value);
    CHECK(rs[3].value == -2);
}

TEST_CASE("mertens_naive") {
    CHECK(mertens_naive(1) == 1);
    CHECK(mertens_naive(0) == 0);
    CHECK(mertens_naive(10000) == -23);
    CHECK(mertens_naive(1000000) == 212);
    CHECK_THROWS_AS(mertens_naive(100, 50), PreconditionError);
    CHECK(mertens_naive_many({10000, 1, 1000000, 10000}) == std::vector<i64>{-23, 1, 212, -23});
}

TEST_CASE("checkpoint encoding is little-endian and lossless") {
    Checkpoint cp;
    cp.n = (static_cast<u128>(0x0102) << 64) | 0x1122334455667788ull;
    cp.u = 42;
    cp.next_y1 = 7;
    cp.m_prev = -3;
    cp.acc = {1, ~u64{0}, 0x8000000000000000ull};
    const std::string bytes = encode_checkpoint(cp);
    REQUIRE(bytes.size() == 64 + 24);
    CHECK(bytes.substr(0, 8) == "MERTCKPT");
    CHECK(static_cast<unsigned char>(bytes[16]) == 0x88);
    CHECK(static_cast<unsigned char>(bytes[24]) == 0x02);
    CHECK(static_cast<unsigned char>(bytes[48]) == 0xFD);

    std::mt19937_64 rng(8);
    for (int i = 0; i < 50; ++i) {
        Checkpoint c;
        c.n = (static_cast<u128>(rng()) << 64) | rng();
        c.u = rng();
        c.next_y1 = rng();
        c.m_prev = static_cast<i64>(rng());
        c.acc.resize(rng() % 100);
        for (auto& a : c.acc) a = rng();
        const Checkpoint d = decode_checkpoint(encode_checkpoint(c));
        REQUIRE(d.n == c.n);
        REQUIRE(d.u == c.u);
        REQUIRE(d.next_y1 == c.next_y1);
        REQUIRE(d.m_prev == c.m_prev);
        REQUIRE(d.acc == c.acc);
    }
    CHECK_THROWS_AS(decode_checkpoint(bytes.substr(0, 70)), ParseError);
    CHECK_THROWS_AS(decode_checkpoint("NOTMAGIC" + bytes.substr(8)), ParseError);
}

TEST_CASE("a run resumed from a checkpoint gives the same answer") {
    const u64 n = 50000000;
    const u64 u = 300000;
    HarmonicArray first(n, u);
    const MoebiusSieve sieve(u);
    const DivisorTable table = build_table(4096);
    i64 m_run = 0;
    u64 y = 1;
    for (int i = 0; i < 3; ++i) {
        MoebiusBlock b = sieve.sieve(y, y + 9999);
        accumulate_mertens(b, m_run);
        first.apply_block(b, table, {});
        m_run = b.m_end;
        y += 10000;
    }
    Checkpoint cp;
    cp.n = n;
    cp.u = u;
    cp.next_y1 = y;
    cp.m_prev = m_run;
    cp.acc.assign(first.raw_accumulators().begin() + 1, first.raw_accumulators().end());
    const std::string path = (std::filesystem::temp_directory_path() / "mertens_test.ckpt").string();
    write_checkpoint(path, cp);

    EngineConfig cfg;
    cfg.u = u;
    cfg.checkpoint_path = path;
    CHECK(mertens_exact(n, cfg).value == mertens_naive(n));
    CHECK_FALSE(std::filesystem::exists(path));

    // a checkpoint from another job is refused
    cp.n = n + 1;
    write_checkpoint(path, cp);
    CHECK_THROWS_AS(mertens_exact(n, cfg), PreconditionError);
    std::filesystem::remove(path);
}

