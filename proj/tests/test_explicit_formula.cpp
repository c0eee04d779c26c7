#include <cmath>
#include <random>

#include "doctest.h"
#include "mertens/engine.hpp"
#include "mertens/errors.hpp"
#include "mertens/explicit_formula.hpp"
#include "mp_oracle.hpp"

using namespace mertens;

namespace {

const ZeroTable& bundled() {
    static const ZeroTable t = load_table(std::string(MERTENS_DATA_DIR) + "/zeros_2000.txt");
    return t;
}

ZeroTable synthetic(double z, double a, double b) {
    ZeroTable t;
    ZeroEntry e;
    e.z = z, e.a = a, e.b = b;
    e.z_dec = std::to_string(z), e.a_dec = std::to_string(a), e.b_dec = std::to_string(b);
    t.entries.push_back(e);
    return t;
}

std::vector<mp_oracle::Term> terms(std::size_t n) {
    std::vector<mp_oracle::Term> out;
    for (std::size_t i = 0; i < n; ++i) {
        const ZeroEntry& e = bundled().entries[i];
        out.push_back({e.z_dec, e.a_dec, e.b_dec});
    }
    return out;
}

}  // namespace

TEST_CASE("q_eval examples") {
    const ShiftedTable empty = rebase(ZeroTable{}, "0");
    CHECK(q_eval(empty, 0, 1.5) == 0.0);
    const ShiftedTable one = rebase(synthetic(1, 0.5, 0), "0");
    CHECK(q_eval(one, 1, 0.0) == 1.0);
    CHECK(q_eval(one, 1, M_PI) == doctest::Approx(-1.0));
    CHECK(q_eval(one, 0, 0.0) == 0.0);
    CHECK_THROWS_AS(q_eval(one, 2, 0.0), PreconditionError);
}

TEST_CASE("q_eval against the 256-bit oracle") {
    const ShiftedTable t = rebase(bundled(), "0");
    for (const char* ln_x : {"20.5", "23.02585092994045684017991454684", "43.897536"}) {
        const double expect = mp_oracle::q(terms(2000), ln_x);
        CHECK(q_eval(t, 2000, std::strtod(ln_x, nullptr)) == doctest::Approx(expect).epsilon(1e-9));
    }
    // wide phases take the split path
    const double delta = 12345.678;
    CHECK(std::fabs(q_eval(t, 2000, delta) - mp_oracle::q(terms(2000), "12345.678")) < 1e-8);
    CHECK(std::fabs(q_eval(t, 2000, 1e6 + 0.25) - mp_oracle::q(terms(2000), "1000000.25")) < 1e-7);
}

TEST_CASE("q_at near the 1.16e19 extreme") {
    // ln(1.16e19)
    const std::string ln_x = "43.89753645747018036935155476449";
    const double q = q_at(bundled(), 2000, ln_x);
    CHECK(q == doctest::Approx(mp_oracle::q(terms(2000), ln_x)).epsilon(1e-9));
    CHECK(q < -0.5);
    CHECK(q > -0.65);
}

TEST_CASE("q_at far out rebases") {
    const std::string ln_x = "100000000000.5";
    const double expect = mp_oracle::q(terms(300), ln_x);
    CHECK(std::fabs(q_at(bundled(), 300, ln_x) - expect) < 1e-9);
}

TEST_CASE("envelope") {
    const ShiftedTable t = rebase(bundled(), "0");
    CHECK_THROWS_AS(q_eval(t, 10, 1e12), PrecisionError);
    CHECK_NOTHROW(q_eval(t, 10, 1e9));
    CHECK_THROWS_AS(q_batch(t, 10, 0.0, 1e10, 200), PrecisionError);
}

TEST_CASE("q_batch") {
    const ShiftedTable t = rebase(bundled(), "1000");
    CHECK(q_batch(t, 100, 0.25, 0.1, 1)[0] == q_eval(t, 100, 0.25));
    for (double v : q_batch(t, 100, 0.25, 0.0, 5)) CHECK(v == q_eval(t, 100, 0.25));
    const auto grid = q_batch(t, 2000, -1.0, 7.2349e-5, 10000);
    double worst = 0;
    for (std::size_t j = 0; j < grid.size(); ++j)
        worst = std::max(worst, std::fabs(grid[j] - q_eval(t, 2000, -1.0 + static_cast<double>(j) * 7.2349e-5)));
    CHECK(worst < 1e-12);
    CHECK(q_batch(t, 10, 0.0, 1.0, 0).empty());
}

TEST_CASE("bound and rebase invariance") {
    const double bound = q_bound(bundled(), 2000);
    const ShiftedTable near = rebase(bundled(), "5000");
    const ShiftedTable far = rebase(bundled(), "5000.75");
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> d(0.0, 10.0);
    for (int i = 0; i < 200; ++i) {
        const double delta = d(rng);
        const double a = q_eval(near, 2000, delta);
        REQUIRE(std::fabs(a) <= bound);
        REQUIRE(std::fabs(a - q_eval(far, 2000, delta - 0.75)) < 1e-9);
    }
}

TEST_CASE("q_sigma") {
    CHECK(q_sigma(ZeroTable{}, 0) == 0.0);
    CHECK(q_sigma(synthetic(20, 1, 0), 1) == doctest::Approx(std::sqrt(2.0)));
    // frozen for the bundled 2000 zeros
    CHECK(q_sigma(bundled(), 2000) == doctest::Approx(0.170179).epsilon(1e-5));
    CHECK(q_sigma(bundled(), 2000) > q_sigma(bundled(), 1000));
    CHECK_THROWS_AS(q_sigma(bundled(), 2001), PreconditionError);
}

TEST_CASE("residual_stats") {
    const auto same = residual_stats({{0.1, 0.1}, {0.2, 0.2}, {-0.3, -0.3}});
    CHECK(same.std == 0.0);
    CHECK(same.mean == 0.0);
    const auto pm = residual_stats({{0.5, 0.5 - 0.01}, {0.5, 0.5 + 0.01}});
    CHECK(pm.std == doctest::Approx(0.01 * std::sqrt(2.0)));
    CHECK(pm.count == 2);
    CHECK_THROWS_AS(residual_stats({{1, 1}}), PreconditionError);
}

TEST_CASE("more zeros fit exact values better") {
    std::mt19937_64 rng(17);
    std::vector<u128> ns;
    for (int i = 0; i < 100; ++i) ns.push_back(1000000 + rng() % 99000000);
    const auto exact = mertens_many(ns);
    const ShiftedTable t = rebase(bundled(), "0");
    double prev = 1e300;
    for (std::size_t n_terms : {50u, 200u, 1000u, 2000u}) {
        double ss = 0;
        for (std::size_t i = 0; i < ns.size(); ++i) {
            const double x = static_cast<double>(ns[i]);
            const double r = static_cast<double>(exact[i].value) / std::sqrt(x) - q_eval(t, n_terms, std::log(x));
            ss += r * r;
        }
        const double mse = ss / static_cast<double>(ns.size());
        MESSAGE("terms " << n_terms << ": mean square residual " << mse);
        CHECK(mse <= prev * 1.05);
        prev = mse;
    }
}
