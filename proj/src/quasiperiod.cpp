#include "mertens/quasiperiod.hpp"

#include <algorithm>
#include <boost/multiprecision/cpp_dec_float.hpp>
#include <cmath>
#include <string>

#include "mertens/errors.hpp"

namespace mertens {

namespace {

using Dec = boost::multiprecision::number<boost::multiprecision::cpp_dec_float<50>>;

struct Ratio {
    double hi, lo;  // z_k / z_1 = hi + lo to ~32 digits
};

void check_range(const ZeroTable& table, std::size_t k_lo, std::size_t k_hi) {
    if (k_lo < 1 || k_hi < k_lo || k_hi > table.size())
        throw PreconditionError("zero index range [" + std::to_string(k_lo) + ", " + std::to_string(k_hi) +
                                "] not covered by a table of " + std::to_string(table.size()));
}

Dec ratio_dec(const ZeroTable& table, std::size_t k) { return Dec(table.entries[k - 1].z_dec) / Dec(table.entries[0].z_dec); }

}  // namespace

double QuasiPeriod::max_residual() const {
    return residuals.empty() ? 0.0 : *std::max_element(residuals.begin(), residuals.end());
}

QuasiPeriod quasiperiod_at(const ZeroTable& table, std::size_t k_lo, std::size_t k_hi, std::uint64_t m) {
    check_range(table, k_lo, k_hi);
    QuasiPeriod qp;
    qp.m = m;
    qp.k_lo = k_lo;
    qp.k_hi = k_hi;
    const Dec two_pi = 2 * boost::multiprecision::acos(Dec(-1));
    qp.period_ln = (Dec(m) * two_pi / Dec(table.entries[0].z_dec)).convert_to<double>();
    for (std::size_t k = k_lo; k <= k_hi; ++k) {
        const Dec x = ratio_dec(table, k) * Dec(m);
        qp.residuals.push_back(abs(x - round(x)).convert_to<double>());
    }
    return qp;
}

QuasiPeriod find_quasiperiod(const ZeroTable& table, std::size_t k_lo, std::size_t k_hi, std::uint64_t m_max,
                             double tol) {
    check_range(table, k_lo, k_hi);
    if (m_max < 1) throw PreconditionError("m_max must be at least 1");
    if (m_max > (std::uint64_t{1} << 53)) throw PreconditionError("m_max above 2^53");
    std::vector<Ratio> ratios;
    for (std::size_t k = k_lo; k <= k_hi; ++k) {
        const Dec r = ratio_dec(table, k);
        const double hi = r.convert_to<double>();
        ratios.push_back({hi, (r - Dec(hi)).convert_to<double>()});
    }
    // the double-double product keeps residual errors near 1e-16 m, far below tol
    for (std::uint64_t m = 1; m <= m_max; ++m) {
        const double md = static_cast<double>(m);
        bool ok = true;
        for (const Ratio& r : ratios) {
            const double p = r.hi * md;
            const double e = std::fma(r.hi, md, -p) + r.lo * md;
            if (std::fabs(p - std::nearbyint(p) + e) >= tol) {
                ok = false;
                break;
            }
        }
        if (ok) {
            QuasiPeriod qp = quasiperiod_at(table, k_lo, k_hi, m);
            if (qp.max_residual() < tol) return qp;
        }
    }
    throw NotFoundError("no multiplier m <= " + std::to_string(m_max) + " brings zeros " + std::to_string(k_lo) +
                        ".." + std::to_string(k_hi) + " within " + std::to_string(tol) + " of a period");
}

}  // namespace mertens
