#pragma once

// Near-periods of a partial explicit-formula sum. q restricted to zeros
// k_lo..k_hi repeats (up to small phase drift) after m * 2pi / z_1 in ln x
// whenever every (z_k / z_1) m is close to an integer.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "mertens/zeros.hpp"

namespace mertens {

struct QuasiPeriod {
    std::uint64_t m = 0;
    double period_ln = 0;           // m 2pi / z_1
    std::size_t k_lo = 0, k_hi = 0;  // 1-based zero indices covered
    std::vector<double> residuals;   // |(z_k/z_1) m - nearest integer|, k = k_lo..k_hi
    double max_residual() const;
};

// Residuals of a given multiplier; ratios come from the decimal masters.
QuasiPeriod quasiperiod_at(const ZeroTable& table, std::size_t k_lo, std::size_t k_hi, std::uint64_t m);

// Smallest m in [1, m_max] whose residuals are all below tol. NotFoundError
// when there is none.
QuasiPeriod find_quasiperiod(const ZeroTable& table, std::size_t k_lo, std::size_t k_hi, std::uint64_t m_max,
                             double tol = 0.01);

}  // namespace mertens
