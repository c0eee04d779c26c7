#pragma once

// Truncated explicit formula for M(x)/sqrt(x):
//   q_n(x) = 2 sum_{i<=n} a_i cos(z_i ln x + b_i).
// Evaluation works in the shifted frame of a ShiftedTable, with
// delta = ln x - x0, so that z_i delta stays small enough for doubles.

#include <cstddef>
#include <string_view>
#include <utility>
#include <vector>

#include "mertens/zeros.hpp"

namespace mertens {

// 2 sum_{i<n_terms} a_i cos(z_i delta + b'_i), summed in ascending i.
// Throws PrecisionError if |z_i delta| reaches phase_envelope for a used term.
double q_eval(const ShiftedTable& table, std::size_t n_terms, double delta);

// The same sum restricted to terms [begin, end).
double q_partial(const ShiftedTable& table, std::size_t begin, std::size_t end, double delta);

// q_eval at delta_start + j step, j < count. Point j is bit-identical to
// q_eval(table, n_terms, delta_start + j * step).
std::vector<double> q_batch(const ShiftedTable& table, std::size_t n_terms, double delta_start, double step,
                            std::size_t count);

// q at ln x given as a decimal; rebases when ln x is too far from the origin.
double q_at(const ZeroTable& table, std::size_t n_terms, std::string_view ln_x);

// sqrt(2 sum a_i^2): standard deviation of q_n for phases spread uniformly.
double q_sigma(const ZeroTable& table, std::size_t n_terms);

// 2 sum a_i: bound on |q_n|.
double q_bound(const ZeroTable& table, std::size_t n_terms);

struct ResidualStats {
    double mean = 0;
    double std = 0;  // sample convention (n - 1)
    std::size_t count = 0;
};

// Statistics of exact - approx over (exact, approx) pairs; needs two pairs.
ResidualStats residual_stats(const std::vector<std::pair<double, double>>& pairs);

}  // namespace mertens
