#include "mertens/explicit_formula.hpp"

#include <cmath>
#include <string>

#include "mertens/errors.hpp"
#include "mertens/parallel.hpp"

namespace mertens {

namespace {

// Below this product the plain double phase is accurate to ~1e-9.
constexpr double split_above = 67108864.0;  // 2^26

void check_terms(const ShiftedTable& table, std::size_t n_terms) {
    if (n_terms > table.size())
        throw PreconditionError("n_terms = " + std::to_string(n_terms) + " exceeds table size " +
                                std::to_string(table.size()));
}

void check_envelope(const ShiftedTable& table, std::size_t n_terms, double delta) {
    if (n_terms == 0) return;
    if (!(std::fabs(table.z[n_terms - 1] * delta) < phase_envelope))
        throw PrecisionError("|z delta| beyond 2^40 at delta = " + std::to_string(delta) + "; rebase closer");
}

double q_kernel(const ShiftedTable& table, std::size_t begin, std::size_t n_terms, double delta) {
    const double* z = table.z.data();
    const double* zl = table.z_lo.data();
    const double* a = table.a.data();
    const double* b = table.b.data();
    double sum = 0;
    for (std::size_t i = begin; i < n_terms; ++i) {
        const double p = z[i] * delta;
        double c;
        if (std::fabs(p) < split_above) {
            c = std::cos(p + (zl[i] * delta + b[i]));
        } else {
            // p is exact as a double; the rounding error of z delta, the
            // dropped digits of z and the phase go into a small remainder
            const double r = std::fma(z[i], delta, -p) + zl[i] * delta + b[i];
            c = std::cos(p) * std::cos(r) - std::sin(p) * std::sin(r);
        }
        sum += a[i] * c;
    }
    return 2 * sum;
}

}  // namespace

double q_eval(const ShiftedTable& table, std::size_t n_terms, double delta) {
    check_terms(table, n_terms);
    check_envelope(table, n_terms, delta);
    return q_kernel(table, 0, n_terms, delta);
}

double q_partial(const ShiftedTable& table, std::size_t begin, std::size_t end, double delta) {
    check_terms(table, end);
    if (begin > end) throw PreconditionError("q_partial needs begin <= end");
    check_envelope(table, end, delta);
    return q_kernel(table, begin, end, delta);
}

std::vector<double> q_batch(const ShiftedTable& table, std::size_t n_terms, double delta_start, double step,
                            std::size_t count) {
    check_terms(table, n_terms);
    std::vector<double> out(count);
    if (count == 0) return out;
    check_envelope(table, n_terms, delta_start);
    check_envelope(table, n_terms, delta_start + static_cast<double>(count - 1) * step);
    parallel_for(count, [&](std::uint64_t j) {
        out[j] = q_kernel(table, 0, n_terms, delta_start + static_cast<double>(j) * step);
    });
    return out;
}

double q_at(const ZeroTable& table, std::size_t n_terms, std::string_view ln_x) {
    if (n_terms > table.size()) throw PreconditionError("n_terms exceeds table size");
    const double approx = std::strtod(std::string(ln_x).c_str(), nullptr);
    const double z_max = n_terms ? table.entries[n_terms - 1].z : 0;
    if (std::fabs(approx) * z_max < split_above) {
        ShiftedTable t = rebase(ZeroTable{{table.entries.begin(), table.entries.begin() + n_terms}, table.source}, "0");
        return q_kernel(t, 0, n_terms, approx);
    }
    ShiftedTable t = rebase(ZeroTable{{table.entries.begin(), table.entries.begin() + n_terms}, table.source}, ln_x);
    return q_kernel(t, 0, n_terms, 0.0);
}

double q_sigma(const ZeroTable& table, std::size_t n_terms) {
    if (n_terms > table.size()) throw PreconditionError("n_terms exceeds table size");
    double s = 0;
    for (std::size_t i = 0; i < n_terms; ++i) s += table.entries[i].a * table.entries[i].a;
    return std::sqrt(2 * s);
}

double q_bound(const ZeroTable& table, std::size_t n_terms) {
    if (n_terms > table.size()) throw PreconditionError("n_terms exceeds table size");
    double s = 0;
    for (std::size_t i = 0; i < n_terms; ++i) s += table.entries[i].a;
    return 2 * s;
}

ResidualStats residual_stats(const std::vector<std::pair<double, double>>& pairs) {
    if (pairs.size() < 2) throw PreconditionError("residual_stats needs at least two samples");
    ResidualStats st;
    st.count = pairs.size();
    for (const auto& [exact, approx] : pairs) st.mean += exact - approx;
    st.mean /= static_cast<double>(pairs.size());
    double ss = 0;
    for (const auto& [exact, approx] : pairs) {
        const double d = exact - approx - st.mean;
        ss += d * d;
    }
    st.std = std::sqrt(ss / static_cast<double>(pairs.size() - 1));
    return st;
}

}  // namespace mertens
