#pragma once

// Tables of zeta zeros rho_i = 1/2 + i z_i with the explicit-formula weights
//   a_i = 1 / |rho_i zeta'(rho_i)|,   b_i = -arg(rho_i zeta'(rho_i)).
//
// Every field keeps the decimal string it was read from (the master) next to
// the nearest double. Phase arithmetic goes through the masters; evaluation
// uses the doubles.
//
// File format: one entry per line, three whitespace-separated decimals
// `z a b`; blank lines and text after `#` are ignored. A comment line of the
// form `# source: ...` sets ZeroTable::source.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace mertens {

struct ZeroEntry {
    std::string z_dec, a_dec, b_dec;
    double z = 0, a = 0, b = 0;
};

struct ZeroTable {
    std::vector<ZeroEntry> entries;
    std::string source;

    std::size_t size() const { return entries.size(); }
    bool empty() const { return entries.empty(); }
};

// z > 14, a > 0, -pi <= b < pi, z strictly increasing. Errors carry the
// 1-based line number.
ZeroTable load_table(std::istream& in);
ZeroTable load_table(const std::string& path);
ZeroTable parse_table(std::string_view text);

void save_table(std::ostream& out, const ZeroTable& table);
void save_table(const std::string& path, const ZeroTable& table);

// Phases moved to the origin x0 of ln-x space:  b'_i = (b_i + z_i x0) mod 2pi
// in [-pi, pi), computed in 50-digit decimal arithmetic and rounded once.
// z_lo_i = z_i(master) - z_i(double) restores the digits the double drops.
struct ShiftedTable {
    std::string x0 = "0";
    ZeroTable masters;  // z and a unchanged, b holds b'
    std::vector<double> z, z_lo, a, b;

    std::size_t size() const { return z.size(); }
};

// Largest |z_i delta| for which evaluation keeps about six correct digits.
inline constexpr double phase_envelope = 1099511627776.0;  // 2^40

// Throws PrecisionError when the masters' digits cannot pin the phase at x0
// (error in z_i x0 above 1e-7 for some entry), PreconditionError for x0 < 0.
ShiftedTable rebase(const ZeroTable& table, std::string_view x0);
// Moves an already shifted table by dx further; x0 accumulates exactly.
ShiftedTable rebase(const ShiftedTable& shifted, std::string_view dx);

// Significant digits in a decimal string ("14.1347" -> 6, "0.0891" -> 3).
int significant_digits(std::string_view dec);

// Decimal helpers shared by the scanner and the CLI.
std::string decimal_add(std::string_view x, std::string_view y);
std::string decimal_add(std::string_view x, double y);
// x + k * step without rounding the product.
std::string decimal_add_scaled(std::string_view x, std::uint64_t k, double step);
// x rounded to at most `decimals` fractional digits, trailing zeros dropped.
std::string round_decimal(std::string_view x, int decimals);
// x mod 2pi in [-pi, pi), evaluated in 50-digit arithmetic.
double reduce_phase(std::string_view x);
bool is_decimal(std::string_view s);

}  // namespace mertens
