#include "mertens/zeros.hpp"

#include <boost/multiprecision/cpp_dec_float.hpp>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "mertens/errors.hpp"

namespace mertens {

namespace {

using Dec = boost::multiprecision::number<boost::multiprecision::cpp_dec_float<50>>;

const Dec& pi_dec() {
    static const Dec pi("3.14159265358979323846264338327950288419716939937510582097494459");
    return pi;
}

const Dec& two_pi_dec() {
    static const Dec two_pi = 2 * pi_dec();
    return two_pi;
}

// Into [-pi, pi).
Dec reduce(const Dec& x) {
    Dec k = floor((x + pi_dec()) / two_pi_dec());
    Dec r = x - k * two_pi_dec();
    if (r >= pi_dec()) r -= two_pi_dec();
    if (r < -pi_dec()) r += two_pi_dec();
    return r;
}

std::string fixed_str(const Dec& x, int decimals) {
    std::string s = x.str(decimals, std::ios_base::fixed);
    if (s.find('.') != std::string::npos) {
        while (s.back() == '0') s.pop_back();
        if (s.back() == '.') s.pop_back();
    }
    if (s == "-0") s = "0";
    return s;
}

double to_double(std::string_view dec) { return std::strtod(std::string(dec).c_str(), nullptr); }

// Absolute error bound of a decimal master: half a unit in its last place.
Dec master_ulp(std::string_view dec) {
    std::string s(dec);
    int exp10 = 0;
    if (auto e = s.find_first_of("eE"); e != std::string::npos) {
        exp10 = std::atoi(s.c_str() + e + 1);
        s.resize(e);
    }
    if (auto dot = s.find('.'); dot != std::string::npos) exp10 -= static_cast<int>(s.size() - dot - 1);
    return Dec(5) * pow(Dec(10), exp10 - 1);
}

ZeroEntry make_entry(std::string z, std::string a, std::string b) {
    ZeroEntry e;
    e.z = to_double(z);
    e.a = to_double(a);
    e.b = to_double(b);
    e.z_dec = std::move(z);
    e.a_dec = std::move(a);
    e.b_dec = std::move(b);
    return e;
}

void check_phase_precision(const ZeroTable& table, const Dec& x, const std::string& x_str) {
    if (x == 0 || table.empty()) return;
    // z x0 carries about 50 - log10(z x0) fractional digits
    const double digits_left = 49 - std::log10(std::max(1.0, table.entries.back().z * x.convert_to<double>()));
    if (digits_left < 12) throw PrecisionError("x0 = " + x_str + " exceeds the 50-digit working precision");
    for (std::size_t i = 0; i < table.size(); ++i) {
        const std::string& z = table.entries[i].z_dec;
        if (master_ulp(z) * x > Dec("1e-7"))
            throw PrecisionError("zero " + std::to_string(i + 1) + " has " + std::to_string(significant_digits(z)) +
                                 " significant digits, too few to fix its phase at x0 = " + x_str);
    }
}

}  // namespace

bool is_decimal(std::string_view s) {
    std::size_t i = 0;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
    std::size_t digits = 0;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i, ++digits;
    if (i < s.size() && s[i] == '.') {
        ++i;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i, ++digits;
    }
    if (digits == 0) return false;
    if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
        ++i;
        if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
        std::size_t exp_digits = 0;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i, ++exp_digits;
        if (exp_digits == 0 || exp_digits > 4) return false;
    }
    return i == s.size();
}

int significant_digits(std::string_view dec) {
    int count = 0;
    bool leading = true;
    for (char c : dec) {
        if (c == 'e' || c == 'E') break;
        if (!std::isdigit(static_cast<unsigned char>(c))) continue;
        if (leading && c == '0') continue;
        leading = false;
        ++count;
    }
    return count;
}

ZeroTable load_table(std::istream& in) {
    ZeroTable table;
    std::string line;
    std::size_t lineno = 0;
    const Dec& pi = pi_dec();
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) {
            std::string_view comment = std::string_view(line).substr(hash + 1);
            while (!comment.empty() && comment.front() == ' ') comment.remove_prefix(1);
            if (comment.rfind("source:", 0) == 0) {
                comment.remove_prefix(7);
                while (!comment.empty() && comment.front() == ' ') comment.remove_prefix(1);
                table.source = std::string(comment);
            }
            line.resize(hash);
        }
        std::istringstream fields(line);
        std::string z, a, b, extra;
        if (!(fields >> z)) continue;
        if (!(fields >> a >> b)) throw ParseError("expected three fields `z a b`", lineno);
        if (fields >> extra) throw ParseError("unexpected field '" + extra + "'", lineno);
        for (const std::string* f : {&z, &a, &b})
            if (!is_decimal(*f)) throw ParseError("not a decimal number: '" + *f + "'", lineno);

        const Dec zd(z), ad(a), bd(b);
        if (zd <= 14) throw ParseError("z must exceed 14 (first zero is 14.1347...)", lineno);
        if (ad <= 0) throw ParseError("a must be positive", lineno);
        if (bd < -pi || bd >= pi) throw ParseError("b outside [-pi, pi)", lineno);
        if (!table.entries.empty() && zd <= Dec(table.entries.back().z_dec))
            throw ParseError("z not strictly increasing", lineno);
        table.entries.push_back(make_entry(std::move(z), std::move(a), std::move(b)));
    }
    if (in.bad()) throw Error("read error");
    return table;
}

ZeroTable load_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open zero table '" + path + "'");
    return load_table(in);
}

ZeroTable parse_table(std::string_view text) {
    std::istringstream in{std::string(text)};
    return load_table(in);
}

void save_table(std::ostream& out, const ZeroTable& table) {
    out << "# columns: z a b  with rho = 1/2 + i z, a = 1/|rho zeta'(rho)|, b = -arg(rho zeta'(rho))\n";
    if (!table.source.empty()) out << "# source: " << table.source << '\n';
    for (const ZeroEntry& e : table.entries) out << e.z_dec << ' ' << e.a_dec << ' ' << e.b_dec << '\n';
}

void save_table(const std::string& path, const ZeroTable& table) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path + "'");
    save_table(out, table);
    if (!out) throw Error("write failed for '" + path + "'");
}

std::string decimal_add(std::string_view x, std::string_view y) {
    if (!is_decimal(x) || !is_decimal(y)) throw ParseError("not a decimal number");
    return fixed_str(Dec(std::string(x)) + Dec(std::string(y)), 30);
}

std::string decimal_add(std::string_view x, double y) {
    if (!is_decimal(x)) throw ParseError("not a decimal number: '" + std::string(x) + "'");
    return fixed_str(Dec(std::string(x)) + Dec(y), 30);
}

std::string decimal_add_scaled(std::string_view x, std::uint64_t k, double step) {
    if (!is_decimal(x)) throw ParseError("not a decimal number: '" + std::string(x) + "'");
    return fixed_str(Dec(std::string(x)) + Dec(k) * Dec(step), 30);
}

std::string round_decimal(std::string_view x, int decimals) {
    if (!is_decimal(x)) throw ParseError("not a decimal number: '" + std::string(x) + "'");
    return fixed_str(Dec(std::string(x)), decimals);
}

double reduce_phase(std::string_view x) {
    if (!is_decimal(x)) throw ParseError("not a decimal number: '" + std::string(x) + "'");
    return reduce(Dec(std::string(x))).convert_to<double>();
}

ShiftedTable rebase(const ZeroTable& table, std::string_view x0) {
    if (!is_decimal(x0)) throw ParseError("x0 is not a decimal number: '" + std::string(x0) + "'");
    const Dec x(std::string{x0});
    if (x < 0) throw PreconditionError("rebase requires x0 >= 0");

    ShiftedTable out;
    out.x0 = fixed_str(x, 30);
    out.masters.source = table.source;
    out.masters.entries.reserve(table.size());
    const std::size_t n = table.size();
    out.z.resize(n);
    out.z_lo.resize(n);
    out.a.resize(n);
    out.b.resize(n);
    check_phase_precision(table, x, out.x0);

    for (std::size_t i = 0; i < n; ++i) {
        const ZeroEntry& e = table.entries[i];
        const Dec z(e.z_dec);
        const Dec shifted = reduce(Dec(e.b_dec) + z * x);
        ZeroEntry m = e;
        m.b_dec = x == 0 ? e.b_dec : fixed_str(shifted, 30);
        m.b = to_double(m.b_dec);
        if (m.b >= M_PI) m.b = -M_PI;  // rounding of a phase just below pi
        out.z[i] = e.z;
        out.z_lo[i] = (z - Dec(e.z)).convert_to<double>();
        out.a[i] = e.a;
        out.b[i] = m.b;
        out.masters.entries.push_back(std::move(m));
    }
    return out;
}

ShiftedTable rebase(const ShiftedTable& shifted, std::string_view dx) {
    const std::string total = decimal_add(shifted.x0, dx);
    check_phase_precision(shifted.masters, Dec(total), total);
    ShiftedTable out = rebase(shifted.masters, dx);
    out.x0 = total;
    return out;
}

}  // namespace mertens
