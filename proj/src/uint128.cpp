#include "mertens/uint128.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "mertens/errors.hpp"

namespace mertens {

namespace {

u128 checked_pow10(unsigned exponent) {
    u128 r = 1;
    for (unsigned i = 0; i < exponent; ++i) {
        if (r > u128_max / 10) throw ParseError("integer exponent overflows 128 bits");
        r *= 10;
    }
    return r;
}

u128 parse_digits(std::string_view text) {
    if (text.empty()) throw ParseError("empty integer");
    u128 r = 0;
    for (char c : text) {
        if (c == '_' || c == '\'') continue;
        if (c < '0' || c > '9') throw ParseError("invalid digit '" + std::string(1, c) + "' in integer");
        u128 d = static_cast<u128>(c - '0');
        if (r > (u128_max - d) / 10) throw ParseError("integer overflows 128 bits");
        r = r * 10 + d;
    }
    return r;
}

}  // namespace

u128 parse_u128(std::string_view text) {
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);

    std::size_t pos = text.find_first_of("eE");
    std::size_t caret = text.find('^');
    if (pos != std::string_view::npos || caret != std::string_view::npos) {
        // mantissa e exponent, or base ^ exponent (base must be 10)
        bool is_caret = caret != std::string_view::npos;
        std::size_t split = is_caret ? caret : pos;
        std::string_view head = text.substr(0, split);
        std::string_view tail = text.substr(split + 1);
        u128 e = parse_digits(tail);
        if (e > 40) throw ParseError("integer exponent overflows 128 bits");
        if (is_caret) {
            if (head != "10") throw ParseError("only powers of 10 are accepted in a^b form");
            return checked_pow10(static_cast<unsigned>(e));
        }
        u128 m = parse_digits(head);
        u128 p = checked_pow10(static_cast<unsigned>(e));
        if (m != 0 && m > u128_max / p) throw ParseError("integer overflows 128 bits");
        return m * p;
    }
    return parse_digits(text);
}

std::string to_string(u128 value) {
    if (value == 0) return "0";
    std::string s;
    while (value) {
        s.push_back(static_cast<char>('0' + static_cast<int>(value % 10)));
        value /= 10;
    }
    std::reverse(s.begin(), s.end());
    return s;
}

std::string to_string(i128 value) {
    if (value < 0) return "-" + to_string(static_cast<u128>(-(value + 1)) + 1);
    return to_string(static_cast<u128>(value));
}

u64 isqrt(u128 x) {
    if (x == 0) return 0;
    u128 r = static_cast<u128>(std::sqrt(static_cast<long double>(x)));
    // the long double estimate is within a few units; walk to the exact floor
    if (r > 0xFFFFFFFFFFFFFFFFull) r = 0xFFFFFFFFFFFFFFFFull;
    while (r * r > x) --r;
    while ((r + 1) <= 0xFFFFFFFFFFFFFFFFull && (r + 1) * (r + 1) <= x) ++r;
    return static_cast<u64>(r);
}

u64 icbrt(u128 x) {
    if (x == 0) return 0;
    u128 r = static_cast<u128>(std::cbrt(static_cast<long double>(x)));
    while (r > 0 && r * r * r > x) --r;
    while ((r + 1) * (r + 1) * (r + 1) <= x) ++r;
    return static_cast<u64>(r);
}

}  // namespace mertens
