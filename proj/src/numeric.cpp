#include "awalk/numeric.hpp"

#include "awalk/error.hpp"

#include <charconv>
#include <limits>
#include <system_error>

namespace awalk {

BigInt pow2(std::uint64_t n) {
    BigInt one = 1;
    return one << n;
}

std::string format_double(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

std::string format_hp(const HpFloat& x) {
    return x.str(std::numeric_limits<HpFloat>::max_digits10, std::ios_base::scientific);
}

std::string format_rational(const Rational& q) {
    if (denominator(q) == 1) return numerator(q).str();
    return numerator(q).str() + "/" + denominator(q).str();
}

double to_double(const Rational& q) {
    // cpp_rational's own conversion may round twice; go through the 256-bit float.
    HpFloat num(numerator(q));
    HpFloat den(denominator(q));
    return static_cast<double>(num / den);
}

double parse_double(const std::string& text) {
    double value = 0.0;
    const char* first = text.data();
    const char* last = first + text.size();
    if (first != last && *first == '+') ++first;
    auto res = std::from_chars(first, last, value);
    if (res.ec != std::errc{} || res.ptr != last || text.empty())
        throw DomainError("not a decimal number: '" + text + "'");
    return value;
}

std::int64_t parse_int(const std::string& text) {
    std::int64_t value = 0;
    const char* first = text.data();
    const char* last = first + text.size();
    if (first != last && *first == '+') ++first;
    auto res = std::from_chars(first, last, value);
    if (res.ec != std::errc{} || res.ptr != last || text.empty())
        throw DomainError("not an integer: '" + text + "'");
    return value;
}

}  // namespace awalk
