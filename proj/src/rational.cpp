#include "mermin/rational.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <stdexcept>
#include <system_error>

namespace mermin {
namespace {

using boost::multiprecision::cpp_int;

cpp_int parse_integer(std::string_view digits, std::string_view whole)
{
    if (digits.empty()) {
        throw std::invalid_argument("malformed number: '" + std::string(whole) + "'");
    }
    for (char c : digits) {
        if (!std::isdigit(static_cast<unsigned char>(c))) {
            throw std::invalid_argument("malformed number: '" + std::string(whole) + "'");
        }
    }
    // cpp_int's string constructor reads a leading 0 as an octal prefix.
    const auto first = digits.find_first_not_of('0');
    if (first == std::string_view::npos) return cpp_int(0);
    return cpp_int(std::string(digits.substr(first)));
}

std::string_view trim(std::string_view s)
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

Rational parse_decimal(std::string_view text, std::string_view whole)
{
    bool negative = false;
    if (!text.empty() && (text.front() == '-' || text.front() == '+')) {
        negative = text.front() == '-';
        text.remove_prefix(1);
    }

    long long exponent = 0;
    if (auto e = text.find_first_of("eE"); e != std::string_view::npos) {
        auto exp_text = text.substr(e + 1);
        bool exp_negative = false;
        if (!exp_text.empty() && (exp_text.front() == '-' || exp_text.front() == '+')) {
            exp_negative = exp_text.front() == '-';
            exp_text.remove_prefix(1);
        }
        long long magnitude = 0;
        auto [ptr, ec] = std::from_chars(exp_text.data(), exp_text.data() + exp_text.size(), magnitude);
        if (ec != std::errc{} || ptr != exp_text.data() + exp_text.size() || exp_text.empty()
            || magnitude > 4000) {
            throw std::invalid_argument("malformed exponent: '" + std::string(whole) + "'");
        }
        exponent = exp_negative ? -magnitude : magnitude;
        text = text.substr(0, e);
    }

    std::string digits;
    if (auto dot = text.find('.'); dot != std::string_view::npos) {
        auto int_part = text.substr(0, dot);
        auto frac_part = text.substr(dot + 1);
        if (int_part.empty() && frac_part.empty()) {
            throw std::invalid_argument("malformed number: '" + std::string(whole) + "'");
        }
        digits = std::string(int_part) + std::string(frac_part);
        exponent -= static_cast<long long>(frac_part.size());
    } else {
        digits = std::string(text);
    }

    cpp_int mantissa = parse_integer(digits, whole);
    if (negative) mantissa = -mantissa;

    cpp_int scale = boost::multiprecision::pow(cpp_int(10), static_cast<unsigned>(std::llabs(exponent)));
    return exponent >= 0 ? Rational(mantissa * scale) : Rational(mantissa, scale);
}

}  // namespace

Rational parse_rational(std::string_view text)
{
    const std::string_view whole = text;
    text = trim(text);
    if (text.empty()) {
        throw std::invalid_argument("empty number");
    }

    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        auto num_text = trim(text.substr(0, slash));
        auto den_text = trim(text.substr(slash + 1));
        bool negative = false;
        if (!num_text.empty() && (num_text.front() == '-' || num_text.front() == '+')) {
            negative = num_text.front() == '-';
            num_text.remove_prefix(1);
        }
        cpp_int num = parse_integer(num_text, whole);
        cpp_int den = parse_integer(den_text, whole);
        if (den == 0) {
            throw std::invalid_argument("zero denominator: '" + std::string(whole) + "'");
        }
        return Rational(negative ? cpp_int(-num) : num, den);
    }
    return parse_decimal(text, whole);
}

Rational rational_from_double(double value)
{
    if (!std::isfinite(value)) {
        throw std::invalid_argument("non-finite number");
    }
    char buffer[64];
    auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
    if (ec != std::errc{}) {
        throw std::invalid_argument("unrepresentable number");
    }
    return parse_rational(std::string_view(buffer, static_cast<std::size_t>(ptr - buffer)));
}

std::string to_fraction_string(const Rational& r)
{
    return numerator(r).str() + "/" + denominator(r).str();
}

double to_double(const Rational& r)
{
    return r.convert_to<double>();
}

}  // namespace mermin
