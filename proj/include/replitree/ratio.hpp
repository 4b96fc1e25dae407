#pragma once

#include <boost/rational.hpp>

#include <climits>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace replitree {

// Exact rational arithmetic for costs, communication times and QoS bounds.
// File formats only ever carry finite decimal strings, so every value that
// enters the system has a denominator of the form 2^a * 5^b.
using Ratio = boost::rational<long long>;

inline long long checked_pow10(int k) {
    long long v = 1;
    for (int i = 0; i < k; ++i) {
        if (v > 922337203685477580LL) throw std::overflow_error("decimal exponent too large");
        v *= 10;
    }
    return v;
}

// Parses "12", "0.25", "3." or ".5" into an exact rational.
inline Ratio ratio_from_decimal(std::string_view text) {
    if (text.empty()) throw std::invalid_argument("empty number");
    bool negative = false;
    std::size_t pos = 0;
    if (text[pos] == '+' || text[pos] == '-') {
        negative = text[pos] == '-';
        ++pos;
    }
    long long int_part = 0, frac_part = 0;
    int frac_digits = 0;
    bool any_digit = false;
    for (; pos < text.size() && text[pos] != '.'; ++pos) {
        char c = text[pos];
        if (c < '0' || c > '9') throw std::invalid_argument("bad number: " + std::string(text));
        if (int_part > (LLONG_MAX - 9) / 10) throw std::overflow_error("number too large");
        int_part = int_part * 10 + (c - '0');
        any_digit = true;
    }
    if (pos < text.size() && text[pos] == '.') {
        ++pos;
        for (; pos < text.size(); ++pos) {
            char c = text[pos];
            if (c < '0' || c > '9') throw std::invalid_argument("bad number: " + std::string(text));
            if (frac_digits >= 17) throw std::overflow_error("too many decimal digits");
            frac_part = frac_part * 10 + (c - '0');
            ++frac_digits;
            any_digit = true;
        }
    }
    if (pos != text.size() || !any_digit) throw std::invalid_argument("bad number: " + std::string(text));
    long long den = checked_pow10(frac_digits);
    Ratio value(int_part);
    value += Ratio(frac_part, den);
    return negative ? -value : value;
}

// Renders exactly. Values with a 10^k-compatible denominator become plain
// decimals ("0.75"); anything else falls back to "p/q".
inline std::string ratio_to_string(const Ratio& r) {
    long long num = r.numerator(), den = r.denominator();
    bool neg = num < 0;
    unsigned long long n = neg ? -static_cast<unsigned long long>(num) : num;
    long long d = den;
    int twos = 0, fives = 0;
    while (d % 2 == 0) { d /= 2; ++twos; }
    while (d % 5 == 0) { d /= 5; ++fives; }
    if (d != 1) return std::to_string(num) + "/" + std::to_string(den);
    int k = twos > fives ? twos : fives;
    for (int i = 0; i < k - twos; ++i) n *= 2;
    for (int i = 0; i < k - fives; ++i) n *= 5;
    std::string digits = std::to_string(n);
    std::string out = neg ? "-" : "";
    if (k == 0) return out + digits;
    if (static_cast<int>(digits.size()) <= k) digits.insert(0, k + 1 - digits.size(), '0');
    std::string frac = digits.substr(digits.size() - k);
    while (!frac.empty() && frac.back() == '0') frac.pop_back();
    out += digits.substr(0, digits.size() - k);
    if (!frac.empty()) out += "." + frac;
    return out;
}

inline double ratio_to_double(const Ratio& r) {
    return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

}  // namespace replitree
