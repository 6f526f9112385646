#pragma once

#include <cstdint>
#include <numeric>
#include <string>

namespace lamegap {

/// Exact rational exponent. Rate exponents are ratios of small integers
/// ((d+i-1)/m - 1 and combinations), so exact arithmetic keeps CSV output
/// and branch comparisons free of rounding.
struct Fraction {
    std::int64_t num = 0;
    std::int64_t den = 1;

    Fraction() = default;
    Fraction(std::int64_t n, std::int64_t d = 1) : num(n), den(d) { normalize(); }

    void normalize() {
        if (den < 0) { num = -num; den = -den; }
        const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) { num /= g; den /= g; }
        if (num == 0) den = 1;
    }

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }

    Fraction operator+(const Fraction& o) const { return {num * o.den + o.num * den, den * o.den}; }
    Fraction operator-(const Fraction& o) const { return {num * o.den - o.num * den, den * o.den}; }
    Fraction operator-() const { return {-num, den}; }
    bool operator==(const Fraction& o) const { return num == o.num && den == o.den; }
    bool operator!=(const Fraction& o) const { return !(*this == o); }

    std::string str() const {
        if (den == 1) return std::to_string(num);
        return std::to_string(num) + "/" + std::to_string(den);
    }
};

}  // namespace lamegap
