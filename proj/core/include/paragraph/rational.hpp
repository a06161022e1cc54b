#pragma once

#include <cstdint>
#include <numeric>

namespace paragraph {

/// Exact nonnegative rational, used for edge-weight arithmetic so that
/// trip-count products, per-thread divisions, and branch halvings stay
/// exact until the final conversion to double.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    constexpr Rational() = default;
    constexpr Rational(std::int64_t n) : num(n), den(1) {}
    Rational(std::int64_t n, std::int64_t d) : num(n), den(d) { normalize(); }

    void normalize() {
        if (den < 0) {
            num = -num;
            den = -den;
        }
        std::int64_t g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) {
            num /= g;
            den /= g;
        }
        if (num == 0) den = 1;
    }

    double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }

    friend Rational operator*(const Rational& a, const Rational& b) {
        // cross-reduce before multiplying to keep intermediates small
        std::int64_t g1 = std::gcd(a.num < 0 ? -a.num : a.num, b.den);
        std::int64_t g2 = std::gcd(b.num < 0 ? -b.num : b.num, a.den);
        return Rational((a.num / g1) * (b.num / g2), (a.den / g2) * (b.den / g1));
    }

    friend Rational operator/(const Rational& a, const Rational& b) {
        return a * Rational(b.den, b.num);
    }

    friend Rational operator+(const Rational& a, const Rational& b) {
        std::int64_t g = std::gcd(a.den, b.den);
        return Rational(a.num * (b.den / g) + b.num * (a.den / g), (a.den / g) * b.den);
    }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num == b.num && a.den == b.den;
    }

    friend bool operator<(const Rational& a, const Rational& b) {
        return static_cast<__int128>(a.num) * b.den < static_cast<__int128>(b.num) * a.den;
    }
};

}  // namespace paragraph
