#include "soficlab/rational.hpp"

#include <cmath>
#include <numeric>

namespace sofic {

namespace {

using i128 = __int128;

std::int64_t checked_narrow(i128 v) {
    if (v > INT64_MAX || v < INT64_MIN)
        throw std::overflow_error("rational overflow; reduce denominators or use smaller instances");
    return static_cast<std::int64_t>(v);
}

i128 gcd128(i128 a, i128 b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
        i128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

Rational make_reduced(i128 n, i128 d) {
    if (d == 0) throw std::domain_error("rational with zero denominator");
    if (d < 0) {
        n = -n;
        d = -d;
    }
    i128 g = gcd128(n, d);
    if (g > 1) {
        n /= g;
        d /= g;
    }
    Rational r;
    r.num = checked_narrow(n);
    r.den = checked_narrow(d);
    return r;
}

} // namespace

Rational::Rational(std::int64_t n, std::int64_t d) { *this = make_reduced(n, d); }

Rational Rational::from_decimal(double x, int digits) {
    if (!std::isfinite(x)) throw std::domain_error("non-finite value");
    std::int64_t scale = 1;
    for (int i = 0; i < digits; ++i) scale *= 10;
    double scaled = std::round(x * static_cast<double>(scale));
    if (std::fabs(scaled) > 9.0e18) throw std::overflow_error("decimal out of range");
    return Rational(static_cast<std::int64_t>(scaled), scale);
}

Rational Rational::operator-() const {
    Rational r;
    r.num = -num;
    r.den = den;
    return r;
}

Rational Rational::operator+(const Rational& o) const {
    return make_reduced(i128(num) * o.den + i128(o.num) * den, i128(den) * o.den);
}

Rational Rational::operator-(const Rational& o) const {
    return make_reduced(i128(num) * o.den - i128(o.num) * den, i128(den) * o.den);
}

Rational Rational::operator*(const Rational& o) const {
    return make_reduced(i128(num) * o.num, i128(den) * o.den);
}

Rational Rational::operator/(const Rational& o) const {
    if (o.num == 0) throw std::domain_error("rational division by zero");
    return make_reduced(i128(num) * o.den, i128(den) * o.num);
}

bool Rational::operator<(const Rational& o) const {
    return i128(num) * o.den < i128(o.num) * den;
}

std::string Rational::str() const {
    if (den == 1) return std::to_string(num);
    return std::to_string(num) + "/" + std::to_string(den);
}

} // namespace sofic
