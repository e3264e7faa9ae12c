// Arbitrary-precision unsigned integers, just enough for exact multinomial
// counting: addition, comparison, multiply, exact small division, natural log.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace sofic {

class BigUint {
public:
    BigUint() = default;
    BigUint(std::uint64_t v);

    bool is_zero() const { return limbs_.empty(); }

    BigUint& operator+=(const BigUint& o);
    BigUint operator+(const BigUint& o) const;
    BigUint operator*(const BigUint& o) const;
    BigUint& operator*=(std::uint64_t m);
    // Exact division by a small divisor; throws if a remainder is left.
    BigUint& divexact(std::uint64_t d);

    bool operator==(const BigUint& o) const { return limbs_ == o.limbs_; }
    bool operator!=(const BigUint& o) const { return !(*this == o); }
    bool operator<(const BigUint& o) const;
    bool operator<=(const BigUint& o) const { return *this < o || *this == o; }

    // Natural log; -inf for zero.
    double log() const;
    std::string str() const; // decimal

    static BigUint binomial(unsigned n, unsigned k);
    // n! / (k_1! ... k_m!) with sum(k) == n.
    static BigUint multinomial(unsigned n, const std::vector<unsigned>& parts);
    static BigUint pow(std::uint64_t base, unsigned exp);

private:
    // Base 2^64, little-endian, no trailing zero limbs.
    std::vector<std::uint64_t> limbs_;
    void trim();
};

} // namespace sofic
