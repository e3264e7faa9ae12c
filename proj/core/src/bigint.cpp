#include "soficlab/bigint.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sofic {

namespace {
using u128 = unsigned __int128;
}

BigUint::BigUint(std::uint64_t v) {
    if (v != 0) limbs_.push_back(v);
}

void BigUint::trim() {
    while (!limbs_.empty() && limbs_.back() == 0) limbs_.pop_back();
}

BigUint& BigUint::operator+=(const BigUint& o) {
    if (o.limbs_.size() > limbs_.size()) limbs_.resize(o.limbs_.size(), 0);
    std::uint64_t carry = 0;
    for (std::size_t i = 0; i < limbs_.size(); ++i) {
        u128 s = u128(limbs_[i]) + carry + (i < o.limbs_.size() ? o.limbs_[i] : 0);
        limbs_[i] = static_cast<std::uint64_t>(s);
        carry = static_cast<std::uint64_t>(s >> 64);
    }
    if (carry) limbs_.push_back(carry);
    return *this;
}

BigUint BigUint::operator+(const BigUint& o) const {
    BigUint r = *this;
    r += o;
    return r;
}

BigUint BigUint::operator*(const BigUint& o) const {
    if (is_zero() || o.is_zero()) return BigUint();
    BigUint r;
    r.limbs_.assign(limbs_.size() + o.limbs_.size(), 0);
    for (std::size_t i = 0; i < limbs_.size(); ++i) {
        std::uint64_t carry = 0;
        for (std::size_t j = 0; j < o.limbs_.size(); ++j) {
            u128 cur = u128(limbs_[i]) * o.limbs_[j] + r.limbs_[i + j] + carry;
            r.limbs_[i + j] = static_cast<std::uint64_t>(cur);
            carry = static_cast<std::uint64_t>(cur >> 64);
        }
        std::size_t k = i + o.limbs_.size();
        while (carry) {
            u128 cur = u128(r.limbs_[k]) + carry;
            r.limbs_[k] = static_cast<std::uint64_t>(cur);
            carry = static_cast<std::uint64_t>(cur >> 64);
            ++k;
        }
    }
    r.trim();
    return r;
}

BigUint& BigUint::operator*=(std::uint64_t m) {
    if (m == 0 || is_zero()) {
        limbs_.clear();
        return *this;
    }
    std::uint64_t carry = 0;
    for (auto& limb : limbs_) {
        u128 cur = u128(limb) * m + carry;
        limb = static_cast<std::uint64_t>(cur);
        carry = static_cast<std::uint64_t>(cur >> 64);
    }
    if (carry) limbs_.push_back(carry);
    return *this;
}

BigUint& BigUint::divexact(std::uint64_t d) {
    if (d == 0) throw std::domain_error("division by zero");
    u128 rem = 0;
    for (std::size_t i = limbs_.size(); i-- > 0;) {
        u128 cur = (rem << 64) | limbs_[i];
        limbs_[i] = static_cast<std::uint64_t>(cur / d);
        rem = cur % d;
    }
    if (rem != 0) throw std::logic_error("divexact with nonzero remainder");
    trim();
    return *this;
}

bool BigUint::operator<(const BigUint& o) const {
    if (limbs_.size() != o.limbs_.size()) return limbs_.size() < o.limbs_.size();
    for (std::size_t i = limbs_.size(); i-- > 0;)
        if (limbs_[i] != o.limbs_[i]) return limbs_[i] < o.limbs_[i];
    return false;
}

double BigUint::log() const {
    if (is_zero()) return -std::numeric_limits<double>::infinity();
    // Top two limbs carry all the precision a double can hold.
    std::size_t n = limbs_.size();
    long double top = static_cast<long double>(limbs_[n - 1]);
    if (n >= 2) top = top * 18446744073709551616.0L + static_cast<long double>(limbs_[n - 2]);
    int skipped = static_cast<int>(n >= 2 ? n - 2 : 0);
    long double l = std::log(top) + static_cast<long double>(skipped) * std::log(18446744073709551616.0L);
    return static_cast<double>(l);
}

std::string BigUint::str() const {
    if (is_zero()) return "0";
    std::vector<std::uint64_t> work = limbs_;
    std::string out;
    while (!work.empty()) {
        u128 rem = 0;
        for (std::size_t i = work.size(); i-- > 0;) {
            u128 cur = (rem << 64) | work[i];
            work[i] = static_cast<std::uint64_t>(cur / 1000000000000000000ULL);
            rem = cur % 1000000000000000000ULL;
        }
        while (!work.empty() && work.back() == 0) work.pop_back();
        std::string chunk = std::to_string(static_cast<std::uint64_t>(rem));
        if (work.empty()) {
            out = chunk + out;
        } else {
            out = std::string(18 - chunk.size(), '0') + chunk + out;
        }
    }
    return out;
}

BigUint BigUint::binomial(unsigned n, unsigned k) {
    if (k > n) return BigUint();
    if (k > n - k) k = n - k;
    BigUint r(1);
    for (unsigned i = 1; i <= k; ++i) {
        r *= (n - k + i);
        r.divexact(i);
    }
    return r;
}

BigUint BigUint::multinomial(unsigned n, const std::vector<unsigned>& parts) {
    BigUint r(1);
    unsigned left = n;
    for (unsigned p : parts) {
        if (p > left) throw std::invalid_argument("multinomial parts exceed total");
        r = r * binomial(left, p);
        left -= p;
    }
    if (left != 0) throw std::invalid_argument("multinomial parts do not sum to total");
    return r;
}

BigUint BigUint::pow(std::uint64_t base, unsigned exp) {
    BigUint r(1);
    for (unsigned i = 0; i < exp; ++i) r *= base;
    return r;
}

} // namespace sofic
