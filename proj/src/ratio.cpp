#include "nodebias/ratio.hpp"

#include <algorithm>

namespace nodebias {

namespace {

using uint128 = unsigned __int128;

uint128 uabs(int128 v) { return v < 0 ? static_cast<uint128>(-v) : static_cast<uint128>(v); }

uint128 gcd128(uint128 a, uint128 b) {
    while (b != 0) {
        uint128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

int128 checked_mul(int128 a, int128 b) {
    int128 out;
    if (__builtin_mul_overflow(a, b, &out)) {
        throw numeric_error("exact ratio arithmetic overflowed 128 bits");
    }
    return out;
}

int128 checked_add(int128 a, int128 b) {
    int128 out;
    if (__builtin_add_overflow(a, b, &out)) {
        throw numeric_error("exact ratio arithmetic overflowed 128 bits");
    }
    return out;
}

} // namespace

std::string i128_to_string(int128 v) {
    if (v == 0) return "0";
    const bool neg = v < 0;
    uint128 u = uabs(v);
    std::string digits;
    while (u != 0) {
        digits.push_back(static_cast<char>('0' + static_cast<int>(u % 10)));
        u /= 10;
    }
    if (neg) digits.push_back('-');
    std::reverse(digits.begin(), digits.end());
    return digits;
}

Ratio::Ratio(int128 num, int128 den) : num_(num), den_(den) {
    if (den_ == 0) throw numeric_error("ratio with zero denominator");
    if (den_ < 0) {
        num_ = -num_;
        den_ = -den_;
    }
    const uint128 g = gcd128(uabs(num_), static_cast<uint128>(den_));
    if (g > 1) {
        num_ = (num_ < 0 ? -static_cast<int128>(uabs(num_) / g) : static_cast<int128>(uabs(num_) / g));
        den_ = static_cast<int128>(static_cast<uint128>(den_) / g);
    }
}

double Ratio::value() const {
    return static_cast<double>(num_) / static_cast<double>(den_);
}

Ratio Ratio::operator+(const Ratio& other) const {
    // Reduce by gcd of denominators before cross multiplying.
    const uint128 g = gcd128(static_cast<uint128>(den_), static_cast<uint128>(other.den_));
    const int128 d1 = den_ / static_cast<int128>(g);
    const int128 d2 = other.den_ / static_cast<int128>(g);
    const int128 num = checked_add(checked_mul(num_, d2), checked_mul(other.num_, d1));
    const int128 den = checked_mul(checked_mul(d1, d2), static_cast<int128>(g));
    return Ratio(num, den);
}

Ratio Ratio::operator-(const Ratio& other) const {
    return *this + Ratio(-other.num_, other.den_);
}

Ratio Ratio::operator*(const Ratio& other) const {
    // Cross-reduce first to keep intermediates small.
    const uint128 g1 = gcd128(uabs(num_), static_cast<uint128>(other.den_));
    const uint128 g2 = gcd128(uabs(other.num_), static_cast<uint128>(den_));
    const int128 n1 = num_ / static_cast<int128>(g1);
    const int128 d2 = other.den_ / static_cast<int128>(g1);
    const int128 n2 = other.num_ / static_cast<int128>(g2);
    const int128 d1 = den_ / static_cast<int128>(g2);
    return Ratio(checked_mul(n1, n2), checked_mul(d1, d2));
}

bool Ratio::operator<(const Ratio& other) const {
    return checked_mul(num_, other.den_) < checked_mul(other.num_, den_);
}

Ratio Ratio::abs() const { return Ratio(num_ < 0 ? -num_ : num_, den_); }

} // namespace nodebias
