#pragma once

#include <cstdint>
#include <string>

#include "nodebias/errors.hpp"

namespace nodebias {

using int128 = __int128;

std::string i128_to_string(int128 v);

// Exact nonnegative rational on 128-bit integers. Preservation probabilities
// and their aggregates are kept as integer pairs end to end; doubles appear
// only at the reporting edge.
class Ratio {
public:
    Ratio() : num_(0), den_(1) {}
    Ratio(int128 num, int128 den);

    static Ratio of_counts(uint64_t preserved, uint64_t total) {
        return Ratio(static_cast<int128>(preserved), static_cast<int128>(total));
    }

    int128 num() const { return num_; }
    int128 den() const { return den_; }

    double value() const;

    Ratio operator+(const Ratio& other) const;
    Ratio operator-(const Ratio& other) const;
    Ratio operator*(const Ratio& other) const;

    bool operator==(const Ratio& other) const { return num_ == other.num_ && den_ == other.den_; }
    bool operator!=(const Ratio& other) const { return !(*this == other); }
    bool operator<(const Ratio& other) const;

    Ratio abs() const;

    std::string num_string() const { return i128_to_string(num_); }
    std::string den_string() const { return i128_to_string(den_); }

private:
    int128 num_;
    int128 den_; // > 0, gcd(|num|, den) == 1
};

} // namespace nodebias
