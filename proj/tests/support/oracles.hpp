// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

// Test-only oracles, independent of the library's computation paths.
//
// The fixture efficiencies are small rationals (ratios of integer runtimes),
// so the reference means are computed in exact fraction arithmetic and only
// converted to double at the end.

namespace oracles {

struct Fraction {
    long long num = 0;
    long long den = 1;

    static Fraction of(long long n, long long d) {
        if (d == 0) throw std::invalid_argument("zero denominator");
        if (d < 0) { n = -n; d = -d; }
        long long g = std::gcd(n < 0 ? -n : n, d);
        if (g > 1) { n /= g; d /= g; }
        return {n, d};
    }

    Fraction operator+(const Fraction& other) const {
        return of(num * other.den + other.num * den, den * other.den);
    }
    Fraction operator*(const Fraction& other) const {
        return of(num * other.num, den * other.den);
    }
    Fraction reciprocal() const { return of(den, num); }

    double as_double() const { return static_cast<double>(num) / static_cast<double>(den); }
};

// Arithmetic mean over the positive entries; 0 when there are none.
inline double arithmetic_mean(const std::vector<Fraction>& values) {
    std::vector<Fraction> positive;
    for (const auto& v : values)
        if (v.num > 0) positive.push_back(v);
    if (positive.empty()) return 0.0;
    Fraction sum{0, 1};
    for (const auto& v : positive) sum = sum + v;
    return (sum * Fraction::of(1, static_cast<long long>(positive.size()))).as_double();
}

// Harmonic mean over all entries; 0 as soon as any entry is nonpositive.
inline double harmonic_mean(const std::vector<Fraction>& values) {
    if (values.empty()) return 0.0;
    Fraction reciprocal_sum{0, 1};
    for (const auto& v : values) {
        if (v.num <= 0) return 0.0;
        reciprocal_sum = reciprocal_sum + v.reciprocal();
    }
    return (Fraction::of(static_cast<long long>(values.size()), 1) *
            reciprocal_sum.reciprocal())
        .as_double();
}

// Long-double references for randomized inputs (where exact fractions do not
// apply). Zero entries mean "unsupported".
inline double arithmetic_mean_ld(const std::vector<double>& values) {
    long double sum = 0.0L;
    std::size_t supported = 0;
    for (double v : values) {
        if (v <= 0.0) continue;
        sum += v;
        ++supported;
    }
    return supported == 0 ? 0.0 : static_cast<double>(sum / supported);
}

inline double harmonic_mean_ld(const std::vector<double>& values) {
    if (values.empty()) return 0.0;
    long double reciprocal_sum = 0.0L;
    for (double v : values) {
        if (v <= 0.0) return 0.0;
        reciprocal_sum += 1.0L / v;
    }
    return static_cast<double>(values.size() / reciprocal_sum);
}

} // namespace oracles
