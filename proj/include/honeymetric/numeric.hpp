#pragma once

// Log-space combinatorics and summation helpers shared by every metric.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace honeymetric {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// log C(n, k) via log-gamma. Returns -inf for k outside [0, n].
inline double log_choose(double n, double k) {
    if (k < 0 || k > n) return -kInf;
    return std::lgamma(n + 1) - std::lgamma(k + 1) - std::lgamma(n - k + 1);
}

/// log B(a, b) for a, b > 0.
inline double log_beta(double a, double b) {
    return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

/// exponent * log(base) with the convention 0 * log(0) = 0 (so 0^0 = 1).
inline double xlogy(double exponent, double base) {
    if (exponent == 0) return 0.0;
    return exponent * std::log(base);
}

/// Table of log(m!) for m = 0..max. Avoids lgamma inside hot loops.
class LogFactorials {
public:
    explicit LogFactorials(std::size_t max) : table_(max + 1, 0.0) {
        for (std::size_t m = 2; m <= max; ++m)
            table_[m] = table_[m - 1] + std::log(static_cast<double>(m));
    }

    double operator()(std::size_t m) const { return table_[m]; }

    double choose(std::size_t n, std::size_t k) const {
        if (k > n) return -kInf;
        return table_[n] - table_[k] - table_[n - k];
    }

    std::size_t max() const { return table_.size() - 1; }

private:
    std::vector<double> table_;
};

/// Pairwise (cascade) summation. The order of additions depends only on the
/// length of the input, so results are reproducible across runs.
inline double pairwise_sum(std::span<const double> xs) {
    constexpr std::size_t kBlock = 64;
    if (xs.size() <= kBlock) {
        double s = 0.0;
        for (double x : xs) s += x;
        return s;
    }
    const std::size_t half = xs.size() / 2;
    return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

/// Round to `digits` significant decimal digits. Used as a grouping key so
/// that float noise does not split ties between equal likelihood ratios.
inline double round_significant(double x, int digits = 12) {
    if (x == 0 || !std::isfinite(x)) return x;
    const int exponent = static_cast<int>(std::floor(std::log10(std::fabs(x))));
    const int shift = digits - 1 - exponent;
    // Split the scaling so that 10^shift never overflows for subnormal inputs.
    if (shift > 300 || shift < -300) return x;
    const double scale = std::pow(10.0, shift);
    return std::round(x * scale) / scale;
}

} // namespace honeymetric
