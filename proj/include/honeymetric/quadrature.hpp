#pragma once

// Globally adaptive Gauss-Kronrod (7/15 point) quadrature.

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <sstream>
#include <vector>

#include "honeymetric/error.hpp"

namespace honeymetric {

struct QuadratureOptions {
    double abs_tol = 1e-10;
    double rel_tol = 0.0;
    int max_intervals = 20000;
};

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
    int intervals = 0;
};

namespace detail {

// Kronrod abscissae on [-1, 1] (non-negative half), with Kronrod and Gauss weights.
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for nodes 1, 3, 5, 7 of the Kronrod set (index 7 is the centre).
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double a, b, value, error;
    bool operator<(const Segment& o) const { return error < o.error; }
};

template <class F>
Segment gauss_kronrod_15(F& f, double a, double b) {
    const double centre = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(centre);
    double kronrod = fc * kKronrodWeights[7];
    double gauss = fc * kGaussWeights[3];
    for (int i = 0; i < 7; ++i) {
        const double dx = half * kKronrodNodes[i];
        const double s = f(centre - dx) + f(centre + dx);
        kronrod += kKronrodWeights[i] * s;
        if (i % 2 == 1) gauss += kGaussWeights[i / 2] * s;
    }
    kronrod *= half;
    gauss *= half;
    return {a, b, kronrod, std::fabs(kronrod - gauss)};
}

} // namespace detail

/// Integrate f over [a, b]. `breakpoints` (inside (a, b)) seed the initial
/// partition; this is how callers point the scheme at sharp peaks.
template <class F>
QuadratureResult integrate(F&& f, double a, double b, const QuadratureOptions& opts = {},
                           std::vector<double> breakpoints = {}) {
    if (a == b) return {};
    std::vector<double> cuts{a};
    std::sort(breakpoints.begin(), breakpoints.end());
    for (double x : breakpoints)
        if (x > cuts.back() && x < b) cuts.push_back(x);
    cuts.push_back(b);

    std::priority_queue<detail::Segment> heap;
    double value = 0.0, error = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        auto s = detail::gauss_kronrod_15(f, cuts[i], cuts[i + 1]);
        value += s.value;
        error += s.error;
        heap.push(s);
    }

    auto tolerance = [&] { return std::max(opts.abs_tol, opts.rel_tol * std::fabs(value)); };
    while (error > tolerance()) {
        if (static_cast<int>(heap.size()) >= opts.max_intervals) {
            std::ostringstream os;
            os << "quadrature did not converge: estimated error " << error << " exceeds tolerance "
               << tolerance() << " after " << heap.size() << " intervals";
            throw numerical_error(os.str(), error);
        }
        const auto worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) {
            // Interval cannot be split further in double precision.
            std::ostringstream os;
            os << "quadrature stalled at x = " << mid << " with estimated error " << error;
            throw numerical_error(os.str(), error);
        }
        auto left = detail::gauss_kronrod_15(f, worst.a, mid);
        auto right = detail::gauss_kronrod_15(f, mid, worst.b);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }

    // Re-sum from the final partition to shed the running-update round-off.
    QuadratureResult out;
    out.intervals = static_cast<int>(heap.size());
    while (!heap.empty()) {
        out.value += heap.top().value;
        out.error += heap.top().error;
        heap.pop();
    }
    return out;
}

} // namespace honeymetric
