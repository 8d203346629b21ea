#pragma once

// Flatness eps(i): the best probability of picking the real password out of
// a k-sweetword list within i guesses.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <vector>

#include "honeymetric/continuous_model.hpp"
#include "honeymetric/error.hpp"
#include "honeymetric/metric_curve.hpp"
#include "honeymetric/numeric.hpp"
#include "honeymetric/password_model.hpp"
#include "honeymetric/quadrature.hpp"
#include "honeymetric/ratio_spectrum.hpp"

namespace honeymetric {

namespace detail {

// Neumaier-compensated accumulator.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::fabs(sum_) >= std::fabs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0, comp_ = 0.0;
};

inline void check_flatness_args(std::size_t k, std::size_t i_max) {
    if (k < 2) throw domain_error("flatness needs k >= 2 sweetwords");
    if (i_max < 1 || i_max > k) throw domain_error("flatness needs 1 <= i_max <= k");
}

} // namespace detail

/// Exact discrete flatness with tie handling.
///
/// The optimal attacker guesses in descending ratio order and breaks ties
/// uniformly at random. A real password of ratio x that has a honeywords
/// strictly above it and e tied with it lands at rank a + 1 + u with u
/// uniform on {0..e}; (a, e, rest) is multinomial over (1 - G(x), g(x), G(x^-)).
/// Q-zero real passwords always rank first and add b to every eps(i).
inline MetricCurve flatness_discrete(const RatioSpectrum& spec, std::size_t k, std::size_t i_max) {
    detail::check_flatness_args(k, i_max);
    const LogFactorials lf(k);
    const std::size_t km1 = k - 1;

    std::vector<detail::CompensatedSum> rank_mass(i_max);  // Pr[rank == r + 1], weighted by p_mass
    std::vector<double> diff(i_max + 1);
    const auto finite = spec.finite_groups();
    for (std::size_t g = 0; g < finite.size(); ++g) {
        const double p_mass = finite[g].p_mass;
        if (p_mass == 0) continue;
        const double above = spec.q_above(g), tie = finite[g].q_mass, below = spec.q_below(g);
        const double log_above = std::log(above), log_tie = std::log(tie), log_below = std::log(below);

        std::fill(diff.begin(), diff.end(), 0.0);
        const std::size_t a_max = std::min(i_max - 1, km1);
        for (std::size_t a = 0; a <= a_max; ++a) {
            if (a > 0 && above == 0) break;
            const double head = lf.choose(km1, a) + (a ? a * log_above : 0.0);
            const std::size_t rest = km1 - a;
            for (std::size_t e = 0; e <= rest; ++e) {
                if (e > 0 && tie == 0) break;
                const std::size_t lower = rest - e;
                if (lower > 0 && below == 0) continue;
                const double log_w = head + lf.choose(rest, e) + (e ? e * log_tie : 0.0) +
                                     (lower ? lower * log_below : 0.0);
                const double share = std::exp(log_w) / static_cast<double>(e + 1);
                // Ranks a+1 .. a+1+e each receive `share` (0-based a .. a+e).
                diff[a] += share;
                diff[std::min(i_max, a + e + 1)] -= share;
            }
        }
        double running = 0.0;
        for (std::size_t r = 0; r < i_max; ++r) {
            running += diff[r];
            rank_mass[r].add(p_mass * running);
        }
    }

    MetricCurve curve;
    curve.method = Method::discrete_exact;
    double cumulative = spec.b();
    for (std::size_t r = 0; r < i_max; ++r) {
        cumulative += rank_mass[r].value();
        curve.points.push_back({r + 1, std::min(cumulative, 1.0), std::nullopt});
    }
    return curve;
}

/// eps(1) = sum_x (1/k) x [G^k(x) - G^k(x^-)] + b, summed over ratio groups.
inline double flatness_first_guess(const RatioSpectrum& spec, std::size_t k) {
    if (k < 2) throw domain_error("flatness needs k >= 2 sweetwords");
    detail::CompensatedSum total;
    const auto finite = spec.finite_groups();
    for (std::size_t g = 0; g < finite.size(); ++g) {
        const double low = spec.q_below(g), high = low + finite[g].q_mass;
        // high^k - low^k = (high - low) * sum_m high^m low^(k-1-m): no cancellation.
        double s = 0.0, hp = 1.0;
        for (std::size_t m = 0; m < k; ++m) {
            s += hp * std::pow(low, static_cast<double>(k - 1 - m));
            hp *= high;
        }
        total.add(finite[g].ratio * finite[g].q_mass * s / static_cast<double>(k));
    }
    total.add(spec.b());
    return total.value();
}

/// Result of the continuous-case evaluation: the curve plus the
/// independent first-guess value used as a cross-check.
struct ContinuousFlatness {
    MetricCurve curve;
    double first_guess_closed = 0.0;  // (1/k)(M - int_0^M G^k) + b
    double first_guess_error = 0.0;   // quadrature error estimate of the above
};

/// (1/k) sum_{j=1..i} Pr[Binomial(k, u) >= k - j + 1], the antiderivative
/// in u of the cumulative order-statistic kernel.
inline double flatness_kernel_antiderivative(std::size_t k, std::size_t i, double u, const LogFactorials& lf) {
    if (u <= 0) return 0.0;
    if (u >= 1) return static_cast<double>(i) / static_cast<double>(k);
    const double lu = std::log(u), l1u = std::log1p(-u);
    // Pr[Bin >= k - j + 1] accumulates the upper tail one term at a time.
    double tail = 0.0, acc = 0.0;
    for (std::size_t j = 1; j <= i; ++j) {
        const std::size_t m = k - j + 1;
        tail += std::exp(lf.choose(k, m) + m * lu + (k - m) * l1u);
        acc += tail;
    }
    return acc / static_cast<double>(k);
}

/// Continuous flatness
///   eps(i) = b + sum_{j<=i} int_0^1 C(k-1, j-1) G^{-1}(u) u^{k-j} (1-u)^{j-1} du
/// evaluated in u-space when the quantile function is available, otherwise
/// in x-space as b + M i / k - int_0^M Psi_i(G(x)) dx. eps(1) is also
/// evaluated as (1/k)(M - int_0^M G^k) + b; a disagreement beyond ten times
/// the tolerance is a numerical error.
inline ContinuousFlatness flatness_continuous(const ContinuousRatioModel& model, std::size_t k, std::size_t i_max,
                                              const QuadratureOptions& opts = {}) {
    detail::check_flatness_args(k, i_max);
    model.validate();
    const LogFactorials lf(k);
    const double kd = static_cast<double>(k);

    ContinuousFlatness out;
    out.curve.method = Method::quadrature;
    out.curve.meta.tolerance = opts.abs_tol;

    double cumulative = model.b;
    if (model.G_inverse) {
        const auto& inv = *model.G_inverse;
        for (std::size_t j = 1; j <= i_max; ++j) {
            const double log_c = lf.choose(k - 1, j - 1);
            auto integrand = [&](double u) {
                const double q = inv(u);
                if (q == 0) return 0.0;
                return q * std::exp(log_c + xlogy(static_cast<double>(k - j), u) +
                                    xlogy(static_cast<double>(j - 1), 1 - u));
            };
            cumulative += integrate(integrand, 0.0, 1.0, opts).value;
            out.curve.points.push_back({j, cumulative, std::nullopt});
        }
    } else {
        for (std::size_t i = 1; i <= i_max; ++i) {
            auto integrand = [&](double x) { return flatness_kernel_antiderivative(k, i, model.G(x), lf); };
            const double area = integrate(integrand, 0.0, model.M, opts).value;
            out.curve.points.push_back({i, model.b + model.M * static_cast<double>(i) / kd - area, std::nullopt});
        }
    }

    const auto gk = integrate([&](double x) { return std::pow(model.G(x), kd); }, 0.0, model.M, opts);
    out.first_guess_closed = (model.M - gk.value) / kd + model.b;
    out.first_guess_error = gk.error / kd;

    const double gap = std::fabs(out.first_guess_closed - out.curve.points.front().value);
    if (gap > 10 * std::max(opts.abs_tol, opts.rel_tol * std::fabs(out.first_guess_closed))) {
        std::ostringstream os;
        os << "first-guess flatness disagrees between the two continuous evaluations by " << gap;
        throw numerical_error(os.str(), gap);
    }
    return out;
}

/// Zipf(alpha) passwords against uniform honeywords in the large-n limit:
/// eps(i) = sum_{j<=i} (1 - alpha) C(k-1, j-1) B(j - alpha, k + 1 - j).
inline MetricCurve zipf_flatness_closed_form(double alpha, std::size_t k, std::size_t i_max) {
    if (!(alpha > 0 && alpha < 1)) throw domain_error("Zipf exponent must lie in (0, 1)");
    detail::check_flatness_args(k, i_max);
    MetricCurve curve;
    curve.method = Method::closed_form;
    double cumulative = 0.0;
    for (std::size_t j = 1; j <= i_max; ++j) {
        const double jd = static_cast<double>(j), kd = static_cast<double>(k);
        cumulative += (1 - alpha) * std::exp(log_choose(kd - 1, jd - 1) + log_beta(jd - alpha, kd + 1 - jd));
        curve.points.push_back({j, cumulative, std::nullopt});
    }
    return curve;
}

/// Union bound on the probability that a k-sweetword list holds a repeated
/// string: sum P(1 - (1 - Q)^{k-1}) + C(k-1, 2) sum Q^2.
inline double collision_bound(const PasswordModel& P, const PasswordModel& Q, std::size_t k) {
    if (P.size() != Q.size()) throw structural_error("P and Q must share a password space");
    if (k < 2) throw domain_error("collision bound needs k >= 2");
    const double km1 = static_cast<double>(k - 1);
    detail::CompensatedSum honey_hits, honey_pairs;
    P.for_each_support([&](std::size_t i, double p) {
        const double q = Q.pmf(i);
        if (q > 0) honey_hits.add(p * -std::expm1(km1 * std::log1p(-q)));
    });
    Q.for_each_support([&](std::size_t, double q) { honey_pairs.add(q * q); });
    return honey_hits.value() + km1 * (km1 - 1) / 2 * honey_pairs.value();
}

/// Simplified bound (k^2 + 2k - 2) / (2n) for uniform honeywords over n passwords.
inline double collision_bound_uniform(std::size_t n, std::size_t k) {
    const double kd = static_cast<double>(k);
    return (kd * kd + 2 * kd - 2) / (2 * static_cast<double>(n));
}

} // namespace honeymetric
