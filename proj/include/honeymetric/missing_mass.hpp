#pragma once

// Expected missing mass f(+inf) of a List model trained on |S| iid draws
// from P: the P-mass the generator can never produce.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <sstream>
#include <vector>

#include <boost/math/special_functions/zeta.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "honeymetric/error.hpp"
#include "honeymetric/models.hpp"
#include "honeymetric/numeric.hpp"
#include "honeymetric/parallel.hpp"
#include "honeymetric/ratio_spectrum.hpp"
#include "honeymetric/sampler.hpp"

namespace honeymetric {

struct UniformMissingMass {
    double exact;        // (1 - 1/n)^|S|
    double exponential;  // e^{-|S|/n}
};

inline UniformMissingMass missing_mass_uniform(std::size_t n, std::size_t sample_size) {
    if (n == 0) throw domain_error("missing mass needs n >= 1");
    const double s = static_cast<double>(sample_size), nd = static_cast<double>(n);
    const double exact = sample_size == 0 ? 1.0 : std::exp(s * std::log1p(-1.0 / nd));
    return {exact, std::exp(-s / nd)};
}

/// sum_i p_i (1 - p_i)^|S| over a Zipf(alpha, n) distribution.
inline double missing_mass_zipf_direct(double alpha, std::size_t n, std::size_t sample_size) {
    const ZipfParams params(alpha, n);
    const double s = static_cast<double>(sample_size);
    std::vector<double> terms(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double p = std::pow(static_cast<double>(i + 1), -alpha) / params.S_norm;
        terms[i] = p < 1 ? p * std::exp(s * std::log1p(-p)) : (sample_size == 0 ? 1.0 : 0.0);
    }
    return pairwise_sum(terms);
}

/// How the power sums sum_{i<=n} i^{-s} inside the series are evaluated.
enum class PowerSums {
    zeta,   // Riemann zeta(s), the n -> infinity value
    finite  // exact finite sums over the n ranks
};

struct SeriesOptions {
    int max_terms = 200;
    double relative_stop = 1e-12;
    PowerSums power_sums = PowerSums::zeta;
};

struct SeriesResult {
    double value;
    int terms;
    double largest_term;
};

/// sum_{i=1}^{n} i^{-e} to full working precision: direct terms up to a
/// cutoff, Euler-Maclaurin for the remainder. `log_head[i]` holds log(i + 1)
/// for the direct terms.
template <class Big>
Big finite_power_sum(std::size_t n, const Big& e, const std::vector<Big>& log_head) {
    using std::exp;
    using std::log;
    using std::pow;
    Big total = 0;
    const std::size_t head = std::min(n, log_head.size());
    for (std::size_t i = 0; i < head; ++i) total += exp(-e * log_head[i]);
    if (n <= log_head.size()) return total;
    const Big a = static_cast<double>(log_head.size()), b = static_cast<double>(n);
    // sum_{i=a+1}^{b} f(i) = int_a^b f + (f(b) - f(a))/2 + sum_r B_2r/(2r)! (f^(2r-1)(b) - f^(2r-1)(a))
    if (boost::multiprecision::abs(e - 1) < Big("1e-40"))
        total += log(b) - log(a);
    else
        total += (pow(b, 1 - e) - pow(a, 1 - e)) / (1 - e);
    total += (pow(b, -e) - pow(a, -e)) / 2;
    static constexpr double kBernoulli[][2] = {{1, 6},     {-1, 30},     {1, 42},      {-1, 30},     {5, 66},
                                               {-691, 2730}, {7, 6},     {-3617, 510}, {43867, 798}, {-174611, 330}};
    // f^(m)(x) = (-1)^m e (e+1) ... (e+m-1) x^{-e-m}
    Big rising = e, factorial = 2;
    for (int r = 1; r <= 10; ++r) {
        const int m = 2 * r - 1;
        const Big deriv_b = -rising * pow(b, -e - m), deriv_a = -rising * pow(a, -e - m);
        total += Big(kBernoulli[r - 1][0]) / Big(kBernoulli[r - 1][1]) / factorial * (deriv_b - deriv_a);
        rising *= (e + m) * (e + m + 1);
        factorial *= (2 * r + 1) * (2 * r + 2);
    }
    return total;
}

/// Alternating series 1 + sum_{j>=1} (-1)^j |S|^j Z(alpha (j + 1)) / (j! A^{j+1})
/// for Zipf missing mass, with A = sum_{i<=n} i^-alpha and Z either zeta or
/// the finite power sum. Evaluated in 50-digit arithmetic; throws a
/// numerical_error when cancellation has eaten the working precision or
/// the terms fail to shrink within max_terms.
inline SeriesResult missing_mass_zipf_series(double alpha, std::size_t n, std::size_t sample_size,
                                             const SeriesOptions& opts = {}) {
    using Big = boost::multiprecision::cpp_bin_float_50;
    const ZipfParams params(alpha, n);
    if (opts.power_sums == PowerSums::zeta && alpha * 2 <= 1)
        throw domain_error("zeta power sums need 2 alpha > 1");

    const Big exponent_base = Big(alpha);
    std::vector<Big> log_head;
    if (opts.power_sums == PowerSums::finite)
        for (std::size_t i = 1; i <= std::min<std::size_t>(n, 1000); ++i) log_head.push_back(log(Big(i)));
    auto power_sum = [&](const Big& expo) -> Big {
        if (opts.power_sums == PowerSums::zeta) return boost::math::zeta(expo);
        return finite_power_sum(n, expo, log_head);
    };
    // The norm must match the power sums: each cancelling term shares it.
    const Big a_norm = opts.power_sums == PowerSums::zeta ? Big(params.S_norm) : power_sum(exponent_base);
    const Big s = static_cast<double>(sample_size);

    Big total = 1;
    Big coeff = 1 / a_norm;  // |S|^j / (j! A^{j+1})
    double largest = 1.0;
    int j = 1;
    for (; j <= opts.max_terms; ++j) {
        coeff *= s / (a_norm * j);
        Big term = coeff * power_sum(exponent_base * (j + 1));
        if (j % 2) term = -term;
        total += term;
        largest = std::max(largest, std::fabs(static_cast<double>(term)));
        if (boost::multiprecision::abs(term) < opts.relative_stop * boost::multiprecision::abs(total) && j > 1) break;
    }
    const double value = static_cast<double>(total);
    if (j > opts.max_terms) {
        std::ostringstream os;
        os << "missing-mass series did not converge in " << opts.max_terms
           << " terms (|S|/A = " << static_cast<double>(s / a_norm) << "); use direct summation";
        throw numerical_error(os.str(), largest);
    }
    // 50 decimal digits of headroom minus the 15 we want to keep.
    if (largest > 1e34 * std::max(std::fabs(value), 1e-300)) {
        std::ostringstream os;
        os << "missing-mass series lost its precision to cancellation (largest term " << largest
           << "); use direct summation";
        throw numerical_error(os.str(), largest);
    }
    return {value, j, largest};
}

/// Missing mass of a specific List model against P: Pr_{pw<-P}[Q(pw) = 0].
inline double missing_mass(const PasswordModel& P, const PasswordModel& list_model) {
    return build_ratio_spectrum(P, list_model).b();
}

struct MissingMassSimulation {
    double mean;
    double stddev;  // across repetitions
    std::vector<double> values;
};

/// Trains a List model on |S| iid draws from P, `repetitions` times, and
/// measures the P-mass outside its support each time.
inline MissingMassSimulation simulate_missing_mass(const PasswordModel& P, std::size_t sample_size,
                                                   std::size_t repetitions, std::uint64_t seed) {
    if (repetitions == 0) throw domain_error("simulation needs at least one repetition");
    const AliasSampler draw(P);
    MissingMassSimulation out;
    for (std::size_t r = 0; r < repetitions; ++r) {
        Rng rng(chunk_seed(seed, r));
        if (sample_size == 0) {
            out.values.push_back(1.0);
            continue;
        }
        std::vector<std::size_t> corpus(sample_size);
        for (auto& d : corpus) d = draw(rng);
        out.values.push_back(missing_mass(P, empirical_model(corpus, P.size())));
    }
    out.mean = pairwise_sum(out.values) / static_cast<double>(repetitions);
    double ss = 0.0;
    for (double v : out.values) ss += (v - out.mean) * (v - out.mean);
    out.stddev = repetitions > 1 ? std::sqrt(ss / static_cast<double>(repetitions - 1)) : 0.0;
    return out;
}

} // namespace honeymetric
