#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "honeymetric/error.hpp"
#include "honeymetric/missing_mass.hpp"
#include "honeymetric/models.hpp"

using namespace honeymetric;
using Catch::Approx;

TEST_CASE("uniform missing mass") {
    const auto mm = missing_mass_uniform(100'000, 100'000);
    CHECK(mm.exact == Approx(0.367879).margin(2e-6));
    CHECK(mm.exponential == Approx(std::exp(-1.0)).epsilon(1e-15));
    CHECK(missing_mass_uniform(100'000, 0).exact == 1.0);
    CHECK(missing_mass_uniform(1, 5).exact == 0.0);
    CHECK_THROWS_AS(missing_mass_uniform(0, 5), domain_error);
}

TEST_CASE("missing mass of a trained List model is the Q-zero mass") {
    const auto P = uniform_model(4);
    const PasswordModel list({0.5, 0.5, 0.0, 0.0});
    CHECK(missing_mass(P, list) == 0.5);
    CHECK(missing_mass(P, P) == 0.0);
    // A corpus disjoint from P's support never produces a real password.
    CHECK(missing_mass(PasswordModel({0.0, 0.0, 1.0}), PasswordModel({0.5, 0.5, 0.0})) == 1.0);
}

TEST_CASE("Zipf direct sum at the extremes") {
    CHECK(missing_mass_zipf_direct(0.9, 1000, 0) == Approx(1).epsilon(1e-14));
    CHECK(missing_mass_zipf_direct(0.9, 1, 3) == 0.0);
    // Large |S| leaves only the far tail.
    CHECK(missing_mass_zipf_direct(0.9, 1000, 10'000'000) < 1e-10);
}

TEST_CASE("series with finite power sums tracks the direct sum") {
    // The series is the Poisson form sum p e^{-|S| p}; the direct sum uses
    // (1 - p)^|S|. They differ by O(|S| sum p^3).
    const double direct = missing_mass_zipf_direct(0.9, 100'000, 1000);
    SeriesOptions finite;
    finite.power_sums = PowerSums::finite;
    const auto series = missing_mass_zipf_series(0.9, 100'000, 1000, finite);
    CHECK(std::fabs(series.value - direct) / direct < 1e-4);
    CHECK(series.terms < 200);

    // The Poisson form computed directly agrees with the series to high accuracy.
    const ZipfParams params(0.9, 100'000);
    std::vector<double> terms(100'000);
    for (std::size_t i = 0; i < terms.size(); ++i) {
        const double p = std::pow(static_cast<double>(i + 1), -0.9) / params.S_norm;
        terms[i] = p * std::exp(-1000 * p);
    }
    CHECK(series.value == Approx(pairwise_sum(terms)).epsilon(1e-10));
}

TEST_CASE("series with zeta power sums carries the infinite-n tail") {
    // Replacing finite power sums by zeta values adds the ranks beyond n;
    // at n = 1e5 this moves the result by about 3e-4 relative.
    const double direct = missing_mass_zipf_direct(0.9, 100'000, 1000);
    const auto series = missing_mass_zipf_series(0.9, 100'000, 1000);
    const double gap = std::fabs(series.value - direct) / direct;
    CHECK(gap < 5e-4);
    CHECK(gap > 1e-4);
}

TEST_CASE("series refuses when cancellation destroys the result") {
    SeriesOptions finite;
    finite.power_sums = PowerSums::finite;
    CHECK_THROWS_AS(missing_mass_zipf_series(0.9, 100'000, 100'000, finite), numerical_error);
    SeriesOptions short_series;
    short_series.max_terms = 5;
    CHECK_THROWS_AS(missing_mass_zipf_series(0.9, 100'000, 1000, short_series), numerical_error);
    CHECK_THROWS_AS(missing_mass_zipf_series(0.4, 1000, 10), domain_error);
}

TEST_CASE("simulated List models reproduce the uniform closed form") {
    const std::size_t n = 100'000;
    const auto sim = simulate_missing_mass(uniform_model(n), n, 20, 12345);
    REQUIRE(sim.values.size() == 20);
    CHECK(std::fabs(sim.mean - missing_mass_uniform(n, n).exact) < 3 * sim.stddev);
    CHECK(sim.stddev > 0);
}

TEST_CASE("simulated List models reproduce the Zipf direct sum") {
    const std::size_t n = 100'000;
    const auto sim = simulate_missing_mass(zipf_model(0.9, n), n, 20, 777);
    CHECK(std::fabs(sim.mean - missing_mass_zipf_direct(0.9, n, n)) < 3 * sim.stddev);
}

TEST_CASE("simulation is reproducible and defined for an empty corpus") {
    const auto a = simulate_missing_mass(zipf_model(0.9, 1000), 500, 3, 9);
    const auto b = simulate_missing_mass(zipf_model(0.9, 1000), 500, 3, 9);
    CHECK(a.values == b.values);
    CHECK(simulate_missing_mass(uniform_model(10), 0, 2, 1).mean == 1.0);
    CHECK_THROWS_AS(simulate_missing_mass(uniform_model(10), 5, 0, 1), domain_error);
}
