#include <catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <random>
#include <vector>

#include "honeymetric/error.hpp"
#include "honeymetric/flatness.hpp"
#include "honeymetric/models.hpp"
#include "honeymetric/quadrature.hpp"
#include "honeymetric/ratio_spectrum.hpp"

using namespace honeymetric;
using Catch::Approx;

namespace {

// First-guess flatness written directly from the model pmfs, without the
// spectrum type: sum over distinct ratios x of (x/k)(G(x)^k - G(x-)^k) + b.
double first_guess_reference(const PasswordModel& P, const PasswordModel& Q, std::size_t k) {
    std::map<double, double> q_by_ratio;
    double b = 0;
    for (std::size_t i = 0; i < P.size(); ++i) {
        const double p = P.pmf(i), q = Q.pmf(i);
        if (q == 0)
            b += p;
        else
            q_by_ratio[p / q] += q;
    }
    double total = b, below = 0;
    for (auto [x, q] : q_by_ratio) {
        const double above = below + q;
        total += x / k * (std::pow(above, static_cast<double>(k)) - std::pow(below, static_cast<double>(k)));
        below = above;
    }
    return total;
}

PasswordModel random_model(std::mt19937_64& rng, std::size_t n, int levels) {
    std::vector<double> w(n);
    double s = 0;
    do {
        s = 0;
        for (auto& x : w) s += x = static_cast<double>(rng() % levels);
    } while (s == 0);
    for (auto& x : w) x /= s;
    return PasswordModel(w);
}

} // namespace

TEST_CASE("identical distributions give perfect flatness") {
    const auto z = zipf_model(0.9, 500);
    const auto curve = flatness_discrete(build_ratio_spectrum(z, z), 20, 20);
    for (const auto& p : curve.points) CHECK(p.value == Approx(p.i / 20.0).margin(1e-12));
    CHECK(curve.method == Method::discrete_exact);
}

TEST_CASE("discrete first-guess flatness matches a direct evaluation") {
    const auto P = zipf_model(0.9, 10'000);
    const auto Q = uniform_model(10'000);
    const auto s = build_ratio_spectrum(P, Q);
    const double ref = first_guess_reference(P, Q, 20);
    CHECK(flatness_discrete(s, 20, 1).at(1) == Approx(ref).epsilon(1e-12));
    CHECK(flatness_first_guess(s, 20) == Approx(ref).epsilon(1e-12));
}

TEST_CASE("k guesses exhaust the list") {
    const auto s = build_ratio_spectrum(zipf_model(0.7, 300), uniform_model(300));
    for (std::size_t k : {2u, 5u, 17u}) CHECK(flatness_discrete(s, k, k).at(k) == Approx(1).margin(1e-12));
}

TEST_CASE("flatness argument checks") {
    const auto u = uniform_model(3);
    const auto s = build_ratio_spectrum(u, u);
    CHECK_THROWS_AS(flatness_discrete(s, 1, 1), domain_error);
    CHECK_THROWS_AS(flatness_discrete(s, 4, 5), domain_error);
    CHECK_THROWS_AS(flatness_discrete(s, 4, 0), domain_error);
}

TEST_CASE("flatness properties on random pairs with ties and Q-zero mass") {
    std::mt19937_64 rng(31337);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 1 + rng() % 8;
        const auto P = random_model(rng, n, 4);
        const auto Q = random_model(rng, n, 4);
        const auto s = build_ratio_spectrum(P, Q);
        const std::size_t k = 2 + rng() % 6;
        const auto curve = flatness_discrete(s, k, k);
        double last = 0;
        for (const auto& p : curve.points) {
            CHECK(p.value >= last - 1e-15);
            CHECK(p.value >= static_cast<double>(p.i) / k - 1e-12);
            last = p.value;
        }
        CHECK(curve.at(k) == Approx(1).margin(1e-12));
        CHECK(curve.at(1) >= s.b() - 1e-15);
        CHECK(curve.at(1) == Approx(flatness_first_guess(s, k)).margin(1e-12));
        CHECK(curve.at(1) == Approx(first_guess_reference(P, Q, k)).margin(1e-12));
    }
}

TEST_CASE("continuous flatness on the linear example is quadratic in i") {
    const auto r = flatness_continuous(linear_example(), 20, 20);
    for (const auto& p : r.curve.points) {
        const double i = static_cast<double>(p.i);
        CHECK(p.value == Approx((62 * i - i * i) / 840).margin(1e-9));
    }
    CHECK(r.curve.at(1) == Approx(1.5 / 20 - 1.0 / 420).margin(1e-12));
    CHECK(r.curve.at(20) == Approx(1).margin(1e-9));
    CHECK(r.first_guess_closed == Approx(r.curve.at(1)).margin(1e-10));
}

TEST_CASE("x-space fallback agrees with the quantile path") {
    auto model = linear_example();
    model.G_inverse.reset();
    const auto r = flatness_continuous(model, 20, 20);
    for (const auto& p : r.curve.points) {
        const double i = static_cast<double>(p.i);
        CHECK(p.value == Approx((62 * i - i * i) / 840).margin(1e-9));
    }
}

TEST_CASE("G = identity on [0, 1] with k = 2") {
    const auto r = flatness_continuous(identity_example(), 2, 2);
    CHECK(r.curve.at(1) == Approx(1.0 / 3).margin(1e-12));
    CHECK(r.first_guess_closed == Approx(1.0 / 3).margin(1e-12));
}

TEST_CASE("Q-zero mass shifts every continuous value by b") {
    auto with_b = identity_example();
    with_b.b = 0.2;
    const auto base = flatness_continuous(identity_example(), 5, 5).curve;
    const auto shifted = flatness_continuous(with_b, 5, 5).curve;
    for (std::size_t i = 1; i <= 5; ++i) CHECK(shifted.at(i) == Approx(base.at(i) + 0.2).margin(1e-12));
}

TEST_CASE("continuous flatness reports quadrature failure") {
    ContinuousRatioModel model;
    model.M = 1;
    model.G = [](double x) { return x < 1 ? 0.5 + 0.5 * std::sin(1 / (x + 1e-4)) * x : 1.0; };
    QuadratureOptions opts;
    opts.max_intervals = 4;
    opts.abs_tol = 1e-14;
    CHECK_THROWS_AS(flatness_continuous(model, 4, 2, opts), numerical_error);
}

TEST_CASE("Zipf closed form limits") {
    // alpha -> 0 is uniform: eps(1) -> 1/k.
    for (std::size_t k : {2u, 10u, 50u}) CHECK(zipf_flatness_closed_form(1e-9, k, 1).at(1) == Approx(1.0 / k).epsilon(1e-7));
    CHECK(zipf_flatness_closed_form(0.9, 20, 20).at(20) == Approx(1).margin(1e-8));
    CHECK_THROWS_AS(zipf_flatness_closed_form(1.2, 20, 1), domain_error);
}

TEST_CASE("Zipf closed form matches a singularity-free numerical integral") {
    // (1 - a) int (1-x)^-a x^(k-1) dx with 1 - x = y^(1/(1-a)) becomes
    // int_0^1 (1 - y^(1/(1-a)))^(k-1) dy.
    const double a = 0.9;
    for (std::size_t k : {2u, 10u, 20u, 50u}) {
        const double numeric =
            integrate([&](double y) { return std::pow(1 - std::pow(y, 1 / (1 - a)), static_cast<double>(k - 1)); }, 0, 1)
                .value;
        CHECK(zipf_flatness_closed_form(a, k, 1).at(1) == Approx(numeric).margin(1e-8));
    }
}

TEST_CASE("collision bound") {
    const auto u = uniform_model(1'000'000);
    CHECK(collision_bound(u, u, 20) <= 2.19e-4);
    CHECK(collision_bound_uniform(1'000'000, 20) == Approx(438.0 / 2e6).epsilon(1e-14));
    CHECK(collision_bound_uniform(1'000'000, 100) == Approx(10198.0 / 2e6).epsilon(1e-14));
    const auto z = zipf_model(0.9, 1000);
    CHECK(collision_bound(z, uniform_model(1000), 2) == Approx(1e-3).epsilon(1e-12));
    CHECK_THROWS_AS(collision_bound(z, uniform_model(999), 2), structural_error);
}
