// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "honeymetric.hpp"
#include "honeymetric/cli/app.hpp"

using namespace honeymetric;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Check {
    bool ok = true;
    std::ostringstream detail;

    void require(bool condition, const std::string& what) {
        if (!condition) {
            ok = false;
            detail << " [failed: " << what << "]";
        }
    }
};

int failures = 0;

void report(int number, const std::string& title, const std::function<void(Check&)>& body) {
    Check c;
    c.detail.precision(10);
    try {
        body(c);
    } catch (const std::exception& e) {
        c.ok = false;
        c.detail << " [exception: " << e.what() << "]";
    }
    if (!c.ok) ++failures;
    std::printf("%s criterion %d: %s.%s\n", c.ok ? "PASS" : "FAIL", number, title.c_str(), c.detail.str().c_str());
    std::fflush(stdout);
}

std::string run_cli(const std::vector<std::string>& args, int& code) {
    std::ostringstream out, err;
    code = cli::run(args, out, err);
    return out.str();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

} // namespace

int main() {
    report(1, "linear example reproduces (62i - i^2)/840", [](Check& c) {
        const auto start = Clock::now();
        const auto r = flatness_continuous(linear_example(), 20, 20);
        const double elapsed = seconds_since(start);
        double worst = 0;
        for (const auto& p : r.curve.points) {
            const double i = static_cast<double>(p.i);
            worst = std::max(worst, std::fabs(p.value - (62 * i - i * i) / 840));
        }
        const double e1 = r.curve.at(1);
        c.detail << " max |diff| = " << worst << ", eps(1) = " << e1 << ", runtime " << elapsed << " s";
        c.require(worst <= 1e-8, "max |diff| <= 1e-8");
        c.require(std::fabs(e1 - 0.0726190476) <= 1e-9, "eps(1) = 0.0726190476 +- 1e-9");
        c.require(elapsed < 1.0, "runtime < 1 s");
    });

    report(2, "two continuous evaluations of eps(1) agree", [](Check& c) {
        for (const auto& [name, model] : {std::pair{"linear", linear_example()}, std::pair{"identity", identity_example()}}) {
            for (std::size_t k : {2u, 20u}) {
                const auto r = flatness_continuous(model, k, 1);
                const double gap = std::fabs(r.curve.at(1) - r.first_guess_closed);
                c.detail << " " << name << " k=" << k << ": gap " << gap << ";";
                c.require(gap <= 1e-8, std::string(name) + " gap <= 1e-8");
            }
        }
    });

    report(3, "equal distributions are perfectly flat (exact and simulated)", [](Check& c) {
        const auto u = uniform_model(1000);
        const auto spec = build_ratio_spectrum(u, u);
        for (std::size_t k : {2u, 5u, 20u}) {
            const auto exact = flatness_discrete(spec, k, k);
            double worst = 0;
            for (const auto& p : exact.points) worst = std::max(worst, std::fabs(p.value - double(p.i) / k));
            const auto mc = monte_carlo_flatness(u, u, k, k, 1'000'000, 1000 + k);
            double worst_z = 0;
            bool mc_ok = true;
            for (const auto& p : mc.points) {
                const double target = double(p.i) / k, se = *p.stderr_;
                if (se == 0) {
                    mc_ok &= p.value == target;
                    continue;
                }
                worst_z = std::max(worst_z, std::fabs(p.value - target) / se);
            }
            c.detail << " k=" << k << ": exact max err " << worst << ", MC max |z| " << worst_z << ";";
            c.require(worst <= 1e-12, "exact within 1e-12 (k=" + std::to_string(k) + ")");
            c.require(mc_ok && worst_z <= 3, "MC within 3 sigma (k=" + std::to_string(k) + ")");
        }
    });

    report(4, "Zipf closed form against numerical integration and the exact discrete sum", [](Check& c) {
        const auto start = Clock::now();
        const double a = 0.9;
        for (std::size_t k : {2u, 10u, 20u, 50u}) {
            // (1 - a) int_0^1 (1-x)^-a x^(k-1) dx with 1 - x = y^(1/(1-a)).
            const double numeric =
                integrate([&](double y) { return std::pow(1 - std::pow(y, 1 / (1 - a)), double(k - 1)); }, 0, 1).value;
            const double closed = zipf_flatness_closed_form(a, k, 1).at(1);
            c.detail << " k=" << k << ": |closed - integral| " << std::fabs(closed - numeric) << ";";
            c.require(std::fabs(closed - numeric) <= 1e-8, "integral agreement at k=" + std::to_string(k));
        }
        const auto spec = build_ratio_spectrum(zipf_model(a, 1'000'000), uniform_model(1'000'000));
        for (std::size_t k : {4u, 20u}) {
            const double exact = flatness_discrete(spec, k, 1).at(1);
            const double closed = zipf_flatness_closed_form(a, k, 1).at(1);
            const double rel = std::fabs(closed - exact) / exact;
            c.detail << " n=1e6 k=" << k << ": exact " << exact << ", closed form " << closed << ", relative gap "
                     << rel << ";";
            c.require(rel <= 0.05, "discrete agreement within 5% at k=" + std::to_string(k));
        }
        const double elapsed = seconds_since(start);
        c.detail << " runtime " << elapsed << " s";
        c.require(elapsed < 30, "runtime < 30 s");
    });

    report(5, "uniform missing mass: closed form and List-model simulation", [](Check& c) {
        const std::size_t n = 100'000;
        const double exact = missing_mass_uniform(n, n).exact;
        const auto sim = simulate_missing_mass(uniform_model(n), n, 20, 20240501);
        c.detail << " closed form " << exact << ", simulated mean " << sim.mean << " (sd " << sim.stddev << ")";
        c.require(std::fabs(exact - 0.367879) <= 2e-6, "closed form 0.367879 +- 2e-6");
        c.require(std::fabs(sim.mean - exact) <= 3 * sim.stddev, "simulation within 3 sd");
    });

    report(6, "discrete flatness equals brute force on the fixed test matrix", [](Check& c) {
        const std::vector<std::pair<PasswordModel, PasswordModel>> matrix = {
            {uniform_model(2), uniform_model(2)},
            {PasswordModel({0.8, 0.2}), uniform_model(2)},
            {PasswordModel({0.5, 0.25, 0.25}), uniform_model(3)},                               // ties at ratio 0.75
            {PasswordModel({0.4, 0.4, 0.2}), PasswordModel({0.2, 0.2, 0.6})},                   // tied top ratios
            {PasswordModel({0.5, 0.3, 0.2, 0.0}), PasswordModel({0.0, 0.3, 0.3, 0.4})},         // b = 0.5
            {PasswordModel({0.1, 0.2, 0.3, 0.4, 0.0}), PasswordModel({0.4, 0.3, 0.2, 0.1, 0.0})},  // P = Q = 0 entry
            {zipf_model(0.9, 6), uniform_model(6)},
            {PasswordModel({0.3, 0.3, 0.1, 0.1, 0.1, 0.1}), PasswordModel({0.1, 0.1, 0.2, 0.2, 0.2, 0.2})},
            {PasswordModel({0.25, 0.25, 0.25, 0.25, 0, 0}), PasswordModel({0, 0, 0.5, 0.25, 0.25, 0})},  // b = 0.5 with ties
        };
        double worst = 0;
        std::size_t comparisons = 0;
        for (const auto& [P, Q] : matrix) {
            const auto spec = build_ratio_spectrum(P, Q);
            for (std::size_t k : {2u, 3u}) {
                const auto exact = flatness_discrete(spec, k, k);
                const auto brute = brute_force_flatness(P, Q, k, k);
                for (std::size_t i = 1; i <= k; ++i, ++comparisons)
                    worst = std::max(worst, std::fabs(exact.at(i) - brute.at(i)));
            }
        }
        c.detail << " " << matrix.size() << " pairs, " << comparisons << " values, max |diff| " << worst;
        c.require(worst <= 1e-12, "max |diff| <= 1e-12");
    });

    report(7, "success-number estimator agrees with simulated games", [](Check& c) {
        const auto start = Clock::now();
        const auto P = zipf_model(0.9, 10'000);
        const auto Q = uniform_model(10'000);
        const std::size_t k = 4, users = 1000, t_max = 20;
        const auto sample = sample_w(P, Q, k, 1'000'000, 7001);
        const auto lambda = lambda_curve(sample, users, t_max);
        const auto mc = monte_carlo_sn(P, Q, k, users, t_max, 2000, 7002);
        // Standard error of the estimator from ten independent 1e5-samples.
        std::vector<std::vector<double>> batches;
        for (std::uint64_t b = 0; b < 10; ++b) {
            const auto est = lambda_curve(sample_w(P, Q, k, 100'000, 8000 + b), users, t_max);
            std::vector<double> row;
            for (const auto& p : est.points) row.push_back(p.value);
            batches.push_back(row);
        }
        double worst_ratio = 0;
        for (std::size_t i = 1; i <= t_max; ++i) {
            double mean = 0, var = 0;
            for (const auto& row : batches) mean += row[i - 1] / 10;
            for (const auto& row : batches) var += (row[i - 1] - mean) * (row[i - 1] - mean) / 9;
            const double se_lambda = std::sqrt(var / 10) / std::sqrt(10.0);  // scaled to N = 1e6
            const double se_mc = *mc.points[i - 1].stderr_;
            const double allowed = std::max(0.02 * lambda.at(i), 3 * std::hypot(se_lambda, se_mc));
            const double gap = std::fabs(lambda.at(i) - mc.at(i));
            worst_ratio = std::max(worst_ratio, gap / allowed);
            if (i == 1 || i == 10 || i == 20)
                c.detail << " i=" << i << ": estimator " << lambda.at(i) << ", games " << mc.at(i) << " (se " << se_mc
                         << ");";
            c.require(gap <= allowed, "agreement at i=" + std::to_string(i));
        }
        const double elapsed = seconds_since(start);
        c.detail << " worst gap/allowed " << worst_ratio << ", runtime " << elapsed << " s";
        c.require(elapsed < 300, "runtime < 5 min");
    });

    report(8, "beta kernels integrate to one", [](Check& c) {
        for (auto [u, j] : std::vector<std::pair<std::size_t, std::size_t>>{{100, 1}, {10'000, 50}, {10'000'000, 100}}) {
            const double v = integrate_beta_kernel(u, j).value;
            c.detail << " (U=" << u << ", j=" << j << "): " << v << ";";
            c.require(std::fabs(v - 1) <= 1e-6, "normalisation at U=" + std::to_string(u));
        }
    });

    report(9, "delta approximation against the estimator at U = 1e6", [](Check& c) {
        const auto P = zipf_model(0.9, 10'000);
        const auto Q = uniform_model(10'000);
        const std::size_t users = 1'000'000, i_max = 50;
        const auto sample = sample_w(P, Q, 4, 1'000'000, 7001);
        const auto lambda = lambda_curve(sample, users, i_max);
        const auto delta = lambda_delta_approx(phi_table(sample), users, i_max);
        double worst = 0;
        std::size_t worst_i = 0, over = 0;
        for (std::size_t i = 1; i <= i_max; ++i) {
            const double rel = std::fabs(delta.at(i) - lambda.at(i)) / lambda.at(i);
            if (rel > worst) worst = rel, worst_i = i;
            if (rel > 0.10) ++over;
        }
        c.detail << " worst relative error " << worst << " at i=" << worst_i << "; " << over
                 << " of 50 points exceed 10%; i=1: delta " << delta.at(1) << " vs " << lambda.at(1) << "; i=50: delta "
                 << delta.at(50) << " vs " << lambda.at(50);
        for (const auto& f : delta.meta.flags) c.detail << "; flag: " << f;
        c.require(worst <= 0.10, "relative error <= 10% for every i <= 50");
    });

    report(10, "collision bound for uniform honeywords over 1e6 passwords", [](Check& c) {
        const std::size_t n = 1'000'000;
        const double b20 = collision_bound_uniform(n, 20), b100 = collision_bound_uniform(n, 100);
        const auto u = uniform_model(n);
        const double union20 = collision_bound(u, u, 20), union100 = collision_bound(u, u, 100);
        c.detail << " k=20: " << b20 << " (union-bound sum " << union20 << "); k=100: " << b100
                 << " (union-bound sum " << union100 << ")";
        c.require(std::fabs(b20 - 2.19e-4) <= 1e-9, "k=20 bound 2.19e-4 +- 1e-9");
        c.require(b100 <= 5.1e-3, "k=100 bound <= 5.1e-3");
        c.require(union20 <= b20 && union100 <= b100, "union-bound sum within the simplified form");
    });

    report(11, "Monte Carlo commands reproduce bit-identically from their embedded config", [](Check& c) {
        const auto dir = std::filesystem::temp_directory_path();
        const std::vector<std::pair<std::string, std::vector<std::string>>> commands = {
            {"flatness.csv", {"flatness", "--p", "zipf:0.9:10000", "--q", "uniform:10000", "--k", "20", "--simulate",
                              "--trials", "100000"}},
            {"success.csv", {"success-number", "--p", "zipf:0.9:10000", "--q", "uniform:10000", "--k", "4", "--users",
                             "1000", "--t", "20", "--samples", "200000", "--simulate", "--trials", "100"}},
            {"missing.csv", {"missing-mass", "--zipf", "--n", "10000", "--s", "10000", "--simulate", "--reps", "5",
                             "--direct"}},
            {"success.json", {"success-number", "--p", "zipf:0.9:1000", "--q", "uniform:1000", "--k", "4", "--users",
                              "100", "--t", "5", "--samples", "20000", "--simulate", "--trials", "50", "--format",
                              "json"}},
        };
        for (auto [name, args] : commands) {
            const auto path = (dir / ("hm_accept_" + name)).string();
            args.insert(args.end(), {"--out", path});
            int code = 0;
            run_cli(args, code);
            c.require(code == 0, name + " first run");
            const std::string first = slurp(path);
            const std::string again = run_cli({"--config", path}, code);
            c.require(code == 0, name + " re-run");
            bool same;
            if (name.ends_with(".json")) {
                auto a = nlohmann::json::parse(first), b = nlohmann::json::parse(again);
                a.erase("elapsed_ms");
                b.erase("elapsed_ms");
                same = a == b;
            } else {
                same = first == again;
            }
            c.detail << " " << name << ": " << (same ? "identical" : "differs") << ";";
            c.require(same, name + " identical");
        }
    });

    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
