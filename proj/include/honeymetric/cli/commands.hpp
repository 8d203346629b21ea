#pragma once

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "honeymetric/cli/run_config.hpp"
#include "honeymetric/flatness.hpp"
#include "honeymetric/games.hpp"
#include "honeymetric/metric_curve.hpp"
#include "honeymetric/missing_mass.hpp"
#include "honeymetric/models.hpp"
#include "honeymetric/parallel.hpp"
#include "honeymetric/ratio_spectrum.hpp"
#include "honeymetric/success_number.hpp"

namespace honeymetric::cli {

/// Shortest decimal text that reads back as the same double.
inline std::string exact_text(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

/// A report: a CSV table plus the JSON document carrying the same numbers.
struct Report {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
    nlohmann::json json = nlohmann::json::object();
};

inline void emit(const Report& report, const RunConfig& config, double elapsed_ms, std::ostream& out) {
    if (config.format == Format::json) {
        auto doc = report.json;
        doc["seed"] = config.seed;
        doc["threads"] = resolve_threads(static_cast<unsigned>(config.threads));
        doc["elapsed_ms"] = elapsed_ms;
        doc["config"] = to_json(config);
        out << doc.dump(2) << '\n';
        return;
    }
    out << "# config: " << to_json(config).dump() << '\n';
    for (std::size_t c = 0; c < report.columns.size(); ++c) out << (c ? "," : "") << report.columns[c];
    out << '\n';
    for (const auto& row : report.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << row[c];
        out << '\n';
    }
}

inline ParallelOptions parallel_options(const RunConfig& c) {
    ParallelOptions par;
    par.threads = static_cast<unsigned>(c.threads);
    return par;
}

inline std::size_t require(const std::optional<std::size_t>& v, const char* flag) {
    if (!v) throw usage_error(std::string(flag) + " is required");
    return *v;
}

inline nlohmann::json stderr_column(const MetricCurve& curve) {
    auto col = nlohmann::json::array();
    for (const auto& p : curve.points) col.push_back(p.stderr_ ? nlohmann::json(*p.stderr_) : nlohmann::json(nullptr));
    return col;
}

// ---------------------------------------------------------------------------

inline Report cmd_ratio_stats(const RunConfig& c) {
    Report r;
    if (c.compare) {
        if (c.q_candidates.empty()) throw usage_error("--compare needs at least one --q");
        struct Row {
            std::string q;
            double M, b, eps1;
        };
        const std::size_t k = c.k.value_or(2);
        std::vector<Row> rows;
        for (const auto& q : c.q_candidates) {
            const auto pair = resolve_pair(c.p, q);
            const auto spec = build_ratio_spectrum(pair.P, pair.Q);
            rows.push_back({q, spec.M(), spec.b(), flatness_first_guess(spec, k)});
        }
        std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
            const double ma = round_significant(a.M), mb = round_significant(b.M);
            if (ma != mb) return ma < mb;
            if (a.b != b.b) return a.b < b.b;
            return a.eps1 < b.eps1;
        });
        r.columns = {"rank", "q", "M", "b", "epsilon_1"};
        r.json["metric"] = "ratio-compare";
        r.json["k"] = k;
        r.json["ranking"] = nlohmann::json::array();
        for (std::size_t i = 0; i < rows.size(); ++i) {
            r.rows.push_back({std::to_string(i + 1), rows[i].q, exact_text(rows[i].M), exact_text(rows[i].b),
                              exact_text(rows[i].eps1)});
            r.json["ranking"].push_back(
                {{"rank", i + 1}, {"q", rows[i].q}, {"M", rows[i].M}, {"b", rows[i].b}, {"epsilon_1", rows[i].eps1}});
        }
        return r;
    }

    const auto pair = resolve_pair(c.p, c.q);
    const auto spec = build_ratio_spectrum(pair.P, pair.Q);
    std::vector<std::pair<std::string, double>> values = {{"M", spec.M()},
                                                          {"b", spec.b()},
                                                          {"groups", static_cast<double>(spec.groups().size())},
                                                          {"identity_deviation", verify_ratio_identity(spec)}};
    if (c.k) values.emplace_back("epsilon_1", flatness_first_guess(spec, *c.k));
    // Zipf against uniform on the same space has the asymptotic value (1 - alpha) n^alpha.
    const auto ps = parse_model_spec(c.p), qs = parse_model_spec(c.q);
    if (ps.type == "zipf" && qs.type == "uniform" && ps.params[1] == qs.params[0]) {
        const double alpha = parse_real(ps.params[0], "Zipf exponent");
        const double n = static_cast<double>(parse_count(ps.params[1], "password-space size"));
        const double approx = (1 - alpha) * std::pow(n, alpha);
        values.emplace_back("M_asymptotic", approx);
        values.emplace_back("M_asymptotic_gap", std::fabs(spec.M() - approx) / spec.M());
    }
    r.columns = {"quantity", "value"};
    r.json["metric"] = "ratio-stats";
    for (const auto& [name, v] : values) {
        r.rows.push_back({name, exact_text(v)});
        r.json[name] = v;
    }
    return r;
}

inline Report cmd_flatness(const RunConfig& c) {
    const std::size_t k = require(c.k, "--k");
    if (k < 2) throw usage_error("--k must be at least 2");
    const std::size_t i_max = c.i_max.value_or(k);
    if (i_max < 1 || i_max > k) throw usage_error("--i must lie in 1..k");

    MetricCurve curve;
    std::optional<MetricCurve> mc, bf;
    if (!c.example.empty()) {
        if (!c.p.empty() || !c.q.empty()) throw usage_error("--example excludes --p and --q");
        if (c.simulate || c.brute_force) throw usage_error("continuous examples support neither --simulate nor --brute-force");
        ContinuousRatioModel model;
        if (c.example == "linear")
            model = linear_example();
        else if (c.example == "identity")
            model = identity_example();
        else
            throw usage_error("unknown example '" + c.example + "' (linear, identity)");
        QuadratureOptions opts;
        opts.abs_tol = c.tolerance;
        curve = flatness_continuous(model, k, i_max, opts).curve;
    } else {
        const auto pair = resolve_pair(c.p, c.q);
        curve = flatness_discrete(build_ratio_spectrum(pair.P, pair.Q), k, i_max);
        if (c.simulate) mc = monte_carlo_flatness(pair.P, pair.Q, k, i_max, c.trials, c.seed, parallel_options(c));
        if (c.brute_force) bf = brute_force_flatness(pair.P, pair.Q, k, i_max);
    }

    Report r;
    r.columns = {"i", "epsilon", "method"};
    if (mc) r.columns.insert(r.columns.end(), {"mc_epsilon", "mc_stderr", "mc_ci_low", "mc_ci_high"});
    if (bf) r.columns.push_back("bf_epsilon");
    for (std::size_t n = 0; n < curve.size(); ++n) {
        const auto& p = curve.points[n];
        std::vector<std::string> row = {std::to_string(p.i), exact_text(p.value), std::string(to_string(curve.method))};
        if (mc) {
            const auto& m = mc->points[n];
            const double se = m.stderr_.value_or(0.0);
            row.insert(row.end(), {exact_text(m.value), exact_text(se), exact_text(std::max(0.0, m.value - 1.96 * se)),
                                   exact_text(std::min(1.0, m.value + 1.96 * se))});
        }
        if (bf) row.push_back(exact_text(bf->points[n].value));
        r.rows.push_back(std::move(row));
    }
    r.json["metric"] = "flatness";
    r.json["curve"] = to_json(curve);
    if (mc) {
        r.json["simulation"] = to_json(*mc);
        r.json["stderr"] = stderr_column(*mc);
        r.json["trials"] = c.trials;
    }
    if (bf) r.json["brute_force"] = to_json(*bf);
    return r;
}

inline Report cmd_success_number(const RunConfig& c) {
    const std::size_t k = require(c.k, "--k");
    if (k < 2) throw usage_error("--k must be at least 2");
    const std::size_t users = require(c.users, "--users");
    if (users < 1) throw usage_error("--users must be at least 1");
    const std::size_t t_max = c.t_max ? *c.t_max : c.i_max.value_or(std::min<std::size_t>(users, 20));
    if (t_max < 1 || t_max > users) throw usage_error("--t must lie in 1..U");
    if (c.samples < 1) throw usage_error("--samples must be at least 1");

    const auto pair = resolve_pair(c.p, c.q);
    const auto sample = sample_w(pair.P, pair.Q, k, c.samples, c.seed, parallel_options(c));
    MetricCurve curve;
    if (c.delta_approx) {
        if (users < 2) throw usage_error("--delta-approx needs --users >= 2");
        const auto phi = phi_table(sample);
        if (phi.degenerate())
            throw numerical_error("every sampled w equals " + exact_text(sample.values().front()) +
                                      ", so E[v_t] cannot be inverted; use the default estimator instead of --delta-approx",
                                  0.0);
        curve = lambda_delta_approx(phi, users, t_max);
    } else {
        curve = lambda_curve(sample, users, t_max, c.atom_ties ? TieHandling::random_order : TieHandling::atomless);
    }
    curve.meta.seed = c.seed;
    curve.meta.trials = c.samples;

    std::optional<MetricCurve> mc, bf;
    // Games use a seed stream separate from the w-samples.
    if (c.simulate)
        mc = monte_carlo_sn(pair.P, pair.Q, k, users, t_max, c.games, splitmix64(c.seed), parallel_options(c));
    if (c.brute_force) bf = brute_force_sn(pair.P, pair.Q, k, users, t_max);

    Report r;
    r.columns = {"i", "lambda", "method", "U", "N", "seed"};
    if (mc) r.columns.insert(r.columns.end(), {"mc_lambda", "mc_stderr", "mc_games"});
    if (bf) r.columns.push_back("bf_lambda");
    for (std::size_t n = 0; n < curve.size(); ++n) {
        const auto& p = curve.points[n];
        std::vector<std::string> row = {std::to_string(p.i),  exact_text(p.value),      std::string(to_string(curve.method)),
                                        std::to_string(users), std::to_string(c.samples), std::to_string(c.seed)};
        if (mc)
            row.insert(row.end(), {exact_text(mc->points[n].value), exact_text(mc->points[n].stderr_.value_or(0.0)),
                                   std::to_string(c.games)});
        if (bf) row.push_back(exact_text(bf->points[n].value));
        r.rows.push_back(std::move(row));
    }
    r.json["metric"] = "success-number";
    r.json["curve"] = to_json(curve);
    r.json["U"] = users;
    r.json["N"] = c.samples;
    if (mc) {
        r.json["simulation"] = to_json(*mc);
        r.json["stderr"] = stderr_column(*mc);
        r.json["trials"] = c.games;
    }
    if (bf) r.json["brute_force"] = to_json(*bf);
    return r;
}

inline Report cmd_missing_mass(const RunConfig& c) {
    std::vector<std::pair<std::string, double>> values;
    std::optional<PasswordModel> truth;
    if (c.kind == "uniform") {
        if (c.n < 1) throw usage_error("--n must be at least 1");
        const auto mm = missing_mass_uniform(c.n, c.s);
        values = {{"exact", mm.exact}, {"exponential", mm.exponential}};
        if (c.simulate) truth = uniform_model(c.n);
    } else if (c.kind == "zipf") {
        if (c.n < 1) throw usage_error("--n must be at least 1");
        values.emplace_back("direct", missing_mass_zipf_direct(c.alpha, c.n, c.s));
        if (!c.direct_only) {
            try {
                values.emplace_back("series_zeta", missing_mass_zipf_series(c.alpha, c.n, c.s).value);
                SeriesOptions finite;
                finite.power_sums = PowerSums::finite;
                values.emplace_back("series_finite", missing_mass_zipf_series(c.alpha, c.n, c.s, finite).value);
            } catch (const numerical_error& e) {
                throw numerical_error(std::string(e.what()) + " (rerun with --direct)", e.achieved_error());
            }
        }
        if (c.simulate) truth = zipf_model(c.alpha, c.n);
    } else if (c.kind == "corpus") {
        if (c.corpus.empty() || c.p.empty()) throw usage_error("corpus missing mass needs --corpus and --p list:path");
        const auto ps = parse_model_spec(c.p);
        if (ps.type != "list") throw usage_error("corpus missing mass needs --p list:path");
        const auto pair = resolve_pair(c.p, "list:" + c.corpus);
        values.emplace_back("missing_mass", missing_mass(pair.P, pair.Q));
        if (c.simulate) throw usage_error("--simulate needs --uniform or --zipf");
    } else {
        throw usage_error("missing-mass needs --uniform, --zipf or --corpus");
    }
    if (truth) {
        const auto sim = simulate_missing_mass(*truth, c.s, c.reps, c.seed);
        values.emplace_back("simulated_mean", sim.mean);
        values.emplace_back("simulated_stddev", sim.stddev);
        values.emplace_back("repetitions", static_cast<double>(c.reps));
    }
    Report r;
    r.columns = {"quantity", "value"};
    r.json["metric"] = "missing-mass";
    for (const auto& [name, v] : values) {
        r.rows.push_back({name, exact_text(v)});
        r.json[name] = v;
    }
    return r;
}

/// Runs a resolved config and writes the report to `out` or to config.out.
inline void execute(const RunConfig& c, std::ostream& out) {
    const auto start = std::chrono::steady_clock::now();
    Report r;
    switch (c.command) {
        case Command::ratio_stats: r = cmd_ratio_stats(c); break;
        case Command::flatness: r = cmd_flatness(c); break;
        case Command::success_number: r = cmd_success_number(c); break;
        case Command::missing_mass: r = cmd_missing_mass(c); break;
    }
    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    if (c.out.empty()) {
        emit(r, c, ms, out);
        return;
    }
    std::ofstream file(c.out, std::ios::binary);
    if (!file) throw io_error("cannot write output", c.out);
    emit(r, c, ms, file);
    if (!file) throw io_error("error while writing output", c.out);
}

/// Extracts the embedded config of a previous CSV or JSON output.
inline RunConfig load_embedded_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open config source", path);
    std::string first;
    std::getline(in, first);
    const std::string marker = "# config: ";
    try {
        if (first.rfind(marker, 0) == 0) return config_from_json(nlohmann::json::parse(first.substr(marker.size())));
        std::string rest((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        const auto doc = nlohmann::json::parse(first + "\n" + rest);
        return config_from_json(doc.contains("config") ? doc.at("config") : doc);
    } catch (const nlohmann::json::exception& e) {
        throw usage_error("no embedded config in " + path + ": " + e.what());
    }
}

} // namespace honeymetric::cli
