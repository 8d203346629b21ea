#pragma once

// Command-line front end. `run` parses arguments, executes one command and
// maps failures to exit codes: 2 usage, 3 I/O, 4 numerical.

#include <iostream>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "honeymetric/cli/commands.hpp"
#include "honeymetric/cli/run_config.hpp"
#include "honeymetric/error.hpp"

namespace honeymetric::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitNumerical = 4;

inline int run(std::vector<std::string> args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Honeyword security metrics: flatness and success-number curves", "honeymetric"};
    app.require_subcommand(0, 1);

    RunConfig c;
    std::string config_path, rerun_out;
    app.add_option("--config", config_path, "Re-run the config embedded in a previous CSV or JSON output");
    app.add_option("--out", rerun_out, "Output path for --config re-runs (default stdout)");

    std::size_t k = 0, users = 0, i_max = 0, t_max = 0;
    std::vector<std::string> qs;
    std::uint64_t seed = 0;
    std::string format = "csv";
    struct Flags {
        CLI::Option *k, *users, *i, *t, *seed;
    };

    auto add_common = [&](CLI::App* sub, Flags& f) {
        sub->add_option("--p", c.p, "Real-password model: uniform:n | zipf:alpha:n | explicit:p1,p2,... | list:path");
        sub->add_option("--q", qs, "Honeyword model (same grammar)");
        f.k = sub->add_option("--k", k, "Sweetwords per account");
        f.seed = sub->add_option("--seed", seed, "RNG seed (random when omitted)");
        sub->add_option("--threads", c.threads, "Worker threads (0 = all cores)");
        sub->add_option("--out", c.out, "Output file (default stdout)");
        sub->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
        f.users = f.i = f.t = nullptr;
    };

    Flags ratio_f{}, flat_f{}, sn_f{}, mm_f{};
    auto* ratio = app.add_subcommand("ratio-stats", "M, b and ratio-group statistics of a (P, Q) pair");
    add_common(ratio, ratio_f);
    ratio->add_flag("--compare", c.compare, "Rank several --q candidates by (M, b), then eps(1)");

    auto* flat = app.add_subcommand("flatness", "Flatness curve eps(i)");
    add_common(flat, flat_f);
    flat_f.i = flat->add_option("--i", i_max, "Largest guess count (default k)");
    flat->add_option("--example", c.example, "Named continuous model: linear | identity");
    flat->add_option("--trials", c.trials, "Monte Carlo trials for --simulate");
    flat->add_option("--tolerance", c.tolerance, "Absolute quadrature tolerance");
    flat->add_flag("--simulate", c.simulate, "Add Monte Carlo columns");
    flat->add_flag("--brute-force", c.brute_force, "Add exhaustive-enumeration column (tiny instances)");

    auto* sn = app.add_subcommand("success-number", "Success-number curve lambda_U(i)");
    add_common(sn, sn_f);
    sn_f.users = sn->add_option("--users", users, "Number of accounts U");
    sn_f.t = sn->add_option("--t", t_max, "Largest failure count (default min(U, 20))");
    sn_f.i = sn->add_option("--i", i_max, "Alias of --t");
    sn->add_option("--samples", c.samples, "w-samples N for the estimator");
    sn->add_option("--trials", c.games, "Monte Carlo games for --simulate");
    sn->add_flag("--simulate", c.simulate, "Add Monte Carlo game columns");
    sn->add_flag("--brute-force", c.brute_force, "Add exhaustive-enumeration column (tiny instances)");
    sn->add_flag("--delta-approx", c.delta_approx, "Use the delta-kernel approximation");
    sn->add_flag("--random-ties", c.atom_ties, "Treat accounts with equal w as attacked in random order");

    auto* mm = app.add_subcommand("missing-mass", "Expected missing mass of a List model");
    add_common(mm, mm_f);
    bool uniform = false, zipf = false;
    mm->add_flag("--uniform", uniform, "Uniform password distribution");
    mm->add_flag("--zipf", zipf, "Zipf password distribution");
    mm->add_option("--n", c.n, "Password-space size");
    mm->add_option("--s", c.s, "Training corpus size |S|");
    mm->add_option("--alpha", c.alpha, "Zipf exponent");
    mm->add_option("--corpus", c.corpus, "Training corpus; --p list:path gives the real passwords");
    mm->add_option("--reps", c.reps, "Repetitions for --simulate");
    mm->add_flag("--simulate", c.simulate, "Train on simulated corpora and report mean and spread");
    mm->add_flag("--direct", c.direct_only, "Direct summation only (skip the series)");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    try {
        if (!config_path.empty()) {
            if (!app.get_subcommands().empty()) throw usage_error("--config cannot be combined with a command");
            RunConfig again = load_embedded_config(config_path);
            again.out = rerun_out;
            execute(again, out);
            return kExitOk;
        }
        if (app.get_subcommands().empty()) {
            err << app.help();
            return kExitUsage;
        }
        const auto* chosen = app.get_subcommands().front();
        const Flags& f = chosen == ratio ? ratio_f : chosen == flat ? flat_f : chosen == sn ? sn_f : mm_f;
        c.command = parse_command(chosen->get_name());
        if (f.k->count()) c.k = k;
        if (f.users && f.users->count()) c.users = users;
        if (f.i && f.i->count()) c.i_max = i_max;
        if (f.t && f.t->count()) c.t_max = t_max;
        c.seed = f.seed->count() ? seed : fresh_seed();
        c.format = format == "json" ? Format::json : Format::csv;
        if (c.compare) {
            c.q_candidates = qs;
        } else if (qs.size() > 1) {
            throw usage_error("--q given more than once (use ratio-stats --compare)");
        } else if (!qs.empty()) {
            c.q = qs.front();
        }
        if (c.command == Command::missing_mass) {
            if (uniform + zipf + !c.corpus.empty() > 1) throw usage_error("choose one of --uniform, --zipf, --corpus");
            c.kind = uniform ? "uniform" : zipf ? "zipf" : c.corpus.empty() ? "" : "corpus";
        }
        execute(c, out);
        return kExitOk;
    } catch (const usage_error& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const structural_error& e) {
        err << "invalid input: " << e.what() << '\n';
        return kExitUsage;
    } catch (const domain_error& e) {
        err << "invalid input: " << e.what() << '\n';
        return kExitUsage;
    } catch (const infeasible_error& e) {
        err << "infeasible: " << e.what() << '\n';
        return kExitUsage;
    } catch (const io_error& e) {
        err << "I/O error: " << e.what() << " (" << e.path() << ")\n";
        return kExitIo;
    } catch (const numerical_error& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    }
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    return run(std::vector<std::string>(argv + 1, argv + argc), out, err);
}

} // namespace honeymetric::cli
