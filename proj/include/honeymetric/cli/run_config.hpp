#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "honeymetric/error.hpp"
#include "honeymetric/models.hpp"
#include "honeymetric/password_model.hpp"

namespace honeymetric::cli {

/// Bad flags or an invalid combination of them; exit code 2.
class usage_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class Command { ratio_stats, flatness, success_number, missing_mass };
enum class Format { csv, json };

inline std::string to_string(Command c) {
    switch (c) {
        case Command::ratio_stats: return "ratio-stats";
        case Command::flatness: return "flatness";
        case Command::success_number: return "success-number";
        case Command::missing_mass: return "missing-mass";
    }
    return "unknown";
}

inline Command parse_command(const std::string& s) {
    if (s == "ratio-stats") return Command::ratio_stats;
    if (s == "flatness") return Command::flatness;
    if (s == "success-number") return Command::success_number;
    if (s == "missing-mass") return Command::missing_mass;
    throw usage_error("unknown command '" + s + "'");
}

struct RunConfig {
    Command command = Command::flatness;
    std::string p, q;                // model specs
    std::vector<std::string> q_candidates;  // ratio-stats --compare
    std::string example;             // named continuous model
    std::optional<std::size_t> k, users, i_max, t_max;
    std::size_t trials = 100'000;    // flatness Monte Carlo trials
    std::size_t games = 2000;        // success-number Monte Carlo games
    std::size_t samples = 1'000'000; // w-samples for the lambda curve
    std::uint64_t seed = 0;
    std::size_t threads = 0;
    std::string out;
    Format format = Format::csv;
    double tolerance = 1e-10;
    bool simulate = false, brute_force = false, delta_approx = false, compare = false, atom_ties = false;
    // missing-mass
    std::string kind;  // "uniform", "zipf" or "corpus"
    std::size_t n = 0, s = 0, reps = 20;
    double alpha = 0.9;
    std::string corpus;
    bool direct_only = false;
};

inline nlohmann::json to_json(const RunConfig& c) {
    auto opt = [](const std::optional<std::size_t>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
    return {{"command", to_string(c.command)},
            {"p", c.p},
            {"q", c.q},
            {"q_candidates", c.q_candidates},
            {"example", c.example},
            {"k", opt(c.k)},
            {"users", opt(c.users)},
            {"i", opt(c.i_max)},
            {"t", opt(c.t_max)},
            {"trials", c.trials},
            {"games", c.games},
            {"samples", c.samples},
            {"seed", c.seed},
            {"threads", c.threads},
            {"format", c.format == Format::csv ? "csv" : "json"},
            {"tolerance", c.tolerance},
            {"simulate", c.simulate},
            {"brute_force", c.brute_force},
            {"delta_approx", c.delta_approx},
            {"compare", c.compare},
            {"atom_ties", c.atom_ties},
            {"kind", c.kind},
            {"n", c.n},
            {"s", c.s},
            {"reps", c.reps},
            {"alpha", c.alpha},
            {"corpus", c.corpus},
            {"direct_only", c.direct_only}};
}

inline RunConfig config_from_json(const nlohmann::json& j) {
    try {
        RunConfig c;
        auto opt = [&](const char* key) -> std::optional<std::size_t> {
            if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
            return j.at(key).get<std::size_t>();
        };
        c.command = parse_command(j.at("command").get<std::string>());
        c.p = j.value("p", "");
        c.q = j.value("q", "");
        c.q_candidates = j.value("q_candidates", std::vector<std::string>{});
        c.example = j.value("example", "");
        c.k = opt("k");
        c.users = opt("users");
        c.i_max = opt("i");
        c.t_max = opt("t");
        c.trials = j.value("trials", c.trials);
        c.games = j.value("games", c.games);
        c.samples = j.value("samples", c.samples);
        c.seed = j.at("seed").get<std::uint64_t>();
        c.threads = j.value("threads", c.threads);
        c.format = j.value("format", "csv") == "json" ? Format::json : Format::csv;
        c.tolerance = j.value("tolerance", c.tolerance);
        c.simulate = j.value("simulate", false);
        c.brute_force = j.value("brute_force", false);
        c.delta_approx = j.value("delta_approx", false);
        c.compare = j.value("compare", false);
        c.atom_ties = j.value("atom_ties", false);
        c.kind = j.value("kind", "");
        c.n = j.value("n", c.n);
        c.s = j.value("s", c.s);
        c.reps = j.value("reps", c.reps);
        c.alpha = j.value("alpha", c.alpha);
        c.corpus = j.value("corpus", "");
        c.direct_only = j.value("direct_only", false);
        return c;
    } catch (const nlohmann::json::exception& e) {
        throw usage_error(std::string("malformed embedded config: ") + e.what());
    }
}

inline std::uint64_t fresh_seed() {
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

// ---------------------------------------------------------------------------
// Model specs: uniform:n | zipf:alpha:n | explicit:p1,p2,... | list:path
// ---------------------------------------------------------------------------

struct ModelSpec {
    std::string type;
    std::vector<std::string> params;
};

inline ModelSpec parse_model_spec(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw usage_error("model spec '" + text + "' needs the form type:param");
    ModelSpec spec{text.substr(0, colon), {}};
    const std::string rest = text.substr(colon + 1);
    if (spec.type == "list" || spec.type == "explicit") {
        spec.params.push_back(rest);  // paths may contain ':'
    } else {
        std::size_t start = 0;
        for (;;) {
            const auto next = rest.find(':', start);
            spec.params.push_back(rest.substr(start, next - start));
            if (next == std::string::npos) break;
            start = next + 1;
        }
    }
    if (spec.type == "uniform" && spec.params.size() == 1) return spec;
    if (spec.type == "zipf" && spec.params.size() == 2) return spec;
    if (spec.type == "list" && !spec.params[0].empty()) return spec;
    if (spec.type == "explicit" && !spec.params[0].empty()) return spec;
    throw usage_error("unrecognised model spec '" + text + "'");
}

inline std::size_t parse_count(const std::string& s, const char* what) {
    std::size_t pos = 0;
    unsigned long long v = 0;
    try {
        v = std::stoull(s, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos != s.size() || s.empty() || s[0] == '-') throw usage_error(std::string("bad ") + what + " '" + s + "'");
    return static_cast<std::size_t>(v);
}

inline double parse_real(const std::string& s, const char* what) {
    std::size_t pos = 0;
    double v = 0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos != s.size() || s.empty()) throw usage_error(std::string("bad ") + what + " '" + s + "'");
    return v;
}

/// A resolved (P, Q) pair on a shared password space.
struct ModelPair {
    PasswordModel P, Q;
};

inline PasswordModel indexed_model(const ModelSpec& spec) {
    if (spec.type == "uniform") return uniform_model(parse_count(spec.params[0], "password-space size"));
    if (spec.type == "zipf")
        return zipf_model(parse_real(spec.params[0], "Zipf exponent"), parse_count(spec.params[1], "password-space size"));
    std::vector<double> pmf;
    std::size_t start = 0;
    const auto& list = spec.params[0];
    for (;;) {
        const auto next = list.find(',', start);
        pmf.push_back(parse_real(list.substr(start, next - start), "probability"));
        if (next == std::string::npos) break;
        start = next + 1;
    }
    return PasswordModel(std::move(pmf), "explicit");
}

/// Empirical model of `corpus` over `vocab`, extending `vocab` with new words.
inline std::vector<double> list_pmf(const Corpus& corpus, std::vector<std::string>& vocab,
                                    std::unordered_map<std::string, std::size_t>& index) {
    std::vector<double> counts(vocab.size(), 0.0);
    for (const auto& w : corpus.entries) {
        auto [it, fresh] = index.try_emplace(w, vocab.size());
        if (fresh) {
            vocab.push_back(w);
            counts.push_back(0.0);
        }
        counts[it->second] += 1;
    }
    for (auto& c : counts) c /= static_cast<double>(corpus.size());
    return counts;
}

/// Resolves both specs. Two list models share the union of their
/// vocabularies; a list model cannot be paired with an indexed one.
inline ModelPair resolve_pair(const std::string& p_text, const std::string& q_text) {
    if (p_text.empty() || q_text.empty()) throw usage_error("both --p and --q are required");
    const auto ps = parse_model_spec(p_text), qs = parse_model_spec(q_text);
    if ((ps.type == "list") != (qs.type == "list"))
        throw usage_error("a list model can only be paired with another list model");
    if (ps.type == "list") {
        const auto pc = read_corpus(ps.params[0]), qc = read_corpus(qs.params[0]);
        if (pc.size() == 0 || qc.size() == 0) throw usage_error("list models need non-empty corpora");
        std::vector<std::string> vocab;
        std::unordered_map<std::string, std::size_t> index;
        auto pp = list_pmf(pc, vocab, index);
        auto qp = list_pmf(qc, vocab, index);
        pp.resize(vocab.size(), 0.0);
        return {PasswordModel(std::move(pp), "list:" + ps.params[0]), PasswordModel(std::move(qp), "list:" + qs.params[0])};
    }
    auto P = indexed_model(ps), Q = indexed_model(qs);
    if (P.size() != Q.size()) throw usage_error("P and Q have password spaces of different sizes");
    return {std::move(P), std::move(Q)};
}

} // namespace honeymetric::cli
