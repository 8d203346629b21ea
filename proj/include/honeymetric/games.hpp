#pragma once

// Sweetword-list generation, the optimal Bayesian attacker, Monte Carlo
// versions of the flatness and success-number games, and exact brute-force
// oracles for tiny instances.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <sstream>
#include <vector>

#include "honeymetric/error.hpp"
#include "honeymetric/metric_curve.hpp"
#include "honeymetric/numeric.hpp"
#include "honeymetric/parallel.hpp"
#include "honeymetric/password_model.hpp"
#include "honeymetric/ratio_spectrum.hpp"
#include "honeymetric/sampler.hpp"

namespace honeymetric {

struct SweetwordList {
    std::vector<std::size_t> words;
    std::size_t true_index = 0;

    std::size_t k() const noexcept { return words.size(); }
};

/// Real password from P, k-1 iid honeywords from Q, uniformly shuffled.
/// Repeated strings are allowed.
inline void gen_swl(const AliasSampler& P, const AliasSampler& Q, std::size_t k, Rng& rng, SweetwordList& out) {
    out.words.resize(k);
    out.words[0] = P(rng);
    for (std::size_t m = 1; m < k; ++m) out.words[m] = Q(rng);
    // Fisher-Yates, tracking where the real password goes.
    out.true_index = 0;
    for (std::size_t m = k - 1; m > 0; --m) {
        std::uniform_int_distribution<std::size_t> pick(0, m);
        const std::size_t r = pick(rng);
        std::swap(out.words[m], out.words[r]);
        if (out.true_index == m)
            out.true_index = r;
        else if (out.true_index == r)
            out.true_index = m;
    }
}

inline SweetwordList gen_swl(const PasswordModel& P, const PasswordModel& Q, std::size_t k, Rng& rng) {
    if (k < 2) throw domain_error("a sweetword list needs k >= 2");
    SweetwordList out;
    gen_swl(AliasSampler(P), AliasSampler(Q), k, rng, out);
    return out;
}

/// How a guess is judged in the flatness game.
enum class WinCheck {
    position,  // the guessed position must be the real password's position
    value      // any position holding the real password's string wins
};

struct GuessOrder {
    std::vector<std::size_t> positions;  // guess order, best first
    std::vector<double> posterior;       // per position, Pr[position is real | list]
    bool degenerate = false;             // every sweetword has P = 0; posteriors set uniform
};

/// Positions by descending P/Q (Q-zero with P > 0 first), ties in uniformly
/// random order, with the posterior of each position.
inline GuessOrder optimal_guess_order(const SweetwordList& swl, const PasswordModel& P, const PasswordModel& Q,
                                      Rng& rng) {
    const std::size_t k = swl.k();
    GuessOrder out;
    std::vector<double> key(k), ratio(k);
    std::size_t infinite = 0;
    for (std::size_t m = 0; m < k; ++m) {
        const double p = P.pmf(swl.words[m]), q = Q.pmf(swl.words[m]);
        ratio[m] = q == 0 ? (p > 0 ? kInf : 0.0) : p / q;
        key[m] = q == 0 ? (p > 0 ? kInf : 0.0) : ratio_key(p, q);
        if (std::isinf(ratio[m])) ++infinite;
    }
    out.positions.resize(k);
    std::iota(out.positions.begin(), out.positions.end(), std::size_t{0});
    std::shuffle(out.positions.begin(), out.positions.end(), rng);
    std::stable_sort(out.positions.begin(), out.positions.end(),
                     [&](std::size_t a, std::size_t b) { return key[a] > key[b]; });

    out.posterior.assign(k, 0.0);
    if (infinite > 0) {
        for (std::size_t m = 0; m < k; ++m)
            if (std::isinf(ratio[m])) out.posterior[m] = 1.0 / static_cast<double>(infinite);
        return out;
    }
    const double total = std::accumulate(ratio.begin(), ratio.end(), 0.0);
    if (total == 0) {
        out.degenerate = true;
        out.posterior.assign(k, 1.0 / static_cast<double>(k));
        return out;
    }
    for (std::size_t m = 0; m < k; ++m) out.posterior[m] = ratio[m] / total;
    return out;
}

/// Largest posterior of a list: the optimal attacker's chance on one guess.
inline double top_posterior(std::span<const std::size_t> words, const PasswordModel& P, const PasswordModel& Q) {
    double best = 0.0, total = 0.0;
    for (auto w : words) {
        const double p = P.pmf(w), q = Q.pmf(w);
        if (q == 0) {
            if (p > 0) return 1.0;  // only the real password can have Q = 0
            continue;
        }
        const double r = p / q;
        best = std::max(best, r);
        total += r;
    }
    return total > 0 ? best / total : 1.0 / static_cast<double>(words.size());
}

namespace detail {

inline void attach_binomial_errors(MetricCurve& curve, std::size_t trials) {
    const double n = static_cast<double>(trials);
    for (auto& p : curve.points) {
        const double se = std::sqrt(p.value * (1 - p.value) / n);
        p.stderr_ = se;
        if (p.value < 5 * se || 1 - p.value < 5 * se || p.value == 0 || p.value == 1) {
            std::ostringstream os;
            os << "eps(" << p.i << ") is within 5 sigma of 0 or 1; normal CI unreliable";
            curve.flag(os.str());
        }
    }
}

} // namespace detail

/// Monte Carlo flatness game: empirical Pr[real password within the first i
/// guesses of the optimal order], with binomial standard errors.
inline MetricCurve monte_carlo_flatness(const PasswordModel& P, const PasswordModel& Q, std::size_t k,
                                        std::size_t i_max, std::size_t trials, std::uint64_t seed,
                                        const ParallelOptions& par = {}, WinCheck check = WinCheck::position) {
    if (k < 2) throw domain_error("flatness needs k >= 2 sweetwords");
    if (i_max < 1 || i_max > k) throw domain_error("flatness needs 1 <= i_max <= k");
    if (trials == 0) throw domain_error("simulation needs at least one trial");
    const AliasSampler ps(P), qs(Q);

    const std::size_t chunks = (trials + par.chunk_size - 1) / std::max<std::size_t>(1, par.chunk_size);
    std::vector<std::vector<std::uint64_t>> hits(chunks, std::vector<std::uint64_t>(k, 0));
    for_each_chunk(trials, par, [&](std::size_t c, std::size_t begin, std::size_t end) {
        Rng rng(chunk_seed(seed, c));
        SweetwordList swl;
        for (std::size_t t = begin; t < end; ++t) {
            gen_swl(ps, qs, k, rng, swl);
            const auto order = optimal_guess_order(swl, P, Q, rng);
            for (std::size_t r = 0; r < k; ++r) {
                const std::size_t pos = order.positions[r];
                const bool win = check == WinCheck::position ? pos == swl.true_index
                                                             : swl.words[pos] == swl.words[swl.true_index];
                if (win) {
                    ++hits[c][r];
                    break;
                }
            }
        }
    });

    MetricCurve curve;
    curve.method = Method::monte_carlo;
    curve.meta.seed = seed;
    curve.meta.trials = trials;
    std::uint64_t cumulative = 0;
    for (std::size_t r = 0; r < i_max; ++r) {
        for (const auto& h : hits) cumulative += h[r];
        curve.points.push_back({r + 1, static_cast<double>(cumulative) / static_cast<double>(trials), std::nullopt});
    }
    detail::attach_binomial_errors(curve, trials);
    return curve;
}

/// Success counts of one success-number game at failure thresholds 1..t_max.
///
/// The attacker submits each account's top-posterior sweetword, visiting
/// accounts by descending top posterior w (ties in random order). Entry
/// t-1 holds the successes seen before the t-th failure (or all of them if
/// fewer than t failures occur).
inline std::vector<std::size_t> sn_trace(const AliasSampler& ps, const AliasSampler& qs, const PasswordModel& P,
                                         const PasswordModel& Q, std::size_t k, std::size_t users,
                                         std::size_t t_max, Rng& rng, WinCheck check = WinCheck::position) {
    struct Account {
        double w;
        bool success;
    };
    std::vector<Account> accounts(users);
    SweetwordList swl;
    for (auto& acc : accounts) {
        gen_swl(ps, qs, k, rng, swl);
        const auto order = optimal_guess_order(swl, P, Q, rng);
        const std::size_t guess = order.positions.front();
        acc.w = round_significant(order.posterior[guess], kRatioDigits);
        acc.success = check == WinCheck::position ? guess == swl.true_index
                                                  : swl.words[guess] == swl.words[swl.true_index];
    }
    std::shuffle(accounts.begin(), accounts.end(), rng);
    std::stable_sort(accounts.begin(), accounts.end(), [](const Account& a, const Account& b) { return a.w > b.w; });

    std::vector<std::size_t> counts(t_max, 0);
    std::size_t successes = 0, failures = 0;
    for (const auto& acc : accounts) {
        if (acc.success) {
            ++successes;
        } else {
            ++failures;
            if (failures <= t_max) counts[failures - 1] = successes;
            if (failures >= t_max) break;
        }
    }
    for (std::size_t t = failures; t < t_max; ++t) counts[t] = successes;
    return counts;
}

/// One success-number game: successes before the t-th failure.
inline std::size_t sn_game(const PasswordModel& P, const PasswordModel& Q, std::size_t k, std::size_t users,
                           std::size_t t, std::uint64_t seed) {
    if (k < 2 || users < 1 || t < 1) throw domain_error("sn_game needs k >= 2, U >= 1, t >= 1");
    Rng rng(chunk_seed(seed, 0));
    return sn_trace(AliasSampler(P), AliasSampler(Q), P, Q, k, users, t, rng).back();
}

/// Average success-number over independent games for thresholds 1..t_max,
/// with standard errors. Game g always uses seed chunk_seed(seed, g).
inline MetricCurve monte_carlo_sn(const PasswordModel& P, const PasswordModel& Q, std::size_t k,
                                  std::size_t users, std::size_t t_max, std::size_t games, std::uint64_t seed,
                                  const ParallelOptions& par = {}, WinCheck check = WinCheck::position) {
    if (k < 2 || users < 1 || t_max < 1 || games < 1)
        throw domain_error("monte_carlo_sn needs k >= 2, U >= 1, t_max >= 1, games >= 1");
    const AliasSampler ps(P), qs(Q);
    std::vector<std::vector<std::size_t>> traces(games);
    ParallelOptions per_game = par;
    per_game.chunk_size = 1;
    for_each_chunk(games, per_game, [&](std::size_t g, std::size_t, std::size_t) {
        Rng rng(chunk_seed(seed, g));
        traces[g] = sn_trace(ps, qs, P, Q, k, users, t_max, rng, check);
    });

    MetricCurve curve;
    curve.method = Method::monte_carlo;
    curve.meta.seed = seed;
    curve.meta.trials = games;
    const double n = static_cast<double>(games);
    for (std::size_t t = 0; t < t_max; ++t) {
        double sum = 0.0, sq = 0.0;
        for (const auto& tr : traces) {
            sum += static_cast<double>(tr[t]);
            sq += static_cast<double>(tr[t]) * static_cast<double>(tr[t]);
        }
        const double mean = sum / n;
        const double var = games > 1 ? std::max(0.0, (sq - n * mean * mean) / (n - 1)) : 0.0;
        curve.points.push_back({t + 1, mean, std::sqrt(var / n)});
    }
    return curve;
}

// ---------------------------------------------------------------------------
// Exact oracles
// ---------------------------------------------------------------------------

inline constexpr double kBruteForceFlatnessLimit = 1e6;
inline constexpr double kBruteForceSnLimit = 1e7;

namespace detail {

inline std::vector<PasswordModel::Entry> joint_support(const PasswordModel& P, const PasswordModel& Q) {
    std::vector<PasswordModel::Entry> out;
    for (std::size_t i = 0; i < P.size(); ++i)
        if (P.pmf(i) > 0 || Q.pmf(i) > 0) out.emplace_back(i, 0.0);
    return out;
}

inline double sweetword_key(const PasswordModel& P, const PasswordModel& Q, std::size_t w) {
    const double p = P.pmf(w), q = Q.pmf(w);
    return q == 0 ? (p > 0 ? kInf : 0.0) : ratio_key(p, q);
}

// Visits every (k-1)-tuple of Q-support indices with its probability.
template <class Fn>
void for_each_honeyword_tuple(const std::vector<PasswordModel::Entry>& q_support, std::size_t count, Fn&& fn) {
    std::vector<std::size_t> digit(count, 0);
    std::vector<std::size_t> words(count);
    while (true) {
        double prob = 1.0;
        for (std::size_t m = 0; m < count; ++m) {
            words[m] = q_support[digit[m]].first;
            prob *= q_support[digit[m]].second;
        }
        fn(std::span<const std::size_t>(words), prob);
        std::size_t m = 0;
        while (m < count && ++digit[m] == q_support.size()) digit[m++] = 0;
        if (m == count) break;
    }
}

} // namespace detail

/// Exact flatness by enumerating every (real password, honeyword tuple)
/// outcome; ties are averaged analytically over uniform tie orders.
/// Refuses when (support size)^k exceeds 1e6.
inline MetricCurve brute_force_flatness(const PasswordModel& P, const PasswordModel& Q, std::size_t k,
                                        std::size_t i_max) {
    if (P.size() != Q.size()) throw structural_error("P and Q must share a password space");
    if (k < 2) throw domain_error("flatness needs k >= 2 sweetwords");
    if (i_max < 1 || i_max > k) throw domain_error("flatness needs 1 <= i_max <= k");
    const double m = static_cast<double>(detail::joint_support(P, Q).size());
    const double cost = std::pow(m, static_cast<double>(k));
    if (cost > kBruteForceFlatnessLimit) {
        std::ostringstream os;
        os << "brute-force flatness refused: " << cost << " outcomes exceed the limit " << kBruteForceFlatnessLimit;
        throw infeasible_error(os.str(), cost);
    }
    const auto p_support = P.support();
    const auto q_support = Q.support();

    std::vector<double> eps(i_max, 0.0);
    for (auto [real, p_real] : p_support) {
        const double real_key = detail::sweetword_key(P, Q, real);
        detail::for_each_honeyword_tuple(q_support, k - 1, [&](std::span<const std::size_t> hws, double prob) {
            std::size_t above = 0, tied = 0;
            for (auto h : hws) {
                const double key = detail::sweetword_key(P, Q, h);
                if (key > real_key) ++above;
                else if (key == real_key) ++tied;
            }
            for (std::size_t i = 1; i <= i_max; ++i) {
                const double reach = std::clamp<double>(static_cast<double>(i) - static_cast<double>(above), 0.0,
                                                        static_cast<double>(tied + 1));
                eps[i - 1] += p_real * prob * reach / static_cast<double>(tied + 1);
            }
        });
    }
    MetricCurve curve;
    curve.method = Method::brute_force;
    for (std::size_t i = 1; i <= i_max; ++i) curve.points.push_back({i, eps[i - 1], std::nullopt});
    return curve;
}

namespace detail {

// Expected successes before the t-th failure, t = 1..t_max, for accounts
// attacked in the given order with independent success probabilities.
inline std::vector<double> expected_sn_for_order(std::span<const double> success, std::size_t t_max) {
    std::vector<double> prob(t_max, 0.0), es(t_max, 0.0), frozen(t_max + 1, 0.0);
    prob[0] = 1.0;
    for (double s : success) {
        std::vector<double> np(t_max, 0.0), nes(t_max, 0.0);
        for (std::size_t f = 0; f < t_max; ++f) {
            if (prob[f] == 0 && es[f] == 0) continue;
            np[f] += prob[f] * s;
            nes[f] += (es[f] + prob[f]) * s;
            if (f + 1 < t_max) {
                np[f + 1] += prob[f] * (1 - s);
                nes[f + 1] += es[f] * (1 - s);
            }
            frozen[f + 1] += es[f] * (1 - s);
        }
        prob.swap(np);
        es.swap(nes);
    }
    std::vector<double> out(t_max);
    double below = 0.0;  // expected successes in runs that ended with fewer than t failures
    for (std::size_t t = 1; t <= t_max; ++t) {
        below += es[t - 1];
        out[t - 1] = below + frozen[t];
    }
    return out;
}

} // namespace detail

/// Exact expected success-number for thresholds 1..t_max by enumerating all
/// U-tuples of sweetword-list outcomes and all attack orders within blocks
/// of equal w. Refuses when (support^k)^U * U! exceeds 1e7.
inline MetricCurve brute_force_sn(const PasswordModel& P, const PasswordModel& Q, std::size_t k, std::size_t users,
                                  std::size_t t_max) {
    if (P.size() != Q.size()) throw structural_error("P and Q must share a password space");
    if (k < 2 || users < 1 || t_max < 1) throw domain_error("brute_force_sn needs k >= 2, U >= 1, t_max >= 1");
    const double m = static_cast<double>(detail::joint_support(P, Q).size());
    const double cost = std::pow(std::pow(m, static_cast<double>(k)), static_cast<double>(users)) *
                        std::tgamma(static_cast<double>(users) + 1);
    if (cost > kBruteForceSnLimit) {
        std::ostringstream os;
        os << "brute-force success-number refused: cost " << cost << " exceeds the limit " << kBruteForceSnLimit;
        throw infeasible_error(os.str(), cost);
    }

    // Per-account outcomes, collapsed to (w, success probability).
    struct Outcome {
        double w, success, prob;
    };
    std::vector<Outcome> outcomes;
    const auto p_support = P.support();
    const auto q_support = Q.support();
    for (auto [real, p_real] : p_support) {
        const double real_key = detail::sweetword_key(P, Q, real);
        detail::for_each_honeyword_tuple(q_support, k - 1, [&](std::span<const std::size_t> hws, double prob) {
            std::vector<std::size_t> words(hws.begin(), hws.end());
            words.push_back(real);
            const double w = round_significant(top_posterior(words, P, Q), kRatioDigits);
            double top = real_key;
            for (auto h : hws) top = std::max(top, detail::sweetword_key(P, Q, h));
            double success = 0.0;
            if (real_key == top) {
                std::size_t ties = 1;
                for (auto h : hws) ties += detail::sweetword_key(P, Q, h) == top;
                success = 1.0 / static_cast<double>(ties);
            }
            const double pr = p_real * prob;
            auto it = std::find_if(outcomes.begin(), outcomes.end(),
                                   [&](const Outcome& o) { return o.w == w && o.success == success; });
            if (it == outcomes.end())
                outcomes.push_back({w, success, pr});
            else
                it->prob += pr;
        });
    }

    std::vector<double> lambda(t_max, 0.0);
    std::vector<std::size_t> digit(users, 0);
    std::vector<std::size_t> order(users);
    std::vector<double> success(users);
    while (true) {
        double prob = 1.0;
        for (auto d : digit) prob *= outcomes[d].prob;
        // Sort accounts by w descending; then enumerate permutations inside tie blocks.
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            const double wa = outcomes[digit[a]].w, wb = outcomes[digit[b]].w;
            return wa != wb ? wa > wb : a < b;
        });
        std::vector<std::pair<std::size_t, std::size_t>> blocks;
        for (std::size_t s = 0; s < users;) {
            std::size_t e = s + 1;
            while (e < users && outcomes[digit[order[e]]].w == outcomes[digit[order[s]]].w) ++e;
            blocks.emplace_back(s, e);
            s = e;
        }
        std::vector<double> acc(t_max, 0.0);
        std::size_t perms = 0;
        while (true) {
            for (std::size_t u = 0; u < users; ++u) success[u] = outcomes[digit[order[u]]].success;
            const auto sn = detail::expected_sn_for_order(success, t_max);
            for (std::size_t t = 0; t < t_max; ++t) acc[t] += sn[t];
            ++perms;
            // Advance the odometer of block permutations.
            std::size_t bidx = 0;
            for (; bidx < blocks.size(); ++bidx) {
                auto first = order.begin() + static_cast<std::ptrdiff_t>(blocks[bidx].first);
                auto last = order.begin() + static_cast<std::ptrdiff_t>(blocks[bidx].second);
                if (std::next_permutation(first, last)) break;  // wraps to sorted on false
            }
            if (bidx == blocks.size()) break;
        }
        for (std::size_t t = 0; t < t_max; ++t) lambda[t] += prob * acc[t] / static_cast<double>(perms);

        std::size_t u = 0;
        while (u < users && ++digit[u] == outcomes.size()) digit[u++] = 0;
        if (u == users) break;
    }

    MetricCurve curve;
    curve.method = Method::brute_force;
    for (std::size_t t = 0; t < t_max; ++t) curve.points.push_back({t + 1, lambda[t], std::nullopt});
    return curve;
}

} // namespace honeymetric
