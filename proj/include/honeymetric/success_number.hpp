#pragma once

// Success-number lambda_U(i) from a Monte Carlo sample of the per-account
// top posterior w. The distribution a(t) of w is never binned: integrals
// against a(t) are averages over the sorted sample.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "honeymetric/error.hpp"
#include "honeymetric/games.hpp"
#include "honeymetric/metric_curve.hpp"
#include "honeymetric/numeric.hpp"
#include "honeymetric/parallel.hpp"
#include "honeymetric/password_model.hpp"
#include "honeymetric/quadrature.hpp"
#include "honeymetric/sampler.hpp"

namespace honeymetric {

inline constexpr std::size_t kDefaultWSamples = 1'000'000;

/// Sorted sample of w with suffix sums for O(log N) queries of E[v_t].
class WSample {
public:
    WSample() = default;

    WSample(std::vector<double> values, std::size_t k, std::uint64_t seed = 0, std::string source = {})
        : values_(std::move(values)), k_(k), seed_(seed), source_(std::move(source)) {
        if (k_ < 2) throw domain_error("a w-sample needs k >= 2");
        if (values_.empty()) throw domain_error("a w-sample needs at least one value");
        const double lo = 1.0 / static_cast<double>(k_) - 1e-12;
        for (double v : values_)
            if (!(v >= lo && v <= 1 + 1e-12)) {
                std::ostringstream os;
                os << "w value " << v << " outside [1/k, 1]";
                throw structural_error(os.str());
            }
        std::sort(values_.begin(), values_.end());
        const std::size_t n = values_.size();
        tail_loss_.assign(n + 1, 0.0);
        for (std::size_t s = n; s-- > 0;) tail_loss_[s] = tail_loss_[s + 1] + (1 - std::min(values_[s], 1.0));
        mean_ = 1 - tail_loss_[0] / static_cast<double>(n);
    }

    std::span<const double> values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }
    std::size_t k() const noexcept { return k_; }
    std::uint64_t seed() const noexcept { return seed_; }
    const std::string& source() const noexcept { return source_; }
    double mean() const noexcept { return mean_; }

    /// 1 - E[v_t] = (1/N) sum_{v >= t} (1 - v), or over v > t when strict.
    double shortfall(double t, bool strict = false) const {
        auto it = strict ? std::upper_bound(values_.begin(), values_.end(), t)
                         : std::lower_bound(values_.begin(), values_.end(), t);
        return tail_loss_[static_cast<std::size_t>(it - values_.begin())] / static_cast<double>(values_.size());
    }

    std::size_t first_index_at_least(double t) const {
        return static_cast<std::size_t>(std::lower_bound(values_.begin(), values_.end(), t) - values_.begin());
    }

    /// Suffix sum of (1 - v) from sorted index s.
    double tail_loss(std::size_t s) const { return tail_loss_[s]; }

private:
    std::vector<double> values_;
    std::size_t k_ = 2;
    std::uint64_t seed_ = 0;
    std::string source_;
    std::vector<double> tail_loss_;
    double mean_ = 0.0;
};

/// E[v_t] with v_t(x) = x for x >= t and 1 otherwise, as a sample average.
inline double expected_v(const WSample& sample, double t) {
    if (!(t >= 0 && t <= 1)) throw domain_error("expected_v needs t in [0, 1]");
    return 1 - sample.shortfall(t);
}

/// Draws N sweetword lists and records each list's top posterior.
/// Chunk c of the draws uses seed chunk_seed(seed, c).
inline WSample sample_w(const PasswordModel& P, const PasswordModel& Q, std::size_t k, std::size_t N,
                        std::uint64_t seed, const ParallelOptions& par = {}) {
    if (k < 2) throw domain_error("sample_w needs k >= 2");
    if (N < 1) throw domain_error("sample_w needs N >= 1");
    if (P.size() != Q.size()) throw structural_error("P and Q must share a password space");
    const AliasSampler ps(P), qs(Q);
    std::vector<double> values(N);
    for_each_chunk(N, par, [&](std::size_t c, std::size_t begin, std::size_t end) {
        Rng rng(chunk_seed(seed, c));
        SweetwordList swl;
        for (std::size_t s = begin; s < end; ++s) {
            gen_swl(ps, qs, k, rng, swl);
            values[s] = top_posterior(swl.words, P, Q);
        }
    });
    return WSample(std::move(values), k, seed, P.label() + " vs " + Q.label());
}

/// Text list of doubles plus a JSON sidecar at `path + ".json"`.
inline void write_wsample(const WSample& sample, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot write w-sample", path);
    out.precision(17);
    for (double v : sample.values()) out << v << '\n';
    std::ofstream meta(path + ".json");
    if (!meta) throw io_error("cannot write w-sample sidecar", path + ".json");
    meta << nlohmann::json{{"k", sample.k()}, {"seed", sample.seed()}, {"N", sample.size()},
                           {"source", sample.source()}}
                .dump(2)
         << '\n';
}

inline WSample read_wsample(const std::string& path) {
    std::ifstream meta_in(path + ".json");
    if (!meta_in) throw io_error("cannot open w-sample sidecar", path + ".json");
    const auto meta = nlohmann::json::parse(meta_in);
    std::ifstream in(path);
    if (!in) throw io_error("cannot open w-sample", path);
    std::vector<double> values;
    for (double v; in >> v;) values.push_back(v);
    if (values.size() != meta.at("N").get<std::size_t>()) throw io_error("w-sample length disagrees with sidecar", path);
    return WSample(std::move(values), meta.at("k").get<std::size_t>(), meta.at("seed").get<std::uint64_t>(),
                   meta.at("source").get<std::string>());
}

// ---------------------------------------------------------------------------
// Beta kernels U C(U-1, j-1) x^{U-j} (1-x)^{j-1}
// ---------------------------------------------------------------------------

/// log of U C(U-1, j-1) for j = 1..j_max.
inline std::vector<double> log_kernel_coefficients(std::size_t users, std::size_t j_max) {
    const double u = static_cast<double>(users);
    std::vector<double> out(j_max + 1, -kInf);
    for (std::size_t j = 1; j <= j_max && j <= users; ++j)
        out[j] = std::log(u) + log_choose(u - 1, static_cast<double>(j - 1));
    return out;
}

/// Kernel density at x = 1 - shortfall, evaluated in log space.
inline double beta_kernel(std::size_t users, std::size_t j, double shortfall, double log_coefficient) {
    const double ex = static_cast<double>(users - j), ej = static_cast<double>(j - 1);
    if (shortfall <= 0) return j == 1 ? std::exp(log_coefficient) : 0.0;
    if (shortfall >= 1) return j == users ? std::exp(log_coefficient) : 0.0;
    return std::exp(log_coefficient + ex * std::log1p(-shortfall) + xlogy(ej, shortfall));
}

/// Pr[Binomial(U, y) <= j - 1]: the kernel's mass on x in [0, 1 - y].
inline double kernel_mass_below(std::size_t users, std::size_t j, double y) {
    if (y <= 0) return 1.0;
    if (y >= 1) return j > users ? 1.0 : 0.0;
    const double u = static_cast<double>(users);
    const double ly = std::log(y), l1y = std::log1p(-y);
    double total = 0.0;
    for (std::size_t m = 0; m < j && m <= users; ++m) {
        const double md = static_cast<double>(m);
        total += std::exp(log_choose(u, md) + md * ly + (u - md) * l1y);
    }
    return std::min(total, 1.0);
}

/// Kernel mass over shortfalls [y_lo, y_hi] (x in [1 - y_hi, 1 - y_lo]).
/// Narrow intervals use the midpoint density to avoid cancellation.
inline double kernel_mass(std::size_t users, std::size_t j, double y_lo, double y_hi, double log_coefficient) {
    if (y_hi <= y_lo) return 0.0;
    const double u = static_cast<double>(users);
    const double scale = std::max(y_hi, std::sqrt(static_cast<double>(j)) / u);
    if (y_hi - y_lo < 1e-4 * scale) return (y_hi - y_lo) * beta_kernel(users, j, 0.5 * (y_lo + y_hi), log_coefficient);
    return std::max(0.0, kernel_mass_below(users, j, y_lo) - kernel_mass_below(users, j, y_hi));
}

/// Numerical integral of the kernel over [0, 1], with breakpoints around
/// its mode so the adaptive scheme sees the peak even for U ~ 1e7.
inline QuadratureResult integrate_beta_kernel(std::size_t users, std::size_t j, const QuadratureOptions& opts = {}) {
    if (j < 1 || j > users) throw domain_error("beta kernel needs 1 <= j <= U");
    const double u = static_cast<double>(users), jd = static_cast<double>(j);
    const double log_c = std::log(u) + log_choose(u - 1, jd - 1);
    auto f = [&](double x) {
        if (x <= 0) return users == j ? std::exp(log_c) : 0.0;
        if (x >= 1) return j == 1 ? std::exp(log_c) : 0.0;
        return std::exp(log_c + xlogy(u - jd, x) + xlogy(jd - 1, 1 - x));
    };
    // Beta(U - j + 1, j): mode and spread in x.
    const double mode = users > 1 ? (u - jd) / (u - 1) : 1.0;
    const double sd = std::sqrt((u - jd + 1) * jd / ((u + 1) * (u + 1) * (u + 2)));
    std::vector<double> cuts;
    for (double m : {-40.0, -20.0, -10.0, -5.0, -2.0, -1.0, 0.0, 1.0, 2.0, 5.0, 10.0, 20.0, 40.0})
        cuts.push_back(std::clamp(mode + m * sd, 0.0, 1.0));
    return integrate(f, 0.0, 1.0, opts, cuts);
}

// ---------------------------------------------------------------------------
// lambda_U(i)
// ---------------------------------------------------------------------------

enum class TieHandling {
    atomless,     // accounts with equal w count as attacked first (v_t(x) = x for x >= t)
    random_order  // accounts with equal w are attacked in uniformly random order
};

inline constexpr std::size_t kSumBlock = 4096;

/// lambda_U(i) = U sum_{j<=i} E_t[ t C(U-1, j-1) E[v_t]^{U-j} (1 - E[v_t])^{j-1} ]
/// with the expectation over t taken as the sample average.
///
/// The formula assumes a(t) has no atoms. TieHandling::random_order instead
/// averages each atom over a uniform tie-break position, which is exact for
/// the empirical distribution; with atomless data both modes agree.
inline MetricCurve lambda_curve(const WSample& sample, std::size_t users, std::size_t i_max,
                                TieHandling ties = TieHandling::atomless) {
    if (users < 1) throw domain_error("lambda curve needs U >= 1");
    if (i_max < 1 || i_max > users) throw domain_error("lambda curve needs 1 <= i_max <= U");
    const auto values = sample.values();
    const double n = static_cast<double>(values.size());
    const auto log_coef = log_kernel_coefficients(users, i_max);

    // Per-block partial sums in a fixed order, then pairwise across blocks.
    std::vector<std::vector<double>> block_sums(i_max);
    std::vector<double> current(i_max, 0.0);
    std::size_t in_block = 0;
    auto flush = [&] {
        for (std::size_t j = 0; j < i_max; ++j) block_sums[j].push_back(current[j]);
        std::fill(current.begin(), current.end(), 0.0);
        in_block = 0;
    };

    for (std::size_t s = 0; s < values.size();) {
        std::size_t e = s + 1;
        while (e < values.size() && values[e] == values[s]) ++e;
        const double t = values[s];
        const double mult = static_cast<double>(e - s);
        const double loss_above = sample.tail_loss(e) / n;  // strictly greater values
        const double loss_here = mult * (1 - std::min(t, 1.0)) / n;
        for (std::size_t j = 1; j <= i_max; ++j) {
            double kernel;
            if (ties == TieHandling::atomless || loss_here == 0) {
                kernel = beta_kernel(users, j, loss_above + loss_here, log_coef[j]);
            } else {
                kernel = kernel_mass(users, j, loss_above, loss_above + loss_here, log_coef[j]) / loss_here;
            }
            current[j - 1] += mult * t * kernel;
        }
        if (++in_block == kSumBlock) flush();
        s = e;
    }
    if (in_block > 0) flush();

    MetricCurve curve;
    curve.method = Method::quadrature;
    curve.meta.seed = sample.seed();
    curve.meta.trials = sample.size();
    double cumulative = 0.0;
    for (std::size_t j = 1; j <= i_max; ++j) {
        cumulative += pairwise_sum(block_sums[j - 1]) / n;
        curve.points.push_back({j, std::min(cumulative, static_cast<double>(users)), std::nullopt});
    }
    return curve;
}

// ---------------------------------------------------------------------------
// phi = inverse of t -> E[v_t], and the convolution / delta forms
// ---------------------------------------------------------------------------

struct PhiKnot {
    double x;  // E[v_t]
    double t;
};

/// Monotone piecewise-linear table of phi.
class PhiTable {
public:
    PhiTable() = default;
    PhiTable(std::vector<PhiKnot> knots, bool degenerate) : knots_(std::move(knots)), degenerate_(degenerate) {}

    std::span<const PhiKnot> knots() const noexcept { return knots_; }
    bool degenerate() const noexcept { return degenerate_; }
    double x_min() const { return knots_.front().x; }
    double x_max() const { return knots_.back().x; }

    /// phi(x); x outside the knot range is clamped and `clamped` set.
    double operator()(double x, bool* clamped = nullptr) const {
        if (x <= knots_.front().x || x >= knots_.back().x) {
            if (clamped && (x < knots_.front().x || x > knots_.back().x)) *clamped = true;
            return x <= knots_.front().x ? knots_.front().t : knots_.back().t;
        }
        auto hi = std::upper_bound(knots_.begin(), knots_.end(), x,
                                   [](double v, const PhiKnot& k) { return v < k.x; });
        auto lo = hi - 1;
        const double f = (x - lo->x) / (hi->x - lo->x);
        return lo->t + f * (hi->t - lo->t);
    }

private:
    std::vector<PhiKnot> knots_;
    bool degenerate_ = false;
};

/// Tabulates (E[v_t], t) with t running over the distinct sample values
/// (subsampled geometrically from the top when there are more than
/// grid_size of them), a knot at t = 1/k, and a closing knot (1, max w).
/// Equal x-values keep the smallest t.
inline PhiTable phi_table(const WSample& sample, std::size_t grid_size = 100'000) {
    if (grid_size < 2) throw domain_error("phi table needs grid_size >= 2");
    const auto values = sample.values();
    if (values.front() == values.back()) {
        return PhiTable({{1 - sample.shortfall(values.front()), values.front()}}, true);
    }
    std::vector<double> distinct;
    for (double v : values)
        if (distinct.empty() || v != distinct.back()) distinct.push_back(v);

    std::vector<double> grid;
    if (distinct.size() <= grid_size) {
        grid = distinct;
    } else {
        // Dense near the top, where large-U kernels concentrate.
        const double d = static_cast<double>(distinct.size());
        std::vector<std::size_t> picks;
        for (std::size_t g = 0; g < grid_size; ++g) {
            const double from_top = std::exp(std::log(d) * static_cast<double>(g) / static_cast<double>(grid_size - 1));
            picks.push_back(distinct.size() - std::min(distinct.size(), static_cast<std::size_t>(std::llround(from_top))));
        }
        std::sort(picks.begin(), picks.end());
        picks.erase(std::unique(picks.begin(), picks.end()), picks.end());
        for (auto p : picks) grid.push_back(distinct[p]);
    }

    std::vector<PhiKnot> knots;
    knots.push_back({1 - sample.shortfall(1.0 / static_cast<double>(sample.k())), 1.0 / static_cast<double>(sample.k())});
    for (double t : grid) {
        const double x = 1 - sample.shortfall(t);
        if (x > knots.back().x) knots.push_back({x, t});
    }
    if (knots.back().x < 1) knots.push_back({1.0, values.back()});
    return PhiTable(std::move(knots), false);
}

/// Delta-kernel estimate lambda_U(i) ~ sum_{j<=i} phi(x_j) / (1 - phi(x_j)),
/// x_j = (U - j) / (U - 1). Each U-scaled kernel has unit mass, so it
/// collapses to the value of phi/(1 - phi) at its mode.
inline MetricCurve lambda_delta_approx(const PhiTable& phi, std::size_t users, std::size_t i_max) {
    if (users < 2) throw domain_error("delta approximation needs U >= 2");
    if (i_max < 1 || i_max > users) throw domain_error("delta approximation needs 1 <= i_max <= U");
    if (phi.degenerate()) throw numerical_error("phi table is degenerate (all w equal); delta approximation undefined");
    const double u = static_cast<double>(users);
    MetricCurve curve;
    curve.method = Method::delta_approx;
    double cumulative = 0.0;
    std::size_t clamped_count = 0, capped = 0;
    for (std::size_t j = 1; j <= i_max; ++j) {
        const double x = (u - static_cast<double>(j)) / (u - 1);
        bool clamped = false;
        const double t = phi(x, &clamped);
        clamped_count += clamped;
        double term;
        if (t >= 1 - 1e-12) {
            term = u;
            ++capped;
        } else {
            term = std::min(u, t / (1 - t));
        }
        cumulative = std::min(u, cumulative + term);
        curve.points.push_back({j, cumulative, std::nullopt});
    }
    if (clamped_count) curve.flag(std::to_string(clamped_count) + " kernel peaks fell outside the phi table and were clamped");
    if (capped) curve.flag(std::to_string(capped) + " terms had phi >= 1 - 1e-12 and were capped at U");
    return curve;
}

/// lambda_U(i) = U sum_{j<=i} int phi(x)/(1 - phi(x)) C(U-1, j-1) x^{U-j} (1-x)^{j-1} dx
/// over the knots of `phi`: the kernel is integrated exactly on each knot
/// interval and phi/(1 - phi) by the trapezoid rule.
inline MetricCurve lambda_convolution(const PhiTable& phi, std::size_t users, std::size_t i_max) {
    if (users < 1) throw domain_error("convolution needs U >= 1");
    if (i_max < 1 || i_max > users) throw domain_error("convolution needs 1 <= i_max <= U");
    if (phi.degenerate()) throw numerical_error("phi table is degenerate (all w equal); convolution undefined");
    const double u = static_cast<double>(users);
    const auto log_coef = log_kernel_coefficients(users, i_max);
    const auto knots = phi.knots();
    auto odds = [&](double t) { return t >= 1 ? u : std::min(u, t / (1 - t)); };

    MetricCurve curve;
    curve.method = Method::quadrature;
    double cumulative = 0.0;
    for (std::size_t j = 1; j <= i_max; ++j) {
        std::vector<double> pieces;
        for (std::size_t s = 0; s + 1 < knots.size(); ++s) {
            const double mass = kernel_mass(users, j, 1 - knots[s + 1].x, 1 - knots[s].x, log_coef[j]);
            if (mass == 0) continue;
            pieces.push_back(mass * 0.5 * (odds(knots[s].t) + odds(knots[s + 1].t)));
        }
        cumulative = std::min(u, cumulative + pairwise_sum(pieces));
        curve.points.push_back({j, cumulative, std::nullopt});
    }
    return curve;
}

} // namespace honeymetric
