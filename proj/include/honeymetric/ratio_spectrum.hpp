#pragma once

// Likelihood-ratio spectrum of a (P, Q) pair: the atoms of f and g grouped by
// the ratio P(pw)/Q(pw), plus M (largest finite ratio) and b (P-mass of
// passwords Q never produces).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "honeymetric/error.hpp"
#include "honeymetric/numeric.hpp"
#include "honeymetric/password_model.hpp"

namespace honeymetric {

inline constexpr int kRatioDigits = 12;

/// Grouping key of a sweetword with probabilities p under P and q under Q.
/// Q-zero passwords map to +inf.
inline double ratio_key(double p, double q) {
    if (q == 0) return p > 0 ? kInf : std::numeric_limits<double>::quiet_NaN();
    return round_significant(p / q, kRatioDigits);
}

struct RatioGroup {
    double ratio;  // +inf for the Q-zero group
    double p_mass;
    double q_mass;
};

class RatioSpectrum {
public:
    RatioSpectrum() = default;

    /// Takes groups sorted by strictly increasing ratio. Only the last one may be +inf.
    explicit RatioSpectrum(std::vector<RatioGroup> groups) : groups_(std::move(groups)) {
        for (std::size_t g = 0; g < groups_.size(); ++g) {
            if (g > 0 && !(groups_[g].ratio > groups_[g - 1].ratio))
                throw structural_error("ratio groups must be strictly increasing");
            if (std::isinf(groups_[g].ratio) && g + 1 != groups_.size())
                throw structural_error("only the last ratio group may be +inf");
        }
        finite_ = groups_.size();
        if (!groups_.empty() && std::isinf(groups_.back().ratio)) {
            --finite_;
            b_ = groups_.back().p_mass;
            if (groups_.back().q_mass != 0.0)
                throw structural_error("the +inf ratio group must carry zero Q-mass");
        }
        if (finite_ == 0) throw structural_error("Q must put mass on at least one finite ratio");
        M_ = groups_[finite_ - 1].ratio;

        // Strict-below prefix sums and strict-above suffix sums, accumulated
        // from the side where they are small for accuracy in the tails.
        q_below_.assign(finite_, 0.0);
        q_above_.assign(finite_, 0.0);
        p_below_.assign(finite_, 0.0);
        for (std::size_t g = 1; g < finite_; ++g) {
            q_below_[g] = q_below_[g - 1] + groups_[g - 1].q_mass;
            p_below_[g] = p_below_[g - 1] + groups_[g - 1].p_mass;
        }
        for (std::size_t g = finite_ - 1; g-- > 0;)
            q_above_[g] = q_above_[g + 1] + groups_[g + 1].q_mass;
    }

    std::span<const RatioGroup> groups() const noexcept { return groups_; }
    /// The finite-ratio groups only.
    std::span<const RatioGroup> finite_groups() const noexcept {
        return std::span<const RatioGroup>(groups_).first(finite_);
    }
    double M() const noexcept { return M_; }
    double b() const noexcept { return b_; }

    /// Q-mass strictly below / strictly above finite group g.
    double q_below(std::size_t g) const { return q_below_[g]; }
    double q_above(std::size_t g) const { return q_above_[g]; }

    /// G(x) = Pr_{pw<-Q}[ratio <= x], or ratio < x when strict.
    double cdf_G(double x, bool strict = false) const {
        const std::size_t g = count_groups(x, strict);
        if (g == 0) return 0.0;
        if (g >= finite_) return 1.0;
        return q_below_[g];
    }

    /// F(x) = Pr_{pw<-P}[ratio <= x] over finite ratios; +inf is never <= x.
    double cdf_F(double x, bool strict = false) const {
        const std::size_t g = count_groups(x, strict);
        if (g == 0) return 0.0;
        if (g >= finite_) return p_below_[finite_ - 1] + groups_[finite_ - 1].p_mass;
        return p_below_[g];
    }

    nlohmann::json to_json() const {
        nlohmann::json groups = nlohmann::json::array();
        for (const auto& grp : groups_) {
            nlohmann::json ratio = std::isinf(grp.ratio) ? nlohmann::json("inf") : nlohmann::json(grp.ratio);
            groups.push_back({ratio, grp.p_mass, grp.q_mass});
        }
        return {{"groups", groups}, {"M", M_}, {"b", b_}};
    }

    static RatioSpectrum from_json(const nlohmann::json& j) {
        std::vector<RatioGroup> groups;
        for (const auto& row : j.at("groups")) {
            const auto& r = row.at(0);
            double ratio = 0.0;
            if (r.is_string()) {
                if (r.get<std::string>() != "inf") throw structural_error("ratio must be a number or \"inf\"");
                ratio = kInf;
            } else {
                ratio = r.get<double>();
            }
            groups.push_back({ratio, row.at(1).get<double>(), row.at(2).get<double>()});
        }
        return RatioSpectrum(std::move(groups));
    }

private:
    // Number of finite groups with ratio <= x (or < x when strict).
    std::size_t count_groups(double x, bool strict) const {
        auto first = groups_.begin();
        auto last = groups_.begin() + static_cast<std::ptrdiff_t>(finite_);
        auto it = strict ? std::lower_bound(first, last, x, [](const RatioGroup& g, double v) { return g.ratio < v; })
                         : std::upper_bound(first, last, x, [](double v, const RatioGroup& g) { return v < g.ratio; });
        return static_cast<std::size_t>(it - first);
    }

    std::vector<RatioGroup> groups_;
    std::size_t finite_ = 0;
    double M_ = 0.0;
    double b_ = 0.0;
    std::vector<double> q_below_, q_above_, p_below_;
};

/// Group the passwords of a (P, Q) pair by their likelihood ratio.
///
/// Ratios are compared after rounding to 12 significant digits; each group
/// keeps the exact quotient of its lowest-index member as its ratio.
/// Passwords with P = Q = 0 are dropped.
inline RatioSpectrum build_ratio_spectrum(const PasswordModel& P, const PasswordModel& Q) {
    if (P.size() != Q.size())
        throw structural_error("P and Q must share a password space (sizes " + std::to_string(P.size()) +
                               " and " + std::to_string(Q.size()) + ")");

    struct Item {
        double key, ratio, p, q;
    };
    std::vector<Item> items;
    double b = 0.0;
    auto visit = [&](std::size_t i) {
        const double p = P.pmf(i), q = Q.pmf(i);
        if (q == 0) {
            b += p;
        } else {
            items.push_back({ratio_key(p, q), p / q, p, q});
        }
    };
    if (P.is_dense() && Q.is_dense()) {
        for (std::size_t i = 0; i < P.size(); ++i)
            if (P.pmf(i) > 0 || Q.pmf(i) > 0) visit(i);
    } else {
        auto ps = P.support();
        auto qs = Q.support();
        std::vector<std::size_t> idx;
        for (auto& e : ps) idx.push_back(e.first);
        for (auto& e : qs) idx.push_back(e.first);
        std::sort(idx.begin(), idx.end());
        idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
        for (auto i : idx) visit(i);
    }

    std::stable_sort(items.begin(), items.end(), [](const Item& a, const Item& c) { return a.key < c.key; });

    std::vector<RatioGroup> groups;
    for (std::size_t s = 0; s < items.size();) {
        std::size_t e = s;
        std::vector<double> ps, qs;
        while (e < items.size() && items[e].key == items[s].key) {
            ps.push_back(items[e].p);
            qs.push_back(items[e].q);
            ++e;
        }
        groups.push_back({items[s].ratio, pairwise_sum(ps), pairwise_sum(qs)});
        s = e;
    }
    if (b > 0) groups.push_back({kInf, b, 0.0});
    return RatioSpectrum(std::move(groups));
}

/// Largest relative deviation |p_mass - ratio * q_mass| / p_mass over the
/// finite groups (absolute deviation where p_mass is zero).
inline double verify_ratio_identity(const RatioSpectrum& spec) {
    double worst = 0.0;
    for (const auto& g : spec.finite_groups()) {
        const double dev = std::fabs(g.p_mass - g.ratio * g.q_mass);
        worst = std::max(worst, g.p_mass > 0 ? dev / g.p_mass : dev);
    }
    return worst;
}

} // namespace honeymetric
