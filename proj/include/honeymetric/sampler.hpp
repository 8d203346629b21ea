#pragma once

// O(1) sampling from a PasswordModel with Vose's alias method.

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "honeymetric/password_model.hpp"

namespace honeymetric {

using Rng = std::mt19937_64;

class AliasSampler {
public:
    explicit AliasSampler(const PasswordModel& model) {
        model.for_each_support([&](std::size_t i, double p) {
            index_.push_back(i);
            prob_.push_back(p);
        });
        const std::size_t m = index_.size();
        alias_.assign(m, 0);
        double total = 0.0;
        for (double p : prob_) total += p;

        std::vector<double> scaled(m);
        std::vector<std::uint32_t> small, large;
        for (std::size_t s = 0; s < m; ++s) {
            scaled[s] = prob_[s] * static_cast<double>(m) / total;
            (scaled[s] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(s));
        }
        while (!small.empty() && !large.empty()) {
            const auto lo = small.back();
            small.pop_back();
            const auto hi = large.back();
            prob_[lo] = scaled[lo];
            alias_[lo] = hi;
            scaled[hi] = (scaled[hi] + scaled[lo]) - 1.0;
            if (scaled[hi] < 1.0) {
                large.pop_back();
                small.push_back(hi);
            }
        }
        for (auto s : large) prob_[s] = 1.0;
        for (auto s : small) prob_[s] = 1.0;  // round-off leftovers
    }

    std::size_t operator()(Rng& rng) const {
        std::uniform_int_distribution<std::size_t> column(0, index_.size() - 1);
        std::uniform_real_distribution<double> coin(0.0, 1.0);
        const std::size_t s = column(rng);
        return coin(rng) < prob_[s] ? index_[s] : index_[alias_[s]];
    }

    std::size_t support_size() const noexcept { return index_.size(); }

private:
    std::vector<std::size_t> index_;
    std::vector<double> prob_;
    std::vector<std::uint32_t> alias_;
};

/// One draw from `model`; builds a sampler each call, so prefer AliasSampler in loops.
inline std::size_t sample(const PasswordModel& model, Rng& rng) { return AliasSampler(model)(rng); }

} // namespace honeymetric
