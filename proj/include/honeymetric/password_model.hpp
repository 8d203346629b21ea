#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "honeymetric/error.hpp"
#include "honeymetric/numeric.hpp"

namespace honeymetric {

/// Spaces up to this size store the pmf densely; larger ones keep only the
/// support as sorted (index, probability) pairs.
inline constexpr std::size_t kDenseSpaceLimit = 10'000'000;

inline constexpr double kPmfSumTolerance = 1e-9;

/// A discrete probability distribution over the password indices [0, n).
///
/// Immutable after construction. The constructors validate that every
/// probability is in [0, 1] and that the total is 1 within 1e-9.
class PasswordModel {
public:
    using Entry = std::pair<std::size_t, double>;

    /// Dense construction; switches to sparse storage above kDenseSpaceLimit.
    explicit PasswordModel(std::vector<double> pmf, std::string label = {})
        : size_(pmf.size()), label_(std::move(label)) {
        if (size_ == 0) throw structural_error("password space must be non-empty");
        for (std::size_t i = 0; i < size_; ++i) check_probability(i, pmf[i]);
        check_total(pairwise_sum(pmf));
        if (size_ <= kDenseSpaceLimit) {
            dense_ = std::move(pmf);
        } else {
            for (std::size_t i = 0; i < size_; ++i)
                if (pmf[i] > 0) sparse_.emplace_back(i, pmf[i]);
        }
    }

    /// Sparse construction from (index, probability) pairs over a space of size n.
    /// Repeated indices are rejected.
    PasswordModel(std::size_t n, std::vector<Entry> entries, std::string label = {})
        : size_(n), label_(std::move(label)) {
        if (size_ == 0) throw structural_error("password space must be non-empty");
        std::sort(entries.begin(), entries.end());
        std::vector<double> masses;
        masses.reserve(entries.size());
        for (std::size_t e = 0; e < entries.size(); ++e) {
            const auto [i, p] = entries[e];
            if (i >= n) throw structural_error("pmf index outside the password space");
            if (e > 0 && entries[e - 1].first == i)
                throw structural_error("duplicate pmf index " + std::to_string(i));
            check_probability(i, p);
            masses.push_back(p);
        }
        check_total(pairwise_sum(masses));
        if (n <= kDenseSpaceLimit) {
            dense_.assign(n, 0.0);
            for (auto [i, p] : entries) dense_[i] = p;
        } else {
            for (auto [i, p] : entries)
                if (p > 0) sparse_.emplace_back(i, p);
        }
    }

    std::size_t size() const noexcept { return size_; }
    const std::string& label() const noexcept { return label_; }
    bool is_dense() const noexcept { return !dense_.empty(); }

    double pmf(std::size_t i) const {
        if (is_dense()) return i < size_ ? dense_[i] : 0.0;
        auto it = std::lower_bound(sparse_.begin(), sparse_.end(), Entry{i, 0.0},
                                   [](const Entry& a, const Entry& b) { return a.first < b.first; });
        return (it != sparse_.end() && it->first == i) ? it->second : 0.0;
    }

    double operator()(std::size_t i) const { return pmf(i); }

    /// Calls fn(index, probability) for every index with positive probability,
    /// in increasing index order.
    template <class Fn>
    void for_each_support(Fn&& fn) const {
        if (is_dense()) {
            for (std::size_t i = 0; i < size_; ++i)
                if (dense_[i] > 0) fn(i, dense_[i]);
        } else {
            for (auto [i, p] : sparse_) fn(i, p);
        }
    }

    /// Support as sorted (index, probability) pairs.
    std::vector<Entry> support() const {
        std::vector<Entry> out;
        for_each_support([&](std::size_t i, double p) { out.emplace_back(i, p); });
        return out;
    }

private:
    static void check_probability(std::size_t i, double p) {
        if (!(p >= 0.0 && p <= 1.0)) {
            std::ostringstream os;
            os << "probability of password " << i << " is " << p << ", outside [0, 1]";
            throw structural_error(os.str());
        }
    }

    static void check_total(double total) {
        if (std::fabs(total - 1.0) > kPmfSumTolerance) {
            std::ostringstream os;
            os.precision(17);
            os << "probabilities sum to " << total << ", not 1";
            throw structural_error(os.str());
        }
    }

    std::size_t size_;
    std::string label_;
    std::vector<double> dense_;
    std::vector<Entry> sparse_;
};

} // namespace honeymetric
