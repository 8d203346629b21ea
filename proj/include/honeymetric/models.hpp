#pragma once

// Concrete distributions: uniform, Zipf, the corpus-trained List model, and
// the analytic continuous examples.
//
// Zipf ranks are 1-based in formulas and 0-based in storage: pmf(i) is the
// probability of the (i+1)-th most likely password.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "honeymetric/continuous_model.hpp"
#include "honeymetric/error.hpp"
#include "honeymetric/numeric.hpp"
#include "honeymetric/password_model.hpp"

namespace honeymetric {

inline PasswordModel uniform_model(std::size_t n) {
    if (n == 0) throw domain_error("uniform model needs n >= 1");
    return PasswordModel(std::vector<double>(n, 1.0 / static_cast<double>(n)), "uniform:" + std::to_string(n));
}

struct ZipfParams {
    double alpha;
    std::size_t n;
    double S_norm;  // sum_{j=1..n} j^-alpha by direct summation

    ZipfParams(double alpha_, std::size_t n_) : alpha(alpha_), n(n_) {
        if (!(alpha > 0 && alpha < 1)) throw domain_error("Zipf exponent must lie in (0, 1)");
        if (n == 0) throw domain_error("Zipf model needs n >= 1");
        std::vector<double> terms(n);
        for (std::size_t j = 0; j < n; ++j) terms[j] = std::pow(static_cast<double>(j + 1), -alpha);
        S_norm = pairwise_sum(terms);
    }

    /// The large-n approximation n^{1-alpha} / (1 - alpha) of S_norm.
    double asymptotic_norm() const { return std::pow(static_cast<double>(n), 1 - alpha) / (1 - alpha); }
};

inline PasswordModel zipf_model(double alpha, std::size_t n) {
    const ZipfParams params(alpha, n);
    std::vector<double> pmf(n);
    for (std::size_t i = 0; i < n; ++i) pmf[i] = std::pow(static_cast<double>(i + 1), -alpha) / params.S_norm;
    return PasswordModel(std::move(pmf), "zipf:" + std::to_string(alpha) + ":" + std::to_string(n));
}

/// Multiset of training passwords, kept in first-seen order.
struct Corpus {
    std::vector<std::string> entries;

    std::size_t size() const noexcept { return entries.size(); }
};

/// One password per line; LF or CRLF; final newline optional. Lines are
/// otherwise verbatim (no trimming, no case folding). Empty lines are
/// passwords too, except for the phantom line after a final newline.
inline Corpus read_corpus(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open corpus", path);
    Corpus corpus;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        corpus.entries.push_back(line);
    }
    if (in.bad()) throw io_error("error while reading corpus", path);
    return corpus;
}

/// A List model together with the strings naming its password indices.
struct ListModel {
    PasswordModel model;
    std::vector<std::string> vocabulary;
};

/// Empirical distribution count/|S| of a corpus. The password space is the
/// corpus vocabulary followed by any reference words not already in it
/// (those get probability 0).
inline ListModel train_list_model(const Corpus& corpus, std::span<const std::string> reference = {}) {
    if (corpus.size() == 0) throw domain_error("cannot train a List model on an empty corpus");
    std::unordered_map<std::string, std::size_t> index;
    std::vector<std::string> vocab;
    std::vector<std::size_t> counts;
    for (const auto& w : corpus.entries) {
        auto [it, fresh] = index.try_emplace(w, vocab.size());
        if (fresh) {
            vocab.push_back(w);
            counts.push_back(0);
        }
        ++counts[it->second];
    }
    for (const auto& w : reference) {
        if (index.try_emplace(w, vocab.size()).second) {
            vocab.push_back(w);
            counts.push_back(0);
        }
    }
    const double total = static_cast<double>(corpus.size());
    std::vector<double> pmf(vocab.size());
    for (std::size_t i = 0; i < pmf.size(); ++i) pmf[i] = static_cast<double>(counts[i]) / total;
    return {PasswordModel(std::move(pmf), "list"), std::move(vocab)};
}

/// List model over an existing index space [0, n): the empirical
/// distribution of `draws`. Used when a ground-truth P fixes the space.
inline PasswordModel empirical_model(std::span<const std::size_t> draws, std::size_t n) {
    if (draws.empty()) throw domain_error("cannot train a List model on an empty sample");
    std::map<std::size_t, std::size_t> counts;
    for (auto d : draws) {
        if (d >= n) throw structural_error("sample index outside the password space");
        ++counts[d];
    }
    const double total = static_cast<double>(draws.size());
    std::vector<PasswordModel::Entry> entries;
    entries.reserve(counts.size());
    for (auto [i, c] : counts) entries.emplace_back(i, static_cast<double>(c) / total);
    return PasswordModel(n, std::move(entries), "list");
}

/// Densities P(x) = x + 0.5 and Q(x) = 1 on [0, 1]: the ratio under Q is
/// uniform on [0.5, 1.5].
inline ContinuousRatioModel linear_example() {
    ContinuousRatioModel m;
    m.M = 1.5;
    m.b = 0.0;
    m.G = [](double x) { return std::clamp(x - 0.5, 0.0, 1.0); };
    m.G_inverse = [](double u) { return u + 0.5; };
    m.label = "linear";
    return m;
}

/// Ratio uniform on [0, 1] under Q (G is the identity); M = 1.
///
/// This is not the ratio law of a normalised (P, Q) pair with b = 0 (it has
/// E_Q[ratio] = 1/2), so only the flatness formulas are meaningful here.
inline ContinuousRatioModel identity_example() {
    ContinuousRatioModel m;
    m.M = 1.0;
    m.b = 0.0;
    m.G = [](double x) { return std::clamp(x, 0.0, 1.0); };
    m.G_inverse = [](double u) { return u; };
    m.label = "identity";
    return m;
}

} // namespace honeymetric
