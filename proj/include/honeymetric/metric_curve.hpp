#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "honeymetric/error.hpp"

namespace honeymetric {

enum class Method { discrete_exact, quadrature, closed_form, monte_carlo, brute_force, delta_approx };

inline std::string_view to_string(Method m) {
    switch (m) {
        case Method::discrete_exact: return "discrete-exact";
        case Method::quadrature: return "quadrature";
        case Method::closed_form: return "closed-form";
        case Method::monte_carlo: return "monte-carlo";
        case Method::brute_force: return "brute-force";
        case Method::delta_approx: return "delta-approx";
    }
    return "unknown";
}

struct CurvePoint {
    std::size_t i;
    double value;
    std::optional<double> stderr_;  // Monte Carlo standard error
};

struct CurveMeta {
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> trials;
    std::optional<double> tolerance;
    std::vector<std::string> flags;  // warnings attached by the producing routine
};

/// Sequence of (i, value) for eps(i) or lambda_U(i), with provenance.
struct MetricCurve {
    std::vector<CurvePoint> points;
    Method method = Method::discrete_exact;
    CurveMeta meta;

    double at(std::size_t i) const {
        for (const auto& p : points)
            if (p.i == i) return p.value;
        throw structural_error("curve has no point at i = " + std::to_string(i));
    }

    std::size_t size() const noexcept { return points.size(); }

    void flag(std::string message) { meta.flags.push_back(std::move(message)); }
};

/// Locale-independent shortest-ish formatting with 12 significant digits.
inline std::string format_number(double x, int digits = 12) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, digits);
    return std::string(buf, res.ptr);
}

inline nlohmann::json to_json(const MetricCurve& c) {
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& p : c.points) {
        nlohmann::json row = {{"i", p.i}, {"value", p.value}};
        if (p.stderr_) row["stderr"] = *p.stderr_;
        pts.push_back(row);
    }
    nlohmann::json meta = nlohmann::json::object();
    if (c.meta.seed) meta["seed"] = *c.meta.seed;
    if (c.meta.trials) meta["trials"] = *c.meta.trials;
    if (c.meta.tolerance) meta["tolerance"] = *c.meta.tolerance;
    if (!c.meta.flags.empty()) meta["flags"] = c.meta.flags;
    return {{"method", std::string(to_string(c.method))}, {"points", pts}, {"meta", meta}};
}

} // namespace honeymetric
