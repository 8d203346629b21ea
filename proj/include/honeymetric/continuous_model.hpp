#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>

#include "honeymetric/error.hpp"
#include "honeymetric/quadrature.hpp"

namespace honeymetric {

/// Continuous ratio model: the CDF G of the ratio under Q on [0, M], the
/// Q-zero mass b, and optionally the quantile function G^{-1} on [0, 1].
struct ContinuousRatioModel {
    double M = 1.0;
    double b = 0.0;
    std::function<double(double)> G;
    std::optional<std::function<double(double)>> G_inverse;
    std::string label;

    void validate() const {
        if (!(M > 0)) throw domain_error("continuous model needs M > 0");
        if (!(b >= 0 && b < 1)) throw domain_error("continuous model needs b in [0, 1)");
        if (!G) throw structural_error("continuous model has no CDF");
        if (std::fabs(G(M) - 1.0) > 1e-12) throw structural_error("continuous model needs G(M) = 1");
        if (G(0) < 0) throw structural_error("continuous model needs G(0) >= 0");
    }
};

/// Integral of G over [0, M]; equals M - 1 + b for a consistent model.
inline QuadratureResult integrate_cdf(const ContinuousRatioModel& model, const QuadratureOptions& opts = {}) {
    return integrate([&](double x) { return model.G(x); }, 0.0, model.M, opts);
}

} // namespace honeymetric
