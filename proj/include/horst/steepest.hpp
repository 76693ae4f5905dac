#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "horst/core.hpp"

namespace horst {

enum class Normalization { gradient_scaled, unit_p_norm };

struct SteepestConfig {
    double p = 2.0;
    double q = 2.0;
    Normalization normalization = Normalization::unit_p_norm;

    static SteepestConfig from_p(double p, Normalization n = Normalization::unit_p_norm) {
        if (!(p >= 1.0)) throw argument_error("steepest: p must be >= 1");
        SteepestConfig c;
        c.p = p;
        c.normalization = n;
        if (std::isinf(p))
            c.q = 1.0;
        else if (p == 1.0)
            c.q = std::numeric_limits<double>::infinity();
        else
            c.q = p / (p - 1.0);
        return c;
    }
};

inline Vec sign_step(const Vec& theta, const Vec& g) {
    require_same_length(theta, g, "sign_step");
    Vec d(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) d[i] = sgn(g[i]);
    return d;
}

// Unit-L1-ball maximizer; ties go to the lowest index, zero gradient gives zero.
inline Vec coordinate_step(const Vec& theta, const Vec& g) {
    require_same_length(theta, g, "coordinate_step");
    Vec d(g.size(), 0.0);
    std::size_t best = 0;
    double best_abs = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        if (std::abs(g[i]) > best_abs) {
            best_abs = std::abs(g[i]);
            best = i;
        }
    if (best_abs > 0.0) d[best] = sgn(g[best]);
    return d;
}

inline Vec lp_step(const Vec& theta, const Vec& g, const SteepestConfig& cfg) {
    require_same_length(theta, g, "lp_step");
    if (!(cfg.p > 1.0) || std::isinf(cfg.p))
        throw argument_error("lp_step: p must lie in (1, inf); use sign_step or coordinate_step");
    const double q = cfg.q;
    // Work on g/||g||_inf so large or tiny gradients neither overflow nor underflow.
    double mx = norm_inf(g);
    Vec d(g.size(), 0.0);
    if (mx == 0.0) return d;
    double sq = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        double a = std::abs(g[i]) / mx;
        d[i] = sgn(g[i]) * std::pow(a, q - 1.0);
        sq += std::pow(a, q);
    }
    double nq = std::pow(sq, 1.0 / q); // ||g/mx||_q
    double denom;
    if (cfg.normalization == Normalization::unit_p_norm)
        denom = std::pow(nq, q - 1.0);
    else // sign(g)|g|^{q-1} / ||g||_q, restored to the unscaled gradient
        denom = nq * std::pow(mx, 2.0 - q);
    for (double& v : d) v /= denom;
    return d;
}

inline OperatorSpec sign_operator() { return {sign_step, "sign", std::nullopt}; }

inline OperatorSpec coordinate_operator() { return {coordinate_step, "coord", std::nullopt}; }

inline OperatorSpec lp_operator(const SteepestConfig& cfg) {
    return {[cfg](const Vec& t, const Vec& g) { return lp_step(t, g, cfg); },
            "lp" + fmt_num(cfg.p), std::nullopt};
}

} // namespace horst
