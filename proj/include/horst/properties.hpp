#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "horst/core.hpp"
#include "horst/mirror.hpp"
#include "horst/rng.hpp"
#include "horst/steepest.hpp"

namespace horst {

struct PropertyRow {
    std::string name;
    bool pass = false;
    double value = 0.0;     // worst observed quantity
    double threshold = 0.0; // pass when value <= threshold, unless stated otherwise in `name`
    std::string detail;
};

namespace detail {
inline Vec normal_vec(Rng& r, std::size_t n, double s = 1.0) {
    Vec v(n);
    for (double& x : v) x = s * r.normal();
    return v;
}

inline std::vector<std::pair<std::string, MirrorMap>> property_maps() {
    return {{"quadratic", MirrorMap::quadratic()},
            {"hyperbolic_entropy(0.01)", MirrorMap::hyperbolic(1e-2)},
            {"hyperbolic_entropy(0.5)", MirrorMap::hyperbolic(0.5)},
            {"cosh_entropy", MirrorMap::cosh_entropy()},
            {"log_entropy", MirrorMap::log_entropy()}};
}

inline Vec sample_theta(Rng& r, const MirrorMap& m, std::size_t n) {
    Vec t = normal_vec(r, n, 2.0);
    if (m.kind() == MirrorKind::log_entropy)
        for (double& x : t) x = std::abs(x) + 1e-3;
    return t;
}
} // namespace detail

// Invariants of the steepest and mirror operators on random (theta, g) pairs.
inline std::vector<PropertyRow> operator_algebra_properties(std::uint64_t seed, std::size_t samples = 1000,
                                                            std::size_t n = 8) {
    std::vector<PropertyRow> rows;
    Rng rng(derive_seed(seed, 11));
    const auto maps = detail::property_maps();

    // Mirror operators are linear in g.
    for (const auto& [name, m] : maps) {
        double worst = 0.0;
        for (std::size_t s = 0; s < samples; ++s) {
            Vec th = detail::sample_theta(rng, m, n);
            Vec g = detail::normal_vec(rng, n), h = detail::normal_vec(rng, n);
            double a = rng.normal(), b = rng.normal();
            Vec lhs = mirror_step(m, th, add(scale(g, a), scale(h, b)));
            Vec rhs = add(scale(mirror_step(m, th, g), a), scale(mirror_step(m, th, h), b));
            worst = std::max(worst, norm_inf(sub(lhs, rhs)) / std::max(1.0, norm_inf(rhs)));
        }
        rows.push_back({"mirror linearity: " + name, worst <= 1e-12, worst, 1e-12, "relative Linf error"});
    }

    // Steepest operators ignore positive rescaling of g.
    std::vector<OperatorSpec> steep{sign_operator(), coordinate_operator(), lp_operator(SteepestConfig::from_p(2.0)),
                                    lp_operator(SteepestConfig::from_p(3.0)), lp_operator(SteepestConfig::from_p(4.0)),
                                    lp_operator(SteepestConfig::from_p(1.5))};
    for (const auto& op : steep) {
        double worst = 0.0;
        for (std::size_t s = 0; s < samples; ++s) {
            Vec th = detail::normal_vec(rng, n);
            Vec g = detail::normal_vec(rng, n);
            double c = std::exp(6.0 * (rng.uniform() - 0.5) * std::log(10.0)); // 1e-3 .. 1e3
            worst = std::max(worst, norm_inf(sub(op(th, scale(g, c)), op(th, g))));
        }
        rows.push_back({"steepest scale invariance: " + op.label, worst <= 1e-12, worst, 1e-12, "Linf"});
    }

    // sign after a mirror operator is sign: the inverse Hessian is positive.
    for (const auto& [name, m] : maps) {
        std::size_t bad = 0;
        OperatorSpec sm = compose(sign_operator(), mirror_operator(m));
        for (std::size_t s = 0; s < samples; ++s) {
            Vec th = detail::sample_theta(rng, m, n);
            Vec g = detail::normal_vec(rng, n);
            if (s % 10 == 0) g[s % n] = 0.0;
            if (sm(th, g) != sign_step(th, g)) ++bad;
        }
        rows.push_back({"sign absorbs mirror: " + name, bad == 0, static_cast<double>(bad), 0.0,
                        "mismatching samples out of " + std::to_string(samples)});
    }

    // Non-commutation witness: mirror then sign vs sign then mirror.
    {
        MirrorMap hyp = MirrorMap::hyperbolic(1e-2);
        Vec th{3.0, -0.5, 0.2};
        Vec g{1.0, -2.0, 0.5};
        double r = commutator_residual(mirror_operator(hyp), sign_operator(), th, g);
        rows.push_back({"non-commutation witness (residual >= 0.1)", r >= 0.1, r, 0.1,
                        "hyperbolic_entropy(0.01) vs sign at theta=(3,-0.5,0.2), g=(1,-2,0.5)"});
    }

    // Mirror after sign is bounded by sqrt(n) * sqrt(||theta||_inf^2 + gamma^2).
    for (double gamma : {1e-2, 0.5}) {
        MirrorMap hyp = MirrorMap::hyperbolic(gamma);
        OperatorSpec ms = compose(mirror_operator(hyp), sign_operator());
        std::vector<std::pair<Vec, Vec>> pairs;
        double worst = 0.0;
        for (std::size_t s = 0; s < samples; ++s) {
            Vec th(n);
            for (double& x : th) x = rng.uniform(-10.0, 10.0);
            Vec g = detail::normal_vec(rng, n);
            double bound = std::sqrt(static_cast<double>(n)) * std::hypot(norm_inf(th), gamma);
            worst = std::max(worst, norm2(ms(th, g)) / bound);
            pairs.emplace_back(std::move(th), std::move(g));
        }
        auto rep = boundedness_ratio(ms, pairs);
        rows.push_back({"mirror*sign bounded, hyperbolic gamma=" + fmt_num(gamma) + " (norm / bound <= 1)",
                        worst <= 1.0 + 1e-12, worst, 1.0,
                        "max ||A|| / (1 + ||theta||) = " + fmt_num(rep.max_ratio)});
    }

    // lp_step is the unit-Lp-ball maximizer: <g, d> = ||g||_q with ||d||_p = 1.
    for (double p : {1.5, 2.0, 3.0, 4.0}) {
        auto cfg = SteepestConfig::from_p(p);
        double worst = 0.0;
        for (std::size_t s = 0; s < samples; ++s) {
            Vec g = detail::normal_vec(rng, n);
            Vec d = lp_step(g, g, cfg);
            worst = std::max({worst, std::abs(norm_p(d, p) - 1.0), std::abs(dot(g, d) - norm_p(g, cfg.q)) / norm_p(g, cfg.q)});
        }
        rows.push_back({"lp_step attains the dual norm, p=" + fmt_num(p), worst <= 1e-12, worst, 1e-12, ""});
    }

    // Composition is associative.
    {
        OperatorSpec a = mirror_operator(MirrorMap::hyperbolic(0.5)), b = lp_operator(SteepestConfig::from_p(3.0)),
                     c = mirror_operator(MirrorMap::cosh_entropy());
        double worst = 0.0;
        for (std::size_t s = 0; s < samples; ++s) {
            Vec th = detail::normal_vec(rng, n), g = detail::normal_vec(rng, n);
            worst = std::max(worst, norm_inf(sub(compose(compose(a, b), c)(th, g), compose(a, compose(b, c))(th, g))));
        }
        rows.push_back({"composition associativity", worst <= 1e-12, worst, 1e-12, ""});
    }

    // Bregman divergence: zero on the diagonal, nonnegative elsewhere.
    for (const auto& [name, m] : maps) {
        double diag = 0.0, neg = 0.0;
        for (std::size_t s = 0; s < samples; ++s) {
            Vec a = detail::sample_theta(rng, m, n), b = detail::sample_theta(rng, m, n);
            if (m.kind() == MirrorKind::cosh_entropy) {
                a = scale(a, 0.25);
                b = scale(b, 0.25);
            }
            diag = std::max(diag, bregman_divergence(m, a, a));
            neg = std::max(neg, -bregman_divergence(m, a, b));
        }
        double v = std::max(diag, neg);
        rows.push_back({"bregman nonnegative, zero on diagonal: " + name, v <= 1e-12, v, 1e-12, ""});
    }

    // Tie and zero conventions.
    {
        Vec z(n, 0.0);
        Vec t{0.0, -2.0, 2.0, 1.0};
        bool ok = norm_inf(sign_step(z, z)) == 0.0 && norm_inf(coordinate_step(z, z)) == 0.0 &&
                  coordinate_step(t, t) == Vec{0.0, -1.0, 0.0, 0.0};
        rows.push_back({"sign(0) = 0 and coordinate ties go to the lowest index", ok, ok ? 0.0 : 1.0, 0.0, ""});
    }
    return rows;
}

} // namespace horst
