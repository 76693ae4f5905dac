#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "horst/core.hpp"

namespace horst {

enum class MirrorKind { quadratic, hyperbolic_entropy, cosh_entropy, log_entropy };

inline const char* to_string(MirrorKind k) {
    switch (k) {
    case MirrorKind::quadratic: return "quadratic";
    case MirrorKind::hyperbolic_entropy: return "hyperbolic_entropy";
    case MirrorKind::cosh_entropy: return "cosh_entropy";
    case MirrorKind::log_entropy: return "log_entropy";
    }
    return "?";
}

// Separable potential R(theta) = sum_i r(theta_i).
class MirrorMap {
public:
    static constexpr double default_gamma = 1e-2;
    static constexpr double log_clamp = 1e-30;

    explicit MirrorMap(MirrorKind kind, double gamma = default_gamma) : kind_(kind), gamma_(gamma) {
        if (!(gamma > 0.0)) throw argument_error("MirrorMap: gamma must be positive");
    }
    static MirrorMap quadratic() { return MirrorMap(MirrorKind::quadratic); }
    static MirrorMap hyperbolic(double gamma = default_gamma) {
        return MirrorMap(MirrorKind::hyperbolic_entropy, gamma);
    }
    static MirrorMap cosh_entropy() { return MirrorMap(MirrorKind::cosh_entropy); }
    static MirrorMap log_entropy() { return MirrorMap(MirrorKind::log_entropy); }

    MirrorKind kind() const { return kind_; }
    double gamma() const { return gamma_; }
    std::string label() const { return to_string(kind_); }

    // Potential and gradient need theta > 0 for log_entropy.
    bool in_domain(double t) const {
        if (!std::isfinite(t)) return false;
        return kind_ != MirrorKind::log_entropy || t > 0.0;
    }

    double potential(double t) const {
        switch (kind_) {
        case MirrorKind::quadratic: return 0.5 * t * t;
        case MirrorKind::hyperbolic_entropy:
            return t * std::asinh(t / gamma_) - std::sqrt(t * t + gamma_ * gamma_);
        case MirrorKind::cosh_entropy: return std::cosh(t);
        case MirrorKind::log_entropy: return t * std::log(t) - t;
        }
        return 0.0;
    }

    double grad(double t) const {
        switch (kind_) {
        case MirrorKind::quadratic: return t;
        case MirrorKind::hyperbolic_entropy: return std::asinh(t / gamma_);
        case MirrorKind::cosh_entropy: return std::sinh(t);
        case MirrorKind::log_entropy: return std::log(t);
        }
        return 0.0;
    }

    double inv_hessian(double t) const {
        switch (kind_) {
        case MirrorKind::quadratic: return 1.0;
        case MirrorKind::hyperbolic_entropy: return std::hypot(t, gamma_);
        case MirrorKind::cosh_entropy: return 1.0 / std::cosh(t);
        case MirrorKind::log_entropy: return std::max(std::abs(t), log_clamp);
        }
        return 1.0;
    }

    bool coercive() const {
        return kind_ == MirrorKind::quadratic || kind_ == MirrorKind::hyperbolic_entropy;
    }

private:
    MirrorKind kind_;
    double gamma_;
};

namespace detail {
inline void check_domain(const MirrorMap& m, const Vec& theta, const char* where) {
    for (std::size_t i = 0; i < theta.size(); ++i)
        if (!m.in_domain(theta[i]))
            throw domain_error(std::string(where) + ": coordinate " + std::to_string(i) + " (" +
                               std::to_string(theta[i]) + ") outside the domain of " + m.label());
}
} // namespace detail

// M_R(theta, g) = (d^2 R)^{-1}(theta) g. log_entropy uses the clamped |theta| diagnostic form.
inline Vec mirror_step(const MirrorMap& m, const Vec& theta, const Vec& g) {
    require_same_length(theta, g, "mirror_step");
    for (std::size_t i = 0; i < theta.size(); ++i)
        if (!std::isfinite(theta[i]))
            throw domain_error("mirror_step: coordinate " + std::to_string(i) + " is not finite");
    Vec d(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) d[i] = m.inv_hessian(theta[i]) * g[i];
    return d;
}

inline OperatorSpec mirror_operator(const MirrorMap& m) {
    return {[m](const Vec& t, const Vec& g) { return mirror_step(m, t, g); }, m.label(),
            std::nullopt};
}

inline double bregman_divergence(const MirrorMap& m, const Vec& theta, const Vec& xi) {
    require_same_length(theta, xi, "bregman_divergence");
    detail::check_domain(m, theta, "bregman_divergence");
    detail::check_domain(m, xi, "bregman_divergence");
    double s = 0.0;
    for (std::size_t i = 0; i < theta.size(); ++i)
        s += m.potential(theta[i]) - m.potential(xi[i]) - m.grad(xi[i]) * (theta[i] - xi[i]);
    return std::max(s, 0.0);
}

// Smallest xi' H^{-1}(theta) xi / ||xi||^2 over all (theta, xi) pairs.
inline double coercivity_probe(const MirrorMap& m, const std::vector<Vec>& samples,
                               const std::vector<Vec>& directions) {
    if (samples.empty() || directions.empty())
        throw argument_error("coercivity_probe: empty samples or directions");
    double best = std::numeric_limits<double>::infinity();
    for (const auto& theta : samples) {
        detail::check_domain(m, theta, "coercivity_probe");
        for (const auto& xi : directions) {
            require_same_length(theta, xi, "coercivity_probe");
            double num = 0.0, den = 0.0;
            for (std::size_t i = 0; i < xi.size(); ++i) {
                num += xi[i] * m.inv_hessian(theta[i]) * xi[i];
                den += xi[i] * xi[i];
            }
            if (den > 0.0) best = std::min(best, num / den);
        }
    }
    return best;
}

} // namespace horst
