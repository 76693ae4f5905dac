#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "horst/core.hpp"
#include "horst/mirror.hpp"

namespace horst {

struct AdamState {
    Vec m;
    Vec v;
    std::size_t step_count = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;

    AdamState() = default;
    explicit AdamState(std::size_t n, double b1 = 0.9, double b2 = 0.999, double eps = 1e-8)
        : m(n, 0.0), v(n, 0.0), beta1(b1), beta2(b2), epsilon(eps) {}

    // Zero both moments where flags[i] != 0.
    void reset(const std::vector<std::uint8_t>& flags) {
        for (std::size_t i = 0; i < flags.size() && i < m.size(); ++i)
            if (flags[i]) m[i] = v[i] = 0.0;
    }
};

// Advances the moments once and returns the displacement eta * mhat / (sqrt(vhat) + eps).
inline Vec adam_step(AdamState& s, const Vec& g, double eta) {
    if (s.m.size() != g.size() || s.v.size() != g.size())
        throw dimension_error("adam_step: state length " + std::to_string(s.m.size()) +
                              " vs gradient length " + std::to_string(g.size()));
    ++s.step_count;
    const double t = static_cast<double>(s.step_count);
    const double bc1 = 1.0 - std::pow(s.beta1, t);
    const double bc2 = 1.0 - std::pow(s.beta2, t);
    Vec u(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        s.m[i] = s.beta1 * s.m[i] + (1.0 - s.beta1) * g[i];
        s.v[i] = s.beta2 * s.v[i] + (1.0 - s.beta2) * g[i] * g[i];
        u[i] = eta * (s.m[i] / bc1) / (std::sqrt(s.v[i] / bc2) + s.epsilon);
    }
    return u;
}

inline Vec sgd_step(const Vec& g, double eta) { return scale(g, eta); }

inline Vec signsgd_step(const Vec& g, double eta) {
    Vec d(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) d[i] = eta * sgn(g[i]);
    return d;
}

struct ExpGuard {
    static constexpr double limit = 50.0;
    std::size_t clamped = 0;

    double clamp(double e) {
        if (e > limit || e < -limit) {
            ++clamped;
            return e > 0 ? limit : -limit;
        }
        return e;
    }
};

// theta * exp(-alpha * sign(theta) * base_step - eta * beta), exponent clamped to +-50.
inline Vec exp_update(const Vec& theta, const Vec& base_step, double alpha, double beta, double eta,
                      ExpGuard* guard = nullptr) {
    require_same_length(theta, base_step, "exp_update");
    ExpGuard local;
    ExpGuard& gd = guard ? *guard : local;
    Vec out(theta.size());
    for (std::size_t i = 0; i < theta.size(); ++i) {
        double e = -alpha * sgn(theta[i]) * base_step[i] - eta * beta;
        out[i] = theta[i] * std::exp(gd.clamp(e));
    }
    return out;
}

enum class ScheduleKind { constant, cosine, triangular };

inline const char* to_string(ScheduleKind k) {
    switch (k) {
    case ScheduleKind::constant: return "constant";
    case ScheduleKind::cosine: return "cosine";
    case ScheduleKind::triangular: return "triangular";
    }
    return "?";
}

struct OptimizerConfig {
    double eta = 1e-2;
    double lambda = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
    ScheduleKind schedule = ScheduleKind::constant;
    std::size_t warmup = 0;
    std::size_t total_steps = 0; // needed by cosine / triangular
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;

    void validate() const {
        if (!(eta > 0.0)) throw config_error("optimizer.eta must be positive");
        if (lambda < 0.0) throw config_error("optimizer.lambda must be nonnegative");
        if (alpha < 0.0) throw config_error("optimizer.alpha must be nonnegative");
        if (beta < 0.0) throw config_error("optimizer.beta must be nonnegative");
        if (schedule != ScheduleKind::constant && total_steps == 0)
            throw config_error("optimizer.total_steps required for non-constant schedules");
        if (total_steps && warmup > total_steps)
            throw config_error("optimizer.warmup exceeds total_steps");
    }
};

// Learning rate for zero-based iteration k. Warmup ramps linearly to eta; cosine
// then anneals to 0, triangular decays linearly to 0.
inline double lr_at(const OptimizerConfig& c, std::size_t k) {
    if (k < c.warmup) return c.eta * static_cast<double>(k + 1) / static_cast<double>(c.warmup);
    if (c.schedule == ScheduleKind::constant) return c.eta;
    std::size_t span = c.total_steps > c.warmup ? c.total_steps - c.warmup : 1;
    double x = std::min(1.0, static_cast<double>(k - c.warmup) / static_cast<double>(span));
    if (c.schedule == ScheduleKind::cosine) return c.eta * 0.5 * (1.0 + std::cos(std::numbers::pi * x));
    return c.eta * (1.0 - x);
}

namespace detail {
// theta - u - lambda * eta * theta, counting coordinates whose sign flips.
inline Vec adamw_half(const Vec& theta, const Vec& u, double lambda, double eta,
                      std::size_t* flips) {
    Vec h(theta.size());
    for (std::size_t i = 0; i < theta.size(); ++i) {
        h[i] = theta[i] - u[i] - lambda * eta * theta[i];
        if (flips && theta[i] != 0.0 && sgn(h[i]) != sgn(theta[i])) ++*flips;
    }
    return h;
}
} // namespace detail

inline Vec adamw_update(const Vec& theta, const Vec& g, AdamState& s, const OptimizerConfig& c,
                        double eta) {
    Vec u = adam_step(s, g, eta);
    return detail::adamw_half(theta, u, c.lambda, eta, nullptr);
}

// One HORST iteration given g(theta_k); the exponential reuses the Adam step u.
inline Vec horst_update(const Vec& theta, const Vec& g, AdamState& s, const OptimizerConfig& c,
                        double eta, ExpGuard* guard = nullptr, std::size_t* flips = nullptr) {
    Vec u = adam_step(s, g, eta);
    Vec half = detail::adamw_half(theta, u, c.lambda, eta, flips);
    return exp_update(half, u, c.alpha, c.beta, eta, guard);
}

// One HAM iteration: the exponent uses the raw gradient scaled by eta.
inline Vec ham_update(const Vec& theta, const Vec& g, AdamState& s, const OptimizerConfig& c,
                      double eta, ExpGuard* guard = nullptr, std::size_t* flips = nullptr) {
    Vec u = adam_step(s, g, eta);
    Vec half = detail::adamw_half(theta, u, c.lambda, eta, flips);
    ExpGuard local;
    ExpGuard& gd = guard ? *guard : local;
    Vec out(half.size());
    for (std::size_t i = 0; i < half.size(); ++i) {
        double e = -eta * (c.alpha * sgn(half[i]) * g[i] + c.beta);
        out[i] = half[i] * std::exp(gd.clamp(e));
    }
    return out;
}

inline Vec adamw_step(const Vec& theta, const GradOracle& oracle, AdamState& s,
                      const OptimizerConfig& c) {
    double eta = lr_at(c, s.step_count);
    return adamw_update(theta, oracle(theta), s, c, eta);
}

inline Vec horst_step(const Vec& theta, const GradOracle& oracle, AdamState& s,
                      const OptimizerConfig& c, ExpGuard* guard = nullptr) {
    double eta = lr_at(c, s.step_count);
    return horst_update(theta, oracle(theta), s, c, eta, guard);
}

inline Vec ham_step(const Vec& theta, const GradOracle& oracle, AdamState& s,
                    const OptimizerConfig& c, ExpGuard* guard = nullptr) {
    double eta = lr_at(c, s.step_count);
    return ham_update(theta, oracle(theta), s, c, eta, guard);
}

enum class OptimizerKind {
    sgd,
    signsgd,
    adam,
    adamw,
    horst,
    ham,
    exp_sgd,   // exp_after_base, base sgd
    exp_adam,  // exp_after_base, base adam
    sgd_exp,   // base_after_exp, base sgd
    adam_exp,  // base_after_exp, base adam
    signsgd_exp,
    mirror_descent
};

inline const char* to_string(OptimizerKind k) {
    switch (k) {
    case OptimizerKind::sgd: return "sgd";
    case OptimizerKind::signsgd: return "signsgd";
    case OptimizerKind::adam: return "adam";
    case OptimizerKind::adamw: return "adamw";
    case OptimizerKind::horst: return "horst";
    case OptimizerKind::ham: return "ham";
    case OptimizerKind::exp_sgd: return "exp_sgd";
    case OptimizerKind::exp_adam: return "exp_adam";
    case OptimizerKind::sgd_exp: return "sgd_exp";
    case OptimizerKind::adam_exp: return "adam_exp";
    case OptimizerKind::signsgd_exp: return "signsgd_exp";
    case OptimizerKind::mirror_descent: return "mirror_descent";
    }
    return "?";
}

inline std::optional<OptimizerKind> parse_optimizer_kind(const std::string& s) {
    for (int i = 0; i <= static_cast<int>(OptimizerKind::mirror_descent); ++i) {
        auto k = static_cast<OptimizerKind>(i);
        if (s == to_string(k)) return k;
    }
    return std::nullopt;
}

enum class ComposeOrder { exp_after_base, base_after_exp };
enum class BaseKind { sgd, signsgd, adam };

// Stateful optimizer driver over any of the update rules above.
class Optimizer {
public:
    Optimizer(OptimizerKind kind, OptimizerConfig cfg, std::size_t n,
              MirrorMap mirror = MirrorMap::quadratic())
        : kind_(kind), cfg_(cfg), state_(n, cfg.beta1, cfg.beta2, cfg.epsilon),
          mirror_(mirror) {
        cfg_.validate();
    }

    OptimizerKind kind() const { return kind_; }
    const OptimizerConfig& config() const { return cfg_; }
    AdamState& state() { return state_; }
    const AdamState& state() const { return state_; }
    std::size_t iteration() const { return iter_; }
    const ExpGuard& guard() const { return guard_; }
    std::size_t sign_flips() const { return flips_; }
    double current_lr() const { return lr_at(cfg_, iter_); }

    Vec step(const Vec& theta, const Vec& g) {
        require_same_length(theta, g, "Optimizer::step");
        const double eta = lr_at(cfg_, iter_);
        ++iter_;
        switch (kind_) {
        case OptimizerKind::sgd: return sub(theta, sgd_step(g, eta));
        case OptimizerKind::signsgd: return sub(theta, signsgd_step(g, eta));
        case OptimizerKind::adam: return sub(theta, adam_step(state_, g, eta));
        case OptimizerKind::adamw: return adamw_update(theta, g, state_, cfg_, eta);
        case OptimizerKind::horst: return horst_update(theta, g, state_, cfg_, eta, &guard_, &flips_);
        case OptimizerKind::ham: return ham_update(theta, g, state_, cfg_, eta, &guard_, &flips_);
        case OptimizerKind::exp_sgd:
            return exp_update(theta, sgd_step(g, eta), cfg_.alpha, cfg_.beta, eta, &guard_);
        case OptimizerKind::exp_adam:
            return exp_update(theta, adam_step(state_, g, eta), cfg_.alpha, cfg_.beta, eta, &guard_);
        case OptimizerKind::sgd_exp: return sub(theta, sgd_step(abs_scaled(theta, g), eta));
        case OptimizerKind::adam_exp:
            return sub(theta, adam_step(state_, abs_scaled(theta, g), eta));
        case OptimizerKind::signsgd_exp:
            return sub(theta, signsgd_step(abs_scaled(theta, g), eta));
        case OptimizerKind::mirror_descent: return sub(theta, scale(mirror_step(mirror_, theta, g), eta));
        }
        return theta;
    }

private:
    static Vec abs_scaled(const Vec& theta, const Vec& g) {
        Vec r(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) r[i] = std::abs(theta[i]) * g[i];
        return r;
    }

    OptimizerKind kind_;
    OptimizerConfig cfg_;
    AdamState state_;
    MirrorMap mirror_;
    std::size_t iter_ = 0;
    ExpGuard guard_;
    std::size_t flips_ = 0;
};

// exp_after_base: theta * exp(-alpha sign(theta) base(g) - eta beta).
// base_after_exp: theta - base(|theta| * g).
inline Optimizer composed_optimizer(ComposeOrder order, BaseKind base, const OptimizerConfig& cfg,
                                    std::size_t n) {
    OptimizerKind k;
    if (order == ComposeOrder::exp_after_base) {
        if (base == BaseKind::signsgd)
            throw argument_error("composed_optimizer: exp_after_base with signsgd is not provided");
        k = base == BaseKind::sgd ? OptimizerKind::exp_sgd : OptimizerKind::exp_adam;
    } else {
        k = base == BaseKind::sgd       ? OptimizerKind::sgd_exp
            : base == BaseKind::signsgd ? OptimizerKind::signsgd_exp
                                        : OptimizerKind::adam_exp;
    }
    return Optimizer(k, cfg, n);
}

struct StepRecord {
    std::size_t iteration = 0;
    double loss = 0.0;
    Norms grad_norms;
    Norms update_norms;
    std::optional<std::size_t> theta_snapshot_id;
};

// loss_grad returns the loss and writes the gradient.
using LossGradFn = std::function<double(const Vec&, Vec&)>;

struct RunResult {
    Vec theta;
    double final_loss = 0.0;
    std::vector<StepRecord> history;
};

// Runs `steps` iterations, recording every `record_every` steps (and the last).
inline RunResult run_optimizer(Optimizer& opt, const LossGradFn& f, Vec theta, std::size_t steps,
                               std::size_t record_every = 0) {
    RunResult r;
    Vec g(theta.size());
    for (std::size_t k = 0; k < steps; ++k) {
        double loss = f(theta, g);
        Vec next = opt.step(theta, g);
        if (record_every && (k % record_every == 0 || k + 1 == steps)) {
            StepRecord rec;
            rec.iteration = k;
            rec.loss = loss;
            rec.grad_norms = norms_of(g);
            rec.update_norms = norms_of(sub(next, theta));
            r.history.push_back(rec);
        }
        theta = std::move(next);
    }
    r.final_loss = f(theta, g);
    r.theta = std::move(theta);
    return r;
}

} // namespace horst
