#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "horst/core.hpp"
#include "horst/lp.hpp"
#include "horst/mirror.hpp"

namespace horst {

struct integration_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MarginProblem {
    std::vector<Vec> X; // K rows of length n
    Vec y;              // labels in {-1, +1}

    std::size_t K() const { return X.size(); }
    std::size_t n() const { return X.empty() ? 0 : X.front().size(); }

    void validate() const {
        if (X.empty()) throw argument_error("MarginProblem: no data");
        if (y.size() != X.size()) throw dimension_error("MarginProblem: |y| != rows of X");
        for (const auto& r : X)
            if (r.size() != n()) throw dimension_error("MarginProblem: ragged X");
        for (double v : y)
            if (v != 1.0 && v != -1.0) throw argument_error("MarginProblem: labels must be +-1");
    }

    // Rows a_i = y_i x_i.
    std::vector<Vec> signed_rows() const {
        std::vector<Vec> A = X;
        for (std::size_t i = 0; i < A.size(); ++i)
            for (double& v : A[i]) v *= y[i];
        return A;
    }

    Vec margins(const Vec& theta) const {
        Vec m(K());
        for (std::size_t i = 0; i < K(); ++i) m[i] = y[i] * dot(X[i], theta);
        return m;
    }
    double min_margin(const Vec& theta) const {
        Vec m = margins(theta);
        return *std::min_element(m.begin(), m.end());
    }
};

struct KKTCertificate {
    Vec theta_star;
    double objective = 0.0;
    std::vector<std::size_t> active_set;
    Vec dual;                  // lambda_i >= 0 per datum
    bool dual_feasible = false;
    bool unique = true;        // false when a perturbed re-solve lands on another vertex
    double slack_gap = 0.0;    // min over inactive coordinates of 1 - |A' lambda|_j
    double min_active_dual = 0.0;
};

namespace detail {
inline LpResult solve_l1_lp(const std::vector<Vec>& A, const Vec& cost_pm) {
    const std::size_t K = A.size(), n = A.front().size();
    // Variables: theta+ (n), theta- (n), surplus (K).
    std::vector<Vec> M(K, Vec(2 * n + K, 0.0));
    for (std::size_t i = 0; i < K; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            M[i][j] = A[i][j];
            M[i][n + j] = -A[i][j];
        }
        M[i][2 * n + i] = -1.0;
    }
    Vec c(2 * n + K, 0.0);
    for (std::size_t j = 0; j < 2 * n; ++j) c[j] = cost_pm[j];
    return DenseSimplex::solve(c, M, Vec(K, 1.0));
}
} // namespace detail

// min ||theta||_1 s.t. y_i <theta, x_i> >= 1 via theta = theta+ - theta-.
inline KKTCertificate l1_max_margin(const MarginProblem& prob) {
    prob.validate();
    const std::size_t n = prob.n(), K = prob.K();
    const auto A = prob.signed_rows();
    LpResult r = detail::solve_l1_lp(A, Vec(2 * n, 1.0));
    if (r.status == LpStatus::infeasible)
        throw infeasible_error("l1_max_margin: data are not linearly separable");
    if (r.status == LpStatus::unbounded) throw std::logic_error("l1_max_margin: unbounded LP");

    KKTCertificate cert;
    cert.theta_star.assign(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) cert.theta_star[j] = r.x[j] - r.x[n + j];
    cert.objective = norm1(cert.theta_star);
    cert.dual = r.duals;
    Vec m = prob.margins(cert.theta_star);
    for (std::size_t i = 0; i < K; ++i)
        if (m[i] <= 1.0 + 1e-9) cert.active_set.push_back(i);

    Vec atl(n, 0.0);
    for (std::size_t i = 0; i < K; ++i)
        for (std::size_t j = 0; j < n; ++j) atl[j] += A[i][j] * cert.dual[i];
    bool ok = true;
    for (std::size_t i = 0; i < K; ++i) {
        if (cert.dual[i] < -1e-9) ok = false;
        if (std::abs(cert.dual[i] * (m[i] - 1.0)) > 1e-6) ok = false;
        if (m[i] < 1.0 - 1e-9) ok = false;
    }
    cert.slack_gap = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
        if (std::abs(atl[j]) > 1.0 + 1e-9) ok = false;
        double t = cert.theta_star[j];
        if (std::abs(t) > 1e-12) {
            if (std::abs(t) * std::abs(1.0 - sgn(t) * atl[j]) > 1e-6) ok = false;
        } else {
            cert.slack_gap = std::min(cert.slack_gap, 1.0 - std::abs(atl[j]));
        }
    }
    cert.dual_feasible = ok;
    cert.min_active_dual = std::numeric_limits<double>::infinity();
    for (std::size_t i : cert.active_set)
        cert.min_active_dual = std::min(cert.min_active_dual, cert.dual[i]);

    // Opposite cost perturbations reach distinct vertices iff the optimal face is not a point.
    for (double sgn_eps : {1e-7, -1e-7}) {
        Vec cp(2 * n);
        for (std::size_t j = 0; j < 2 * n; ++j)
            cp[j] = 1.0 + sgn_eps * std::sin(1.0 + 2.3 * static_cast<double>(j));
        LpResult rp = detail::solve_l1_lp(A, cp);
        if (rp.status != LpStatus::optimal) continue;
        for (std::size_t j = 0; j < n; ++j)
            if (std::abs((rp.x[j] - rp.x[n + j]) - cert.theta_star[j]) > 1e-6) cert.unique = false;
    }
    return cert;
}

enum class TimeParameterization { normalized, rescaled };

struct FlowConfig {
    double p = 2.0;
    TimeParameterization time_parameterization = TimeParameterization::normalized;
    double step_size = 0.05;  // largest Euler step
    double max_time = std::numeric_limits<double>::infinity();
    double stop_margin = 1e4; // stop once min_i y_i <theta, x_i> reaches this
    double kappa = 0.1;       // cap on any margin's change per step; <= 0 disables
    std::size_t max_steps = 20'000'000;
    int max_halvings = 30;

    void validate() const {
        if (!(p >= 2.0) || std::isinf(p)) throw config_error("flow.p must be finite and >= 2");
        if (!(step_size > 0.0)) throw config_error("flow.step_size must be positive");
        if (!(stop_margin > 0.0)) throw config_error("flow.stop_margin must be positive");
    }
};

struct FlowCheckpoint {
    double t = 0.0;
    double min_margin = 0.0;
    double log_loss = 0.0;
    Norms norms;
    Vec direction; // theta / ||theta||_1
};

struct FlowTrajectory {
    std::vector<FlowCheckpoint> checkpoints;
    Vec theta;
    double t = 0.0;
    std::size_t steps = 0;
    std::size_t rejected = 0;
    bool reached_margin = false;

    const Vec& final_direction() const { return checkpoints.back().direction; }
};

inline Vec l1_direction(const Vec& theta) {
    double s = norm1(theta);
    return s > 0.0 ? scale(theta, 1.0 / s) : theta;
}

namespace detail {
// log sum_i exp(-m_i) and its gradient, the softmax-weighted -sum w_i a_i.
inline double log_exp_loss(const std::vector<Vec>& A, const Vec& theta, Vec* grad) {
    const std::size_t K = A.size();
    Vec m(K);
    double mn = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < K; ++i) {
        m[i] = dot(A[i], theta);
        mn = std::min(mn, m[i]);
    }
    double s = 0.0;
    Vec w(K);
    for (std::size_t i = 0; i < K; ++i) s += (w[i] = std::exp(-(m[i] - mn)));
    if (grad) {
        grad->assign(theta.size(), 0.0);
        for (std::size_t i = 0; i < K; ++i)
            for (std::size_t j = 0; j < theta.size(); ++j) (*grad)[j] -= (w[i] / s) * A[i][j];
    }
    return -mn + std::log(s);
}

inline FlowCheckpoint make_checkpoint(const MarginProblem& prob, const Vec& theta, double t,
                                      double logL) {
    return {t, prob.min_margin(theta), logL, norms_of(theta), l1_direction(theta)};
}
} // namespace detail

// Entropy-map steepest flow  d theta = -|theta| sign(G) |G|^{q-1} [/ ||G||_q]  with G the
// gradient of log L (a positive rescaling of grad L, so the path is that of grad L).
// Explicit Euler; steps that raise the loss or flip a sign are halved.
inline FlowTrajectory integrate_steepest_mirror(const MarginProblem& prob, const FlowConfig& cfg,
                                                Vec theta) {
    prob.validate();
    cfg.validate();
    if (theta.size() != prob.n()) throw dimension_error("integrate_steepest_mirror: theta0 length");
    for (double v : theta)
        if (std::abs(v) < 1e-6)
            throw argument_error("integrate_steepest_mirror: |theta0_i| must be >= 1e-6");
    const auto A = prob.signed_rows();
    const std::size_t n = theta.size(), K = A.size();
    const double q = cfg.p / (cfg.p - 1.0);
    const bool normalize = cfg.time_parameterization == TimeParameterization::normalized;

    FlowTrajectory tr;
    Vec G;
    double logL = detail::log_exp_loss(A, theta, &G);
    tr.checkpoints.push_back(detail::make_checkpoint(prob, theta, 0.0, logL));
    double next_mark = 1.0;
    while (next_mark <= tr.checkpoints.back().min_margin) next_mark *= 2.0;

    double h = cfg.step_size;
    int halvings = 0;
    Vec v(n), cand(n), Gc;
    while (tr.steps < cfg.max_steps && tr.t < cfg.max_time) {
        double gq = 0.0;
        for (std::size_t j = 0; j < n; ++j) gq += std::pow(std::abs(G[j]), q);
        double denom = normalize ? std::pow(gq, 1.0 / q) : 1.0;
        if (gq == 0.0) break;
        for (std::size_t j = 0; j < n; ++j)
            v[j] = std::abs(theta[j]) < 1e-12
                       ? 0.0
                       : -std::abs(theta[j]) * sgn(G[j]) * std::pow(std::abs(G[j]), q - 1.0) / denom;
        double hh = std::min(h, cfg.max_time - tr.t);
        if (cfg.kappa > 0.0) {
            double rate = 0.0;
            for (std::size_t i = 0; i < K; ++i) rate = std::max(rate, std::abs(dot(A[i], v)));
            if (rate > 0.0) hh = std::min(hh, cfg.kappa / rate);
        }
        bool flipped = false;
        for (std::size_t j = 0; j < n; ++j) {
            cand[j] = theta[j] + hh * v[j];
            if (theta[j] != 0.0 && sgn(cand[j]) != sgn(theta[j])) flipped = true;
        }
        double logLc = flipped ? std::numeric_limits<double>::infinity()
                               : detail::log_exp_loss(A, cand, &Gc);
        if (logLc <= logL + 1e-14 * std::max(1.0, std::abs(logL))) {
            theta.swap(cand);
            G.swap(Gc);
            logL = logLc;
            tr.t += hh;
            ++tr.steps;
            halvings = 0;
            h = std::min(hh * 1.2, cfg.step_size);
            double mm = prob.min_margin(theta);
            if (mm >= next_mark) {
                tr.checkpoints.push_back(detail::make_checkpoint(prob, theta, tr.t, logL));
                while (next_mark <= mm) next_mark *= 2.0;
            }
            if (mm >= cfg.stop_margin) {
                tr.reached_margin = true;
                break;
            }
        } else {
            ++tr.rejected;
            h = hh / 2.0;
            if (++halvings > cfg.max_halvings) {
                std::ostringstream os;
                os << "integrate_steepest_mirror: loss not decreasing after " << cfg.max_halvings
                   << " halvings at t=" << tr.t << ", step " << tr.steps << ", log-loss " << logL
                   << ", min margin " << prob.min_margin(theta);
                throw integration_error(os.str());
            }
        }
    }
    if (tr.checkpoints.back().t != tr.t)
        tr.checkpoints.push_back(detail::make_checkpoint(prob, theta, tr.t, logL));
    tr.theta = theta;
    return tr;
}

inline void write_trajectory_csv(std::ostream& os, const FlowTrajectory& tr) {
    os.precision(17);
    std::size_t n = tr.theta.size();
    os << "t,loss,log_loss,l1,l2,linf,min_margin";
    for (std::size_t j = 0; j < n; ++j) os << ",d" << j;
    os << '\n';
    for (const auto& c : tr.checkpoints) {
        os << c.t << ',' << std::exp(c.log_loss) << ',' << c.log_loss << ',' << c.norms.l1 << ','
           << c.norms.l2 << ',' << c.norms.linf << ',' << c.min_margin;
        for (double d : c.direction) os << ',' << d;
        os << '\n';
    }
}

// Endpoint rescaled to unit minimum margin: its L1 norm relative to the oracle objective.
inline double endpoint_objective_ratio(const MarginProblem& prob, const Vec& theta,
                                       const KKTCertificate& cert) {
    return norm1(theta) / prob.min_margin(theta) / cert.objective;
}

struct FactorFlowReport {
    double max_deviation = 0.0;    // relative L-inf gap between product and direct flows
    double balance_residual = 0.0; // max | |w_i| - |theta|^{1/p} |
    std::size_t checkpoints = 0;
};

namespace detail {
// Plain exponential loss L = sum_i exp(-m_i) and gradient.
inline double exp_loss(const std::vector<Vec>& A, const Vec& theta, Vec& grad) {
    grad.assign(theta.size(), 0.0);
    double L = 0.0;
    for (const auto& a : A) {
        double w = std::exp(-dot(a, theta));
        L += w;
        for (std::size_t j = 0; j < theta.size(); ++j) grad[j] -= w * a[j];
    }
    return L;
}
} // namespace detail

// Depth-p product theta = w_1 ... w_p, each factor on the Lp steepest flow
// dw_i = -sign(dL/dw_i)|dL/dw_i|^{q-1}, against the direct flow
// d theta = -p |theta| sign(grad L)|grad L|^{q-1}. Balanced factors move p times the
// direct entropy flow, so the direct side carries the factor p. Fixed-step Euler on both.
inline FactorFlowReport factor_flow_equivalence(const MarginProblem& prob, int p, const Vec& theta0,
                                                double horizon, double h = 1e-4,
                                                std::size_t n_checkpoints = 20) {
    prob.validate();
    if (p < 2) throw argument_error("factor_flow_equivalence: p must be >= 2");
    if (theta0.size() != prob.n()) throw dimension_error("factor_flow_equivalence: theta0 length");
    const auto A = prob.signed_rows();
    const std::size_t n = theta0.size();
    const double q = static_cast<double>(p) / (p - 1.0);

    std::vector<Vec> w(p, Vec(n));
    for (std::size_t j = 0; j < n; ++j) {
        double mag = std::pow(std::abs(theta0[j]), 1.0 / p);
        for (int i = 0; i < p; ++i) w[i][j] = mag;
        w[0][j] *= sgn(theta0[j]) == 0 ? 1.0 : sgn(theta0[j]);
    }
    auto product = [&]() {
        Vec t(n, 1.0);
        for (int i = 0; i < p; ++i)
            for (std::size_t j = 0; j < n; ++j) t[j] *= w[i][j];
        return t;
    };
    Vec theta = theta0;
    FactorFlowReport rep;
    const std::size_t steps = static_cast<std::size_t>(std::llround(horizon / h));
    const std::size_t every = std::max<std::size_t>(1, steps / n_checkpoints);
    Vec g, gw(n);
    double Lprev_direct = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k <= steps; ++k) {
        // direct flow
        double L = detail::exp_loss(A, theta, g);
        if (L > Lprev_direct * (1.0 + 1e-12))
            throw integration_error("factor_flow_equivalence: direct-flow loss increased");
        Lprev_direct = L;
        for (std::size_t j = 0; j < n; ++j)
            theta[j] -= h * p * std::abs(theta[j]) * sgn(g[j]) * std::pow(std::abs(g[j]), q - 1.0);
        // factor flow, all factors from the same state
        Vec th = product();
        detail::exp_loss(A, th, g);
        std::vector<Vec> nw = w;
        for (int i = 0; i < p; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                double others = 1.0;
                for (int l = 0; l < p; ++l)
                    if (l != i) others *= w[l][j];
                double d = g[j] * others;
                nw[i][j] -= h * sgn(d) * std::pow(std::abs(d), q - 1.0);
            }
        w.swap(nw);
        if (k % every == 0 || k == steps) {
            Vec tp = product();
            double scale_ref = std::max(norm_inf(theta), 1e-300);
            rep.max_deviation = std::max(rep.max_deviation, norm_inf(sub(tp, theta)) / scale_ref);
            for (int i = 0; i < p; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    rep.balance_residual =
                        std::max(rep.balance_residual,
                                 std::abs(std::abs(w[i][j]) - std::pow(std::abs(tp[j]), 1.0 / p)));
            ++rep.checkpoints;
        }
    }
    return rep;
}

struct PLCheckpoint {
    double t = 0.0;
    double loss = 0.0;
    double bound = 0.0;
};

struct PLReport {
    bool pass = false;
    double min_slack = 0.0; // min over checkpoints of 1 - loss / bound
    std::vector<PLCheckpoint> checkpoints;
};

// Mirror flow on L = 0.5 ||theta - theta*||^2 (PL with constant Lambda), checking
// L(theta_t) <= L(theta_0) exp(-2 mu Lambda t) (1 + tol) at the checkpoint times.
inline PLReport pl_convergence_check(const MirrorMap& map, const Vec& theta_star, const Vec& theta0,
                                     double mu, double Lambda, double horizon,
                                     std::vector<double> times = {}, double h = 1e-4,
                                     double tol = 1e-9) {
    if (!map.coercive())
        throw argument_error("pl_convergence_check: " + map.label() + " is not inversely coercive");
    require_same_length(theta_star, theta0, "pl_convergence_check");
    if (times.empty())
        for (double t = 0.125; t <= horizon + 1e-12; t *= 2.0) times.push_back(t);
    auto loss = [&](const Vec& t) {
        double s = 0.0;
        for (std::size_t j = 0; j < t.size(); ++j) s += 0.5 * (t[j] - theta_star[j]) * (t[j] - theta_star[j]);
        return s;
    };
    Vec theta = theta0;
    const double L0 = loss(theta0);
    PLReport rep;
    rep.pass = true;
    rep.min_slack = std::numeric_limits<double>::infinity();
    std::size_t next = 0;
    std::sort(times.begin(), times.end());
    double Lprev = L0;
    const std::size_t steps = static_cast<std::size_t>(std::llround(horizon / h));
    for (std::size_t k = 1; k <= steps && next < times.size(); ++k) {
        for (std::size_t j = 0; j < theta.size(); ++j)
            theta[j] -= h * map.inv_hessian(theta[j]) * (theta[j] - theta_star[j]);
        double L = loss(theta);
        if (L > Lprev * (1.0 + 1e-12))
            throw integration_error("pl_convergence_check: loss increased");
        Lprev = L;
        double t = static_cast<double>(k) * h;
        if (t + 0.5 * h >= times[next]) {
            double bound = L0 * std::exp(-2.0 * mu * Lambda * times[next]);
            rep.checkpoints.push_back({times[next], L, bound});
            if (L > bound * (1.0 + tol)) rep.pass = false;
            rep.min_slack = std::min(rep.min_slack, bound > 0 ? 1.0 - L / bound : 0.0);
            ++next;
        }
    }
    if (next < times.size()) rep.pass = false;
    return rep;
}

} // namespace horst
