#pragma once

#include <chrono>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "horst/experiments.hpp"
#include "horst/flows.hpp"
#include "horst/lp.hpp"
#include "horst/optim.hpp"
#include "horst/properties.hpp"

namespace horst {

struct CriterionResult {
    int id = 0;
    std::string suite;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
    double budget = 0.0; // wall-clock limit in seconds, part of the pass condition
};

// Independent L1 max-margin solver used to validate the simplex oracle; nullopt when infeasible.
using BruteForceMargin = std::function<std::optional<double>(const MarginProblem&)>;

struct CheckContext {
    BruteForceMargin brute_force; // required by flow-convergence
    std::size_t jobs = 1;
};

struct SuiteInfo {
    int id;
    std::string name;
    double budget;
};

inline const std::vector<SuiteInfo>& suites() {
    static const std::vector<SuiteInfo> v{
        {1, "operator-algebra", 5.0},       {2, "flow-convergence", 120.0},  {3, "factor-flow", 30.0},
        {4, "implicit-bias", 120.0},        {5, "cosh-entropy", 60.0},       {6, "pl-convergence", 10.0},
        {7, "optimizer-mechanics", 30.0},   {8, "sparsity-ordering", 600.0}, {9, "determinism", 300.0}};
    return v;
}

namespace checks {

inline void note(std::string& d, const std::string& s) {
    if (!d.empty()) d += "; ";
    d += s;
}

inline bool operator_algebra(const CheckContext&, std::string& detail) {
    auto rows = operator_algebra_properties(0, 1000, 8);
    bool ok = true;
    std::size_t failed = 0;
    for (const auto& r : rows)
        if (!r.pass) {
            ok = false;
            ++failed;
            note(detail, r.name + " = " + fmt_num(r.value));
        }
    if (ok) detail = std::to_string(rows.size()) + " properties hold";
    return ok;
}

inline bool flow_convergence(const CheckContext& ctx, std::string& detail) {
    if (!ctx.brute_force) throw argument_error("flow-convergence: no brute-force oracle supplied");
    // LP oracle against support enumeration on 200 random instances.
    std::size_t mism = 0, checked = 0;
    double worst = 0.0;
    Rng pick(derive_seed(2024, 3));
    for (std::uint64_t s = 0; s < 200; ++s) {
        std::size_t n = 2 + pick.below(4); // 2..5
        std::size_t K = n + pick.below(9 - n); // n..8
        MarginProblem prob = make_margin_instance(n, K, 1000 + s);
        auto brute = ctx.brute_force(prob);
        if (!brute) continue;
        KKTCertificate c = l1_max_margin(prob);
        double gap = std::abs(c.objective - *brute) / std::max(1.0, std::abs(*brute));
        worst = std::max(worst, gap);
        ++checked;
        if (gap > 1e-6) ++mism;
    }
    bool ok = mism == 0 && checked == 200;
    note(detail, "LP vs brute force: " + std::to_string(checked) + " instances, worst rel gap " + fmt_num(worst));

    ExperimentConfig cfg = parse_config({{"experiment", "flow_convergence"}});
    ExperimentOutput out = run_experiment(cfg, ctx.jobs);
    for (const auto& a : out.assertions) {
        ok = ok && a.pass;
        if (!a.pass) note(detail, a.name + ": " + a.detail);
    }
    double worst_ratio = 0.0, worst_spread = 0.0;
    for (const auto& inst : out.summary["results"]["instances"]) {
        for (const auto& r : inst["objective_ratio"]) worst_ratio = std::max(worst_ratio, std::abs(r.get<double>() - 1.0));
        worst_spread = std::max(worst_spread, inst["max_pairwise_direction_gap"].get<double>());
    }
    note(detail, "10 instances x p in {2,3,4}: worst |ratio-1| " + fmt_num(worst_ratio) + ", worst direction spread " +
                     fmt_num(worst_spread));
    return ok;
}

inline bool factor_flow(const CheckContext&, std::string& detail) {
    bool ok = true;
    double dev = 0.0, bal = 0.0;
    for (std::size_t n : {1, 2})
        for (int p : {2, 3})
            for (std::uint64_t seed : {0, 1}) {
                MarginProblem prob = make_margin_instance(n, 2 + n, 50 + seed);
                KKTCertificate c = l1_max_margin(prob);
                Vec th0 = orthant_init(c.theta_star, 0.5);
                auto rep = factor_flow_equivalence(prob, p, th0, 2.0);
                dev = std::max(dev, rep.max_deviation);
                bal = std::max(bal, rep.balance_residual);
                if (rep.max_deviation > 1e-3 || rep.balance_residual > 1e-6) {
                    ok = false;
                    note(detail, "n=" + std::to_string(n) + " p=" + std::to_string(p) + " seed " + std::to_string(seed) +
                                     " fails");
                }
            }
    note(detail, "max deviation " + fmt_num(dev) + " (<= 1e-3), balance residual " + fmt_num(bal) + " (<= 1e-6)");
    return ok;
}

inline bool implicit_bias(const CheckContext& ctx, std::string& detail) {
    json c = default_config(ExperimentKind::implicit_bias_toy);
    json opts = json::object();
    for (const char* k : {"adam", "exp_adam", "adam_exp"}) opts[k] = c["optimizers"][k];
    ExperimentOutput out = run_experiment(parse_config({{"experiment", "implicit_bias_toy"}, {"optimizers", opts}}), ctx.jobs);
    bool ok = true;
    for (const auto& a : out.assertions) {
        ok = ok && a.pass;
        note(detail, a.name + (a.pass ? " ok" : " FAIL [" + a.detail + "]"));
    }
    return ok && out.assertions.size() == 4;
}

inline bool cosh_entropy(const CheckContext& ctx, std::string& detail) {
    json c = default_config(ExperimentKind::implicit_bias_toy);
    json opts{{"cosh", c["optimizers"]["cosh"]}, {"signsgd", c["optimizers"]["signsgd"]}};
    ExperimentOutput out = run_experiment(parse_config({{"experiment", "implicit_bias_toy"}, {"optimizers", opts}}), ctx.jobs);
    bool ok = out.assertions.size() == 1 && out.assertions[0].pass;
    const auto& res = out.summary["results"]["optimizers"];
    note(detail, "final log-loss cosh " + fmt_num(res["cosh"]["final_log_loss"]["mean"].get<double>()) + " vs signsgd " +
                     fmt_num(res["signsgd"]["final_log_loss"]["mean"].get<double>()) + (ok ? " (cosh higher on every seed)" : " FAIL"));

    Rng r(derive_seed(7, 5));
    std::vector<Vec> far, any, dirs;
    for (int i = 0; i < 200; ++i) {
        Vec a(6), b(6), d(6);
        for (std::size_t j = 0; j < 6; ++j) {
            a[j] = r.sign() * r.uniform(8.0, 30.0);
            b[j] = r.normal() * 10.0;
            d[j] = r.normal();
        }
        far.push_back(a);
        any.push_back(b);
        dirs.push_back(d);
    }
    double cp = coercivity_probe(MirrorMap::cosh_entropy(), far, dirs);
    bool cosh_ok = cp < 1e-3;
    note(detail, "cosh probe at |theta| >= 8: " + fmt_num(cp) + (cosh_ok ? " < 1e-3" : " FAIL"));
    for (double gamma : {1e-2, 0.5}) {
        double hp = coercivity_probe(MirrorMap::hyperbolic(gamma), any, dirs);
        bool h_ok = hp >= gamma;
        cosh_ok = cosh_ok && h_ok;
        note(detail, "hyperbolic(" + fmt_num(gamma) + ") probe " + fmt_num(hp) + (h_ok ? " >= gamma" : " FAIL"));
    }
    return ok && cosh_ok;
}

inline bool pl_convergence(const CheckContext&, std::string& detail) {
    bool ok = true;
    Rng r(derive_seed(11, 6));
    auto rand_vec = [&](double s) {
        Vec v(5);
        for (double& x : v) x = s * r.normal();
        return v;
    };
    {
        Vec star = rand_vec(1.0), th0 = rand_vec(2.0);
        auto rep = pl_convergence_check(MirrorMap::quadratic(), star, th0, 1.0, 1.0, 2.0, {0.5, 1.0, 2.0});
        double worst = 0.0;
        for (const auto& c : rep.checkpoints) worst = std::max(worst, std::abs(c.loss / c.bound - 1.0));
        bool q_ok = rep.checkpoints.size() == 3 && worst <= 0.01;
        ok = ok && q_ok;
        note(detail, "quadratic vs exp(-2t) at t=0.5,1,2: worst rel error " + fmt_num(worst) + (q_ok ? "" : " FAIL"));
    }
    double slack = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 5; ++i) {
        Vec star = rand_vec(1.0), th0 = rand_vec(2.0);
        auto rep = pl_convergence_check(MirrorMap::hyperbolic(0.5), star, th0, 0.5, 1.0, 4.0);
        slack = std::min(slack, rep.min_slack);
        ok = ok && rep.pass && rep.min_slack > 0.0;
    }
    note(detail, "hyperbolic(0.5) vs exp(-t) on 5 quadratics: min slack " + fmt_num(slack));
    return ok;
}

inline bool optimizer_mechanics(const CheckContext&, std::string& detail) {
    bool ok = true;
    Rng r(derive_seed(3, 7));
    const std::size_t n = 16;
    Vec target(n), theta0(n);
    for (std::size_t j = 0; j < n; ++j) {
        target[j] = r.normal();
        theta0[j] = r.normal();
    }
    GradOracle oracle;
    oracle.eval = [&](const Vec& t) {
        Vec g(t.size());
        for (std::size_t j = 0; j < t.size(); ++j) g[j] = std::sin(t[j]) + (t[j] - target[j]) * (1.0 + 0.1 * j);
        return g;
    };

    // HORST with alpha = beta = 0 is AdamW, bit for bit.
    {
        OptimizerConfig c;
        c.eta = 1e-2;
        c.lambda = 0.1;
        AdamState sa(n), sb(n);
        Vec a = theta0, b = theta0;
        bool same = true;
        for (int k = 0; k < 500; ++k) {
            a = adamw_step(a, oracle, sa, c);
            b = horst_step(b, oracle, sb, c);
            same = same && a == b;
        }
        ok = ok && same;
        note(detail, std::string("HORST(0,0) == AdamW over 500 steps: ") + (same ? "bit-identical" : "DIFFER"));
    }
    // One oracle call per step.
    {
        OptimizerConfig c;
        c.eta = 1e-2;
        c.alpha = 5.0;
        c.beta = 0.1;
        AdamState s(n);
        Vec t = theta0;
        std::size_t before = oracle.calls;
        for (int k = 0; k < 100; ++k) t = horst_step(t, oracle, s, c);
        std::size_t horst_calls = oracle.calls - before;
        AdamState s2(n);
        t = theta0;
        before = oracle.calls;
        for (int k = 0; k < 100; ++k) t = ham_step(t, oracle, s2, c);
        std::size_t ham_calls = oracle.calls - before;
        bool one = horst_calls == 100 && ham_calls == 100;
        ok = ok && one;
        note(detail, "oracle calls per 100 steps: HORST " + std::to_string(horst_calls) + ", HAM " +
                         std::to_string(ham_calls));
    }
    // Zero gradient: each step multiplies by exp(-eta beta) exactly.
    {
        const double eta = 0.05, beta = 0.7;
        Vec t = theta0, zero(n, 0.0);
        bool exact = true;
        for (int k = 0; k < 50; ++k) {
            Vec next = exp_update(t, zero, 3.0, beta, eta);
            for (std::size_t j = 0; j < n; ++j) exact = exact && next[j] == t[j] * std::exp(-eta * beta);
            t = next;
        }
        ok = ok && exact;
        note(detail, std::string("zero-gradient shrinkage exp(-eta beta): ") + (exact ? "exact" : "INEXACT"));
    }
    // exp_update never changes a sign, and never revives a zero.
    {
        std::size_t flips = 0;
        for (int k = 0; k < 1000; ++k) {
            Vec t(n), step(n);
            for (std::size_t j = 0; j < n; ++j) {
                t[j] = r.normal();
                step[j] = 20.0 * r.normal();
            }
            t[k % n] = 0.0;
            Vec out = exp_update(t, step, 5.0, 0.1, 0.1);
            for (std::size_t j = 0; j < n; ++j) flips += sgn(out[j]) != sgn(t[j]);
        }
        ok = ok && flips == 0;
        note(detail, "exp_update sign changes over 16000 coordinates: " + std::to_string(flips));
    }
    return ok;
}

inline bool sparsity_ordering(const CheckContext& ctx, std::string& detail) {
    ExperimentOutput a = run_experiment(parse_config({{"experiment", "acdc_toy"}}), ctx.jobs);
    ExperimentOutput b = run_experiment(parse_config({{"experiment", "one_shot_toy"}}), ctx.jobs);
    bool ok = true;
    for (const auto* out : {&a, &b})
        for (const auto& x : out->assertions) {
            ok = ok && x.pass;
            note(detail, x.name + (x.pass ? " ok" : " FAIL") + " [" + x.detail + "]");
        }
    return ok && a.assertions.size() == 2 && b.assertions.size() == 2;
}

// Small versions of every experiment, each run twice (1 and 2 workers) and compared byte for byte.
inline std::vector<json> determinism_configs() {
    return {
        {{"experiment", "implicit_bias_toy"}, {"T", 300}, {"problem", {{"D", 30}, {"N", 20}}}},
        {{"experiment", "flow_convergence"}, {"seeds", {0, 1}}, {"p", {2, 3}}, {"flow", {{"stop_margin", 50.0}}}},
        {{"experiment", "operator_properties"}, {"seeds", {0, 1}}, {"samples", 50}},
        {{"experiment", "acdc_toy"}, {"steps", 120}, {"record_every", 10}, {"task", {{"N", 200}, {"N_val", 100}}}},
        {{"experiment", "one_shot_toy"}, {"steps", 120}, {"record_every", 10}, {"task", {{"N", 200}, {"N_val", 100}}}},
        {{"experiment", "ham_vs_horst_toy"}, {"steps", 120}, {"record_every", 10}, {"task", {{"N", 200}, {"N_val", 100}}}}};
}

inline bool determinism(const CheckContext&, std::string& detail) {
    bool ok = true;
    std::size_t files = 0;
    for (const auto& j : determinism_configs()) {
        ExperimentConfig c = parse_config(j);
        ExperimentOutput x = run_experiment(c, 1);
        ExperimentOutput y = run_experiment(c, 2);
        bool same = x.files == y.files;
        files += x.files.size();
        if (!same) {
            ok = false;
            for (const auto& [name, bytes] : x.files) {
                auto it = y.files.find(name);
                if (it == y.files.end() || it->second != bytes) note(detail, to_string(c.experiment) + "/" + name + " differs");
            }
        }
    }
    note(detail, std::to_string(files) + " output files compared across two runs");
    return ok;
}

} // namespace checks

inline std::optional<SuiteInfo> find_suite(const std::string& name) {
    for (const auto& s : suites())
        if (s.name == name) return s;
    return std::nullopt;
}

inline CriterionResult run_suite(const SuiteInfo& info, const CheckContext& ctx) {
    using F = bool (*)(const CheckContext&, std::string&);
    static const F table[] = {checks::operator_algebra, checks::flow_convergence, checks::factor_flow,
                              checks::implicit_bias,    checks::cosh_entropy,     checks::pl_convergence,
                              checks::optimizer_mechanics, checks::sparsity_ordering, checks::determinism};
    CriterionResult r;
    r.id = info.id;
    r.suite = info.name;
    r.budget = info.budget;
    auto t0 = std::chrono::steady_clock::now();
    try {
        r.pass = table[info.id - 1](ctx, r.detail);
    } catch (const std::exception& e) {
        r.pass = false;
        checks::note(r.detail, std::string("exception: ") + e.what());
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (r.seconds >= r.budget) {
        r.pass = false;
        checks::note(r.detail, "over the " + fmt_num(r.budget) + " s budget");
    }
    return r;
}

inline std::string verdict_line(const CriterionResult& r) {
    char t[32];
    std::snprintf(t, sizeof t, "%.1fs", r.seconds);
    return std::string(r.pass ? "PASS" : "FAIL") + " [" + std::to_string(r.id) + "] " + r.suite + " (" + t + "): " +
           r.detail;
}

} // namespace horst
