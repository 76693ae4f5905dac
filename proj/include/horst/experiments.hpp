#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <numeric>
#include <string>
#include <thread>
#include <vector>

#include "horst/core.hpp"
#include "horst/flows.hpp"
#include "horst/io.hpp"
#include "horst/mirror.hpp"
#include "horst/optim.hpp"
#include "horst/problems.hpp"
#include "horst/properties.hpp"
#include "horst/sparsify.hpp"
#include "horst/steepest.hpp"

namespace horst {

// ---------------------------------------------------------------- config ----

enum class ExperimentKind {
    implicit_bias_toy,
    flow_convergence,
    operator_properties,
    acdc_toy,
    one_shot_toy,
    ham_vs_horst_toy
};

inline const std::vector<std::pair<ExperimentKind, std::string>>& experiment_names() {
    static const std::vector<std::pair<ExperimentKind, std::string>> v{
        {ExperimentKind::implicit_bias_toy, "implicit_bias_toy"},
        {ExperimentKind::flow_convergence, "flow_convergence"},
        {ExperimentKind::operator_properties, "operator_properties"},
        {ExperimentKind::acdc_toy, "acdc_toy"},
        {ExperimentKind::one_shot_toy, "one_shot_toy"},
        {ExperimentKind::ham_vs_horst_toy, "ham_vs_horst_toy"}};
    return v;
}

inline std::string to_string(ExperimentKind k) {
    for (const auto& [kind, name] : experiment_names())
        if (kind == k) return name;
    return "?";
}

inline std::string experiment_description(ExperimentKind k) {
    switch (k) {
    case ExperimentKind::implicit_bias_toy:
        return "sparse-teacher linear classification; coefficient profiles of additive vs multiplicative optimizers";
    case ExperimentKind::flow_convergence:
        return "entropy-map steepest flows for p in {2,3,4} against the L1 max-margin LP oracle";
    case ExperimentKind::operator_properties:
        return "pass/fail table of the operator-algebra invariants";
    case ExperimentKind::acdc_toy:
        return "alternating dense/sparse training of the two-layer task, AdamW vs HORST";
    case ExperimentKind::one_shot_toy:
        return "one-shot per-tensor magnitude pruning of dense two-layer checkpoints";
    case ExperimentKind::ham_vs_horst_toy:
        return "HAM (raw-gradient exponent) vs HORST (Adam-step exponent) on the two-layer task";
    }
    return "";
}

inline std::string reproduces(ExperimentKind k) {
    switch (k) {
    case ExperimentKind::implicit_bias_toy: return "coefficient profiles, loss curves and cosh-entropy loss comparison";
    case ExperimentKind::flow_convergence: return "directional convergence of steepest-mirror flows to the L1 max-margin point";
    case ExperimentKind::operator_properties: return "operator algebra: linearity, scale invariance, absorption, non-commutation, boundedness";
    case ExperimentKind::acdc_toy: return "dense/sparse alternation accuracy ordering";
    case ExperimentKind::one_shot_toy: return "one-shot pruning degradation and standardized weight distributions";
    case ExperimentKind::ham_vs_horst_toy: return "HAM vs HORST comparison";
    }
    return "";
}

inline ExperimentKind parse_experiment_kind(const std::string& s) {
    for (const auto& [kind, name] : experiment_names())
        if (name == s) return kind;
    throw config_error("experiment: unknown experiment '" + s + "'");
}

inline json default_config(ExperimentKind k) {
    json j;
    j["experiment"] = to_string(k);
    switch (k) {
    case ExperimentKind::implicit_bias_toy:
        j["seeds"] = {0, 1, 2};
        j["problem"] = {{"D", 100}, {"N", 80}, {"s_star", 2}};
        j["T"] = 10000;
        j["record_every"] = 100;
        j["init_scale"] = 0.1;
        j["optimizers"] = {
            {"sgd", {{"kind", "sgd"}, {"eta", 1e-2}}},
            {"exp_sgd", {{"kind", "exp_sgd"}, {"eta", 1e-2}, {"alpha", 1.0}}},
            {"signsgd", {{"kind", "signsgd"}, {"eta", 0.1}}},
            {"adam", {{"kind", "adam"}, {"eta", 1e-2}}},
            {"exp_adam", {{"kind", "exp_adam"}, {"eta", 1e-2}, {"alpha", 1.0}}},
            {"adam_exp", {{"kind", "adam_exp"}, {"eta", 1e-2}}},
            {"cosh", {{"kind", "mirror_descent"}, {"mirror", "cosh_entropy"}, {"eta", 0.9}}},
            {"hyperbolic", {{"kind", "mirror_descent"}, {"mirror", "hyperbolic_entropy"}, {"gamma", 1e-2}, {"eta", 0.9}}}};
        j["thresholds"] = {{"exp_adam_quiet", 0.9}, {"adam_saturation", 0.8}};
        break;
    case ExperimentKind::flow_convergence:
        j["seeds"] = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
        j["problem"] = {{"n", 4}, {"K", 6}};
        j["p"] = {2, 3, 4};
        j["flow"] = {{"time_parameterization", "normalized"}, {"step_size", 0.05}, {"stop_margin", 1e4},
                     {"kappa", 0.1}, {"init_scale", 0.1}};
        j["tolerance"] = {{"objective", 0.05}, {"direction", 0.05}};
        break;
    case ExperimentKind::operator_properties:
        j["seeds"] = {0};
        j["samples"] = 1000;
        j["dimension"] = 8;
        break;
    case ExperimentKind::acdc_toy:
    case ExperimentKind::one_shot_toy:
    case ExperimentKind::ham_vs_horst_toy:
        j["seeds"] = {0, 1, 2};
        j["task"] = {{"D", 20}, {"N", 2000}, {"N_val", 1000}, {"classes", 4}, {"hidden", 64},
                     {"informative", 4}, {"separation", 1.5}};
        j["steps"] = 2000;
        j["record_every"] = 50;
        {
            json base = {{"eta", 1e-3}, {"lambda", 0.05}, {"schedule", "cosine"}, {"warmup", 100}};
            json horst = base;
            horst["kind"] = "horst";
            horst["alpha"] = 5.0;
            horst["beta"] = 0.0;
            json adamw = base;
            adamw["kind"] = "adamw";
            j["optimizers"] = {{"adamw", adamw}, {"horst", horst}};
            if (k == ExperimentKind::ham_vs_horst_toy) {
                json ham = base;
                ham["kind"] = "ham";
                ham["alpha"] = 200.0;
                ham["beta"] = 0.0;
                j["optimizers"]["ham"] = ham;
            }
        }
        if (k == ExperimentKind::acdc_toy)
            j["acdc"] = {{"sparsity", 0.9}, {"pairs", 5}, {"warmup_fraction", 0.1}, {"final_fraction", 0.2},
                         {"exempt_first_last", false}};
        if (k == ExperimentKind::one_shot_toy) {
            j["grid"] = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6};
            j["check_sparsity"] = 0.5;
            j["histogram_bins"] = 41;
        }
        break;
    }
    j["output_dir"] = "";
    return j;
}

namespace cfg {
inline const json& at(const json& j, const std::string& key, const std::string& path) {
    if (!j.is_object() || !j.contains(key)) throw config_error(path + "." + key + ": missing");
    return j.at(key);
}
inline double num(const json& j, const std::string& key, const std::string& path) {
    const json& v = at(j, key, path);
    if (!v.is_number()) throw config_error(path + "." + key + ": expected a number");
    return v.get<double>();
}
inline double positive(const json& j, const std::string& key, const std::string& path) {
    double v = num(j, key, path);
    if (!(v > 0.0)) throw config_error(path + "." + key + ": must be positive");
    return v;
}
inline std::size_t count(const json& j, const std::string& key, const std::string& path, std::size_t min = 1) {
    const json& v = at(j, key, path);
    if (!v.is_number_integer() || v.get<long long>() < static_cast<long long>(min))
        throw config_error(path + "." + key + ": expected an integer >= " + std::to_string(min));
    return v.get<std::size_t>();
}
inline std::string str(const json& j, const std::string& key, const std::string& path) {
    const json& v = at(j, key, path);
    if (!v.is_string()) throw config_error(path + "." + key + ": expected a string");
    return v.get<std::string>();
}
inline double num_or(const json& j, const std::string& key, const std::string& path, double def) {
    return j.contains(key) ? num(j, key, path) : def;
}
} // namespace cfg

struct NamedOptimizer {
    std::string name;
    OptimizerKind kind = OptimizerKind::adamw;
    OptimizerConfig cfg;
    MirrorMap mirror = MirrorMap::quadratic();
};

inline NamedOptimizer parse_optimizer(const std::string& name, const json& j, const std::string& path) {
    if (!j.is_object()) throw config_error(path + ": expected an object");
    NamedOptimizer o;
    o.name = name;
    std::string kind = j.contains("kind") ? cfg::str(j, "kind", path) : name;
    auto k = parse_optimizer_kind(kind);
    if (!k) throw config_error(path + ".kind: unknown optimizer '" + kind + "'");
    o.kind = *k;
    o.cfg.eta = cfg::positive(j, "eta", path);
    o.cfg.lambda = cfg::num_or(j, "lambda", path, 0.0);
    o.cfg.alpha = cfg::num_or(j, "alpha", path, 0.0);
    o.cfg.beta = cfg::num_or(j, "beta", path, 0.0);
    o.cfg.beta1 = cfg::num_or(j, "beta1", path, 0.9);
    o.cfg.beta2 = cfg::num_or(j, "beta2", path, 0.999);
    o.cfg.epsilon = cfg::num_or(j, "epsilon", path, 1e-8);
    if (j.contains("warmup")) o.cfg.warmup = cfg::count(j, "warmup", path, 0);
    if (j.contains("schedule")) {
        std::string s = cfg::str(j, "schedule", path);
        if (s == "constant") o.cfg.schedule = ScheduleKind::constant;
        else if (s == "cosine") o.cfg.schedule = ScheduleKind::cosine;
        else if (s == "triangular") o.cfg.schedule = ScheduleKind::triangular;
        else throw config_error(path + ".schedule: expected constant, cosine or triangular");
    }
    if (o.kind == OptimizerKind::mirror_descent) {
        std::string m = cfg::str(j, "mirror", path);
        double gamma = cfg::num_or(j, "gamma", path, MirrorMap::default_gamma);
        if (!(gamma > 0.0)) throw config_error(path + ".gamma: must be positive");
        if (m == "quadratic") o.mirror = MirrorMap::quadratic();
        else if (m == "hyperbolic_entropy") o.mirror = MirrorMap::hyperbolic(gamma);
        else if (m == "cosh_entropy") o.mirror = MirrorMap::cosh_entropy();
        else throw config_error(path + ".mirror: expected quadratic, hyperbolic_entropy or cosh_entropy");
    }
    return o;
}

inline json optimizer_json(const NamedOptimizer& o) {
    json j{{"kind", to_string(o.kind)}, {"eta", o.cfg.eta}, {"lambda", o.cfg.lambda}, {"alpha", o.cfg.alpha},
           {"beta", o.cfg.beta}, {"schedule", to_string(o.cfg.schedule)}, {"warmup", o.cfg.warmup},
           {"total_steps", o.cfg.total_steps}, {"beta1", o.cfg.beta1}, {"beta2", o.cfg.beta2},
           {"epsilon", o.cfg.epsilon}};
    if (o.kind == OptimizerKind::mirror_descent) {
        j["mirror"] = o.mirror.label();
        j["gamma"] = o.mirror.gamma();
    }
    return j;
}

struct ExperimentConfig {
    ExperimentKind experiment = ExperimentKind::implicit_bias_toy;
    std::vector<std::uint64_t> seeds;
    std::filesystem::path output_dir;
    json settings; // defaults merged with the user's file
};

// Merges `user` over the experiment defaults and validates the shared fields.
inline ExperimentConfig parse_config(const json& user) {
    if (!user.is_object()) throw config_error("config: expected a JSON object");
    ExperimentConfig c;
    c.experiment = parse_experiment_kind(cfg::str(user, "experiment", "config"));
    json merged = default_config(c.experiment);
    for (auto it = user.begin(); it != user.end(); ++it) {
        if (!merged.contains(it.key())) throw config_error("config." + it.key() + ": unknown field");
        // Objects merge one level deep; optimizer tables are replaced wholesale.
        if (it.value().is_object() && merged[it.key()].is_object() && it.key() != "optimizers")
            for (auto jt = it.value().begin(); jt != it.value().end(); ++jt) merged[it.key()][jt.key()] = jt.value();
        else
            merged[it.key()] = it.value();
    }
    const json& seeds = merged["seeds"];
    if (!seeds.is_array() || seeds.empty()) throw config_error("config.seeds: expected a nonempty integer list");
    for (const auto& s : seeds) {
        if (!s.is_number_integer() || s.get<long long>() < 0)
            throw config_error("config.seeds: entries must be nonnegative integers");
        c.seeds.push_back(s.get<std::uint64_t>());
    }
    if (!merged["output_dir"].is_string()) throw config_error("config.output_dir: expected a string");
    c.output_dir = merged["output_dir"].get<std::string>();
    c.settings = merged;
    return c;
}

inline json config_to_json(const ExperimentConfig& c) {
    json j = c.settings;
    j["seeds"] = c.seeds;
    j["output_dir"] = c.output_dir.string();
    return j;
}

// --------------------------------------------------------------- runtime ----

struct Assertion {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct ExperimentOutput {
    std::map<std::string, std::string> files; // relative path -> bytes
    json summary;
    std::vector<Assertion> assertions;

    bool all_pass() const {
        return std::all_of(assertions.begin(), assertions.end(), [](const Assertion& a) { return a.pass; });
    }
};

// Runs fn(i) for i in [0, n) on up to `jobs` threads; results keep index order.
template <class R>
std::vector<R> parallel_map(std::size_t jobs, std::size_t n, const std::function<R(std::size_t)>& fn) {
    std::vector<R> out(n);
    jobs = std::max<std::size_t>(1, std::min(jobs, n));
    if (jobs == 1) {
        for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
        return out;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex mu;
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < jobs; ++t)
        pool.emplace_back([&] {
            for (std::size_t i; (i = next++) < n;) {
                try {
                    out[i] = fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lk(mu);
                    if (!err) err = std::current_exception();
                }
            }
        });
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
    return out;
}

inline json mean_var(const std::vector<double>& v) {
    double m = v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / v.size();
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return {{"mean", m}, {"variance", v.size() > 1 ? s / (v.size() - 1) : 0.0}, {"values", v}};
}

// ------------------------------------------------------ implicit-bias toy ----

struct ToyRun {
    Vec theta;
    double loss = 0.0;
    double log_loss = 0.0;
    SupportMetrics metrics;
    std::vector<std::pair<std::size_t, double>> curve; // (iteration, log loss)
};

// -0.1 sign(grad L(0)): every optimizer starts in the orthant the gradient points to.
inline Vec toy_init(const SparseTeacherDataset& ds, double scale) {
    Model lin = make_model(ModelKind::linear, ds.D);
    LossGrad lg = exp_loss_and_grad(lin, ds, Vec(ds.D, 0.0));
    Vec t(ds.D);
    for (std::size_t j = 0; j < ds.D; ++j) t[j] = lg.grad[j] > 0.0 ? -scale : scale;
    return t;
}

inline ToyRun run_toy(const SparseTeacherDataset& ds, const NamedOptimizer& o, std::size_t T, double init_scale,
                      std::size_t record_every) {
    Model lin = make_model(ModelKind::linear, ds.D);
    Optimizer opt(o.kind, o.cfg, ds.D, o.mirror);
    Vec theta = toy_init(ds, init_scale);
    ToyRun r;
    for (std::size_t k = 0; k < T; ++k) {
        LossGrad lg = exp_loss_and_grad(lin, ds, theta);
        if (record_every && k % record_every == 0) r.curve.emplace_back(k, lg.log_loss);
        theta = opt.step(theta, lg.grad);
    }
    LossGrad lg = exp_loss_and_grad(lin, ds, theta);
    r.curve.emplace_back(T, lg.log_loss);
    r.loss = lg.loss;
    r.log_loss = lg.log_loss;
    r.metrics = support_recovery_metrics(theta, ds.teacher);
    r.theta = std::move(theta);
    return r;
}

struct ToySeedResult {
    std::uint64_t seed = 0;
    std::vector<ToyRun> runs; // in optimizer order
};

inline ExperimentOutput run_implicit_bias_toy(const ExperimentConfig& c, std::size_t jobs) {
    const json& s = c.settings;
    const std::size_t D = cfg::count(s["problem"], "D", "problem");
    const std::size_t N = cfg::count(s["problem"], "N", "problem");
    const std::size_t s_star = cfg::count(s["problem"], "s_star", "problem");
    if (s_star > D) throw config_error("problem.s_star: must not exceed D");
    const std::size_t T = cfg::count(s, "T", "config");
    const std::size_t rec = cfg::count(s, "record_every", "config", 0);
    const double init_scale = cfg::positive(s, "init_scale", "config");
    std::vector<NamedOptimizer> opts;
    for (auto it = s["optimizers"].begin(); it != s["optimizers"].end(); ++it)
        opts.push_back(parse_optimizer(it.key(), it.value(), "optimizers." + it.key()));
    if (opts.empty()) throw config_error("optimizers: at least one optimizer required");

    auto results = parallel_map<ToySeedResult>(jobs, c.seeds.size(), [&](std::size_t i) {
        ToySeedResult r;
        r.seed = c.seeds[i];
        auto ds = make_sparse_teacher(D, N, s_star, r.seed);
        for (const auto& o : opts) r.runs.push_back(run_toy(ds, o, T, init_scale, rec));
        return r;
    });

    ExperimentOutput out;
    json per_opt = json::object();
    for (std::size_t k = 0; k < opts.size(); ++k) {
        std::vector<double> quiet, sat, top, loss, logl;
        for (const auto& r : results) {
            const auto& m = r.runs[k].metrics;
            quiet.push_back(m.spurious_quiet);
            sat.push_back(m.saturation);
            top.push_back(m.top_k_hit ? 1.0 : 0.0);
            loss.push_back(r.runs[k].loss);
            logl.push_back(r.runs[k].log_loss);
        }
        per_opt[opts[k].name] = {{"optimizer", optimizer_json(opts[k])},
                                 {"spurious_quiet", mean_var(quiet)},
                                 {"saturation", mean_var(sat)},
                                 {"top_k_hit", mean_var(top)},
                                 {"final_loss", mean_var(loss)},
                                 {"final_log_loss", mean_var(logl)}};
    }
    for (const auto& r : results) {
        auto ds = make_sparse_teacher(D, N, s_star, r.seed);
        std::vector<std::string> header{"coord", "teacher"};
        for (const auto& o : opts) header.push_back(o.name);
        CsvWriter prof(header);
        for (std::size_t j = 0; j < D; ++j) {
            Vec row{static_cast<double>(j), ds.teacher[j]};
            for (const auto& run : r.runs) {
                double mx = norm_inf(run.theta);
                row.push_back(mx > 0 ? run.theta[j] / mx : 0.0);
            }
            prof.row(row);
        }
        out.files["profile_seed" + std::to_string(r.seed) + ".csv"] = prof.str();
        std::vector<std::string> lh{"iteration"};
        for (const auto& o : opts) lh.push_back(o.name + "_log_loss");
        CsvWriter lc(lh);
        for (std::size_t t = 0; t < r.runs.front().curve.size(); ++t) {
            Vec row{static_cast<double>(r.runs.front().curve[t].first)};
            for (const auto& run : r.runs) row.push_back(run.curve[t].second);
            lc.row(row);
        }
        out.files["loss_seed" + std::to_string(r.seed) + ".csv"] = lc.str();
    }
    // Seed-averaged profiles with variance bands.
    {
        std::vector<std::string> header{"coord"};
        for (const auto& o : opts) {
            header.push_back(o.name + "_mean");
            header.push_back(o.name + "_var");
        }
        CsvWriter w(header);
        for (std::size_t j = 0; j < D; ++j) {
            Vec row{static_cast<double>(j)};
            for (std::size_t k = 0; k < opts.size(); ++k) {
                std::vector<double> v;
                for (const auto& r : results) {
                    double mx = norm_inf(r.runs[k].theta);
                    v.push_back(mx > 0 ? r.runs[k].theta[j] / mx : 0.0);
                }
                json mv = mean_var(v);
                row.push_back(mv["mean"].get<double>());
                row.push_back(mv["variance"].get<double>());
            }
            w.row(row);
        }
        out.files["profile_mean.csv"] = w.str();
    }
    out.summary = {{"optimizers", per_opt}};

    // Assertions, when the named optimizers are present.
    auto idx = [&](const std::string& n) -> int {
        for (std::size_t k = 0; k < opts.size(); ++k)
            if (opts[k].name == n) return static_cast<int>(k);
        return -1;
    };
    const double q_thr = cfg::num(s["thresholds"], "exp_adam_quiet", "thresholds");
    const double s_thr = cfg::num(s["thresholds"], "adam_saturation", "thresholds");
    int ea = idx("exp_adam"), ad = idx("adam"), ae = idx("adam_exp"), ch = idx("cosh"), sg = idx("signsgd");
    auto per_seed = [&](int k, auto pred, const std::string& what) {
        Assertion a{what, true, ""};
        for (const auto& r : results) {
            bool ok = pred(r);
            a.pass = a.pass && ok;
            a.detail += "seed " + std::to_string(r.seed) + ": " + (ok ? "ok" : "FAIL") + "; ";
        }
        (void)k;
        return a;
    };
    if (ea >= 0) {
        out.assertions.push_back(per_seed(ea, [&](const ToySeedResult& r) { return r.runs[ea].metrics.top_k_hit; },
                                          "exp_adam ranks the teacher coordinates top-k"));
        Assertion a = per_seed(ea, [&](const ToySeedResult& r) { return r.runs[ea].metrics.spurious_quiet >= q_thr; },
                               "exp_adam spurious-quiet fraction >= " + fmt_num(q_thr));
        for (const auto& r : results) a.detail += fmt_num(r.runs[ea].metrics.spurious_quiet) + " ";
        out.assertions.push_back(a);
    }
    if (ad >= 0) {
        Assertion a = per_seed(ad, [&](const ToySeedResult& r) { return r.runs[ad].metrics.saturation >= s_thr; },
                               "adam saturation fraction >= " + fmt_num(s_thr));
        for (const auto& r : results) a.detail += fmt_num(r.runs[ad].metrics.saturation) + " ";
        out.assertions.push_back(a);
    }
    if (ea >= 0 && ae >= 0)
        out.assertions.push_back(per_seed(
            ea, [&](const ToySeedResult& r) { return r.runs[ea].metrics.spurious_quiet > r.runs[ae].metrics.spurious_quiet; },
            "exp_adam spurious-quiet > adam_exp spurious-quiet"));
    if (ch >= 0 && sg >= 0)
        out.assertions.push_back(per_seed(
            ch, [&](const ToySeedResult& r) { return r.runs[ch].log_loss > r.runs[sg].log_loss; },
            "cosh final loss > signsgd final loss"));
    return out;
}

// ---------------------------------------------------------- flow convergence -----

inline Vec orthant_init(const Vec& theta_star, double scale) {
    Vec t(theta_star.size());
    for (std::size_t j = 0; j < t.size(); ++j) t[j] = theta_star[j] < 0.0 ? -scale : scale;
    return t;
}

struct FlowInstanceResult {
    std::uint64_t seed = 0;
    KKTCertificate cert;
    std::vector<double> p;
    std::vector<FlowTrajectory> traj;
    std::vector<double> ratio;
    double max_pairwise = 0.0;
};

inline FlowConfig parse_flow_config(const json& f) {
    FlowConfig fc;
    std::string tp = cfg::str(f, "time_parameterization", "flow");
    if (tp == "normalized") fc.time_parameterization = TimeParameterization::normalized;
    else if (tp == "rescaled") fc.time_parameterization = TimeParameterization::rescaled;
    else throw config_error("flow.time_parameterization: expected normalized or rescaled");
    fc.step_size = cfg::positive(f, "step_size", "flow");
    fc.stop_margin = cfg::positive(f, "stop_margin", "flow");
    fc.kappa = cfg::num(f, "kappa", "flow");
    return fc;
}

inline FlowInstanceResult run_flow_instance(const MarginProblem& prob, std::uint64_t seed, const std::vector<double>& ps,
                                            FlowConfig fc, double init_scale) {
    FlowInstanceResult r;
    r.seed = seed;
    r.cert = l1_max_margin(prob);
    Vec th0 = orthant_init(r.cert.theta_star, init_scale);
    for (double p : ps) {
        fc.p = p;
        r.p.push_back(p);
        r.traj.push_back(integrate_steepest_mirror(prob, fc, th0));
        r.ratio.push_back(endpoint_objective_ratio(prob, r.traj.back().theta, r.cert));
    }
    for (std::size_t a = 0; a < r.traj.size(); ++a)
        for (std::size_t b = a + 1; b < r.traj.size(); ++b)
            r.max_pairwise = std::max(r.max_pairwise,
                                      norm_inf(sub(r.traj[a].final_direction(), r.traj[b].final_direction())));
    return r;
}

inline ExperimentOutput run_flow_convergence(const ExperimentConfig& c, std::size_t jobs) {
    const json& s = c.settings;
    const std::size_t n = cfg::count(s["problem"], "n", "problem");
    const std::size_t K = cfg::count(s["problem"], "K", "problem");
    std::vector<double> ps;
    if (!s["p"].is_array() || s["p"].empty()) throw config_error("config.p: expected a nonempty list");
    for (const auto& p : s["p"]) {
        if (!p.is_number() || p.get<double>() < 2.0) throw config_error("config.p: entries must be numbers >= 2");
        ps.push_back(p.get<double>());
    }
    FlowConfig fc = parse_flow_config(s["flow"]);
    const double init_scale = cfg::positive(s["flow"], "init_scale", "flow");
    const double tol_obj = cfg::positive(s["tolerance"], "objective", "tolerance");
    const double tol_dir = cfg::positive(s["tolerance"], "direction", "tolerance");

    auto results = parallel_map<FlowInstanceResult>(jobs, c.seeds.size(), [&](std::size_t i) {
        return run_flow_instance(make_margin_instance(n, K, c.seeds[i]), c.seeds[i], ps, fc, init_scale);
    });

    ExperimentOutput out;
    CsvWriter align({"seed", "p", "objective_ratio", "oracle_objective", "dist_to_oracle_direction",
                     "cauchy_last_two", "steps", "rejected", "final_min_margin"});
    Assertion obj{"endpoint L1 norm within " + fmt_num(tol_obj) + " of the oracle objective", true, ""};
    Assertion dir{"endpoint directions agree across p within " + fmt_num(tol_dir), true, ""};
    json inst = json::array();
    for (const auto& r : results) {
        Vec od = l1_direction(r.cert.theta_star);
        for (std::size_t k = 0; k < r.p.size(); ++k) {
            const auto& tr = r.traj[k];
            double cauchy = tr.checkpoints.size() >= 2
                                ? norm_inf(sub(tr.checkpoints.back().direction,
                                               tr.checkpoints[tr.checkpoints.size() - 2].direction))
                                : 0.0;
            align.row(Vec{static_cast<double>(r.seed), r.p[k], r.ratio[k], r.cert.objective,
                          norm_inf(sub(tr.final_direction(), od)), cauchy, static_cast<double>(tr.steps),
                          static_cast<double>(tr.rejected), tr.checkpoints.back().min_margin});
            std::ostringstream os;
            write_trajectory_csv(os, tr);
            out.files["trajectory_seed" + std::to_string(r.seed) + "_p" + fmt_num(r.p[k]) + ".csv"] = os.str();
            if (std::abs(r.ratio[k] - 1.0) > tol_obj) {
                obj.pass = false;
                obj.detail += "seed " + std::to_string(r.seed) + " p=" + fmt_num(r.p[k]) + " ratio " +
                              fmt_num(r.ratio[k]) + "; ";
            }
        }
        if (r.max_pairwise > tol_dir) {
            dir.pass = false;
            dir.detail += "seed " + std::to_string(r.seed) + " spread " + fmt_num(r.max_pairwise) + "; ";
        }
        inst.push_back({{"seed", r.seed}, {"oracle_objective", r.cert.objective}, {"oracle_theta", r.cert.theta_star},
                        {"dual_feasible", r.cert.dual_feasible}, {"unique", r.cert.unique},
                        {"slack_gap", std::isfinite(r.cert.slack_gap) ? json(r.cert.slack_gap) : json(nullptr)},
                        {"min_active_dual", r.cert.min_active_dual}, {"objective_ratio", r.ratio},
                        {"max_pairwise_direction_gap", r.max_pairwise}});
    }
    out.files["alignment.csv"] = align.str();
    out.assertions = {obj, dir};
    out.summary = {{"instances", inst}};
    return out;
}

// ------------------------------------------------------- two-layer runs ----

inline TwoLayerTaskConfig parse_task_config(const json& t) {
    TwoLayerTaskConfig c;
    c.D = cfg::count(t, "D", "task");
    c.N = cfg::count(t, "N", "task");
    c.N_val = cfg::count(t, "N_val", "task");
    c.classes = static_cast<int>(cfg::count(t, "classes", "task", 2));
    c.hidden = cfg::count(t, "hidden", "task");
    c.informative = cfg::count(t, "informative", "task");
    c.separation = cfg::positive(t, "separation", "task");
    c.noise_std = cfg::num_or(t, "noise_std", "task", 1.0);
    if (c.informative > c.D) throw config_error("task.informative: must not exceed task.D");
    if (c.informative < 63 && (std::size_t{1} << c.informative) < static_cast<std::size_t>(c.classes))
        throw config_error("task.informative: too few informative inputs for task.classes");
    return c;
}

inline std::vector<NamedOptimizer> parse_optimizers(const json& s) {
    const json& o = cfg::at(s, "optimizers", "config");
    if (!o.is_object() || o.empty()) throw config_error("config.optimizers: expected a nonempty object");
    std::vector<NamedOptimizer> v;
    for (auto it = o.begin(); it != o.end(); ++it)
        v.push_back(parse_optimizer(it.key(), it.value(), "optimizers." + it.key()));
    return v;
}

inline Vec weight_tensors(const ParamVector& p) {
    Vec w;
    for (const char* n : {"W1", "W2"}) {
        const Segment& s = p.segment(n);
        w.insert(w.end(), p.values().begin() + static_cast<std::ptrdiff_t>(s.start),
                 p.values().begin() + static_cast<std::ptrdiff_t>(s.start + s.length));
    }
    return w;
}

inline std::string history_csv(const std::vector<StepRecord>& h, const AcdcSchedule* sched = nullptr) {
    std::vector<std::string> header{"iteration"};
    if (sched) header.push_back("sparse");
    for (const char* c : {"loss", "grad_l1", "grad_l2", "grad_linf", "update_l1", "update_l2", "update_linf"})
        header.push_back(c);
    CsvWriter w(header);
    for (const auto& r : h) {
        Vec row{static_cast<double>(r.iteration)};
        if (sched) row.push_back(sched->phase_at(r.iteration) == Phase::sparse ? 1.0 : 0.0);
        for (double v : {r.loss, r.grad_norms.l1, r.grad_norms.l2, r.grad_norms.linf, r.update_norms.l1,
                         r.update_norms.l2, r.update_norms.linf})
            row.push_back(v);
        w.row(row);
    }
    return w.str();
}

struct TwoLayerSetup {
    TwoLayerTaskConfig task;
    std::vector<NamedOptimizer> opts;
    std::size_t steps = 0;
    std::size_t record_every = 0;

    TrainSettings settings(const NamedOptimizer& o) const {
        TrainSettings ts;
        ts.kind = o.kind;
        ts.cfg = o.cfg;
        ts.steps = steps;
        ts.record_every = record_every;
        return ts;
    }
};

inline TwoLayerSetup parse_two_layer(const json& s) {
    TwoLayerSetup st;
    st.task = parse_task_config(cfg::at(s, "task", "config"));
    st.opts = parse_optimizers(s);
    st.steps = cfg::count(s, "steps", "config");
    st.record_every = cfg::count(s, "record_every", "config", 0);
    for (const auto& o : st.opts)
        if (o.kind != OptimizerKind::adamw && o.kind != OptimizerKind::horst && o.kind != OptimizerKind::ham)
            throw config_error("optimizers." + o.name + ".kind: two-layer experiments take adamw, horst or ham");
    return st;
}

inline int find_optimizer(const std::vector<NamedOptimizer>& opts, const std::string& name) {
    for (std::size_t k = 0; k < opts.size(); ++k)
        if (opts[k].name == name) return static_cast<int>(k);
    return -1;
}

// Runs fn(seed index, optimizer index) over the full grid; results are ordered seed-major.
template <class R>
std::vector<std::vector<R>> seed_optimizer_grid(std::size_t jobs, std::size_t n_seeds, std::size_t n_opts,
                                                const std::function<R(std::size_t, std::size_t)>& fn) {
    auto flat = parallel_map<R>(jobs, n_seeds * n_opts,
                                [&](std::size_t i) { return fn(i / n_opts, i % n_opts); });
    std::vector<std::vector<R>> out(n_seeds);
    for (std::size_t i = 0; i < flat.size(); ++i) out[i / n_opts].push_back(std::move(flat[i]));
    return out;
}

struct AcdcRun {
    AcdcResult res;
    double val_accuracy = 0.0;
    double val_loss = 0.0;
};

inline AcdcSchedule parse_acdc_schedule(const json& a, std::size_t steps) {
    const double sp = cfg::num(a, "sparsity", "acdc");
    if (!(sp >= 0.0) || sp >= 1.0) throw config_error("acdc.sparsity: must lie in [0, 1)");
    const std::size_t pairs = cfg::count(a, "pairs", "acdc");
    const double wf = cfg::positive(a, "warmup_fraction", "acdc");
    const double ff = cfg::positive(a, "final_fraction", "acdc");
    if (wf + ff >= 1.0) throw config_error("acdc.final_fraction: warmup_fraction + final_fraction must be < 1");
    AcdcSchedule sc;
    sc.total_steps = steps;
    sc.sparsity = sp;
    sc.warmup_dense = static_cast<std::size_t>(wf * steps);
    std::size_t final_min = static_cast<std::size_t>(ff * steps);
    if (sc.warmup_dense == 0 || final_min == 0) throw config_error("acdc: steps too small for the phase fractions");
    sc.phase_length = (steps - sc.warmup_dense - final_min) / (2 * pairs);
    if (sc.phase_length == 0) throw config_error("acdc.pairs: too many phases for the step budget");
    sc.final_sparse = steps - sc.warmup_dense - 2 * pairs * sc.phase_length;
    sc.validate();
    return sc;
}

inline ExperimentOutput run_acdc_toy(const ExperimentConfig& c, std::size_t jobs) {
    const json& s = c.settings;
    TwoLayerSetup st = parse_two_layer(s);
    const json& a = cfg::at(s, "acdc", "config");
    AcdcSchedule sched = parse_acdc_schedule(a, st.steps);
    if (!a.contains("exempt_first_last") || !a["exempt_first_last"].is_boolean())
        throw config_error("acdc.exempt_first_last: expected a boolean");
    const auto scope = prune_scope(a["exempt_first_last"].get<bool>());

    auto grid = seed_optimizer_grid<AcdcRun>(jobs, c.seeds.size(), st.opts.size(), [&](std::size_t si, std::size_t oi) {
        auto task = two_layer_task(c.seeds[si], st.task);
        AcdcRun r;
        r.res = acdc_train(task, st.settings(st.opts[oi]), sched, c.seeds[si], scope);
        r.val_loss = task.net.loss_and_grad(r.res.theta.values(), task.val, nullptr, &r.val_accuracy);
        return r;
    });

    ExperimentOutput out;
    CsvWriter fin({"seed", "optimizer", "val_accuracy", "val_loss", "pruning_events", "regrown", "mask_violated",
                   "exact_counts"});
    json per = json::object();
    for (std::size_t k = 0; k < st.opts.size(); ++k) {
        std::vector<double> acc, loss;
        for (std::size_t si = 0; si < c.seeds.size(); ++si) {
            const AcdcRun& r = grid[si][k];
            const std::string tag = st.opts[k].name + "_seed" + std::to_string(c.seeds[si]);
            acc.push_back(r.val_accuracy);
            loss.push_back(r.val_loss);
            fin.row(std::vector<std::string>{std::to_string(c.seeds[si]), st.opts[k].name, fmt_double(r.val_accuracy),
                                             fmt_double(r.val_loss), std::to_string(r.res.pruning_events),
                                             std::to_string(r.res.regrown), r.res.mask_violated ? "1" : "0",
                                             r.res.exact_counts ? "1" : "0"});
            out.files["history_" + tag + ".csv"] = history_csv(r.res.history, &sched);
            out.files["mask_" + tag + ".mask"] = mask_bytes(r.res.mask);
            out.files["mask_" + tag + ".json"] =
                mask_sidecar(r.res.mask, r.res.theta,
                             {{"seed", c.seeds[si]}, {"optimizer", optimizer_json(st.opts[k])}, {"rng", Rng::algorithm}})
                    .dump(2) + "\n";
        }
        per[st.opts[k].name] = {{"optimizer", optimizer_json(st.opts[k])},
                                {"val_accuracy", mean_var(acc)},
                                {"val_loss", mean_var(loss)}};
    }
    out.files["final.csv"] = fin.str();
    out.summary = {{"schedule",
                    {{"total_steps", sched.total_steps}, {"warmup_dense", sched.warmup_dense},
                     {"phase_length", sched.phase_length}, {"pairs", sched.pairs()},
                     {"final_sparse", sched.final_sparse}, {"sparsity", sched.sparsity}, {"scope", scope}}},
                   {"optimizers", per}};

    bool clean = true;
    for (const auto& row : grid)
        for (const auto& r : row) clean = clean && !r.res.mask_violated && r.res.exact_counts;
    out.assertions.push_back({"masked weights stay zero in sparse phases; exact per-tensor prune counts", clean, ""});
    int h = find_optimizer(st.opts, "horst"), w = find_optimizer(st.opts, "adamw");
    if (h >= 0 && w >= 0) {
        double mh = per[st.opts[h].name]["val_accuracy"]["mean"].get<double>();
        double mw = per[st.opts[w].name]["val_accuracy"]["mean"].get<double>();
        out.assertions.push_back({"AC/DC mean accuracy: horst >= adamw", mh >= mw,
                                  "horst " + fmt_num(mh) + " vs adamw " + fmt_num(mw)});
    }
    return out;
}

struct DenseRun {
    ParamVector theta;
    std::vector<StepRecord> history;
    TrainStats stats;
    std::vector<PrunePoint> curve;
    WeightDistribution weights;
    double val_accuracy = 0.0;
    double val_loss = 0.0;
};

inline DenseRun run_dense(const TwoLayerSetup& st, std::size_t oi, std::uint64_t seed, const std::vector<double>& grid,
                          std::size_t bins) {
    auto task = two_layer_task(seed, st.task);
    DenseRun r;
    r.theta = dense_train(task, st.settings(st.opts[oi]), seed, &r.history, &r.stats);
    r.val_loss = task.net.loss_and_grad(r.theta.values(), task.val, nullptr, &r.val_accuracy);
    if (!grid.empty()) r.curve = one_shot_prune_eval(r.theta, task.net, task.val, grid);
    r.weights = weight_distribution_report(weight_tensors(r.theta), bins);
    return r;
}

inline std::string histogram_csv(const WeightDistribution& w) {
    CsvWriter h({"bin_lo", "bin_hi", "count"});
    for (std::size_t b = 0; b < w.counts.size(); ++b)
        h.row(Vec{w.edges[b], w.edges[b + 1], static_cast<double>(w.counts[b])});
    return h.str();
}

inline json weights_json(const WeightDistribution& w) {
    return {{"mean", w.mean}, {"stddev", w.stddev}, {"excess_kurtosis", w.excess_kurtosis},
            {"frac_near_zero", w.frac_near_zero}, {"l1_l2_ratio", w.l1_l2_ratio}, {"degenerate", w.degenerate}};
}

inline ExperimentOutput run_one_shot_toy(const ExperimentConfig& c, std::size_t jobs) {
    const json& s = c.settings;
    TwoLayerSetup st = parse_two_layer(s);
    std::vector<double> grid;
    if (!s["grid"].is_array() || s["grid"].empty()) throw config_error("config.grid: expected a nonempty list");
    for (const auto& v : s["grid"]) {
        if (!v.is_number() || v.get<double>() < 0.0 || v.get<double>() >= 1.0)
            throw config_error("config.grid: entries must lie in [0, 1)");
        grid.push_back(v.get<double>());
    }
    const double s_chk = cfg::num(s, "check_sparsity", "config");
    auto gi = std::find(grid.begin(), grid.end(), s_chk);
    if (gi == grid.end()) throw config_error("config.check_sparsity: must be one of config.grid");
    const std::size_t ci = static_cast<std::size_t>(gi - grid.begin());
    const std::size_t bins = cfg::count(s, "histogram_bins", "config");

    auto runs = seed_optimizer_grid<DenseRun>(jobs, c.seeds.size(), st.opts.size(), [&](std::size_t si, std::size_t oi) {
        return run_dense(st, oi, c.seeds[si], grid, bins);
    });

    ExperimentOutput out;
    json per = json::object();
    for (std::size_t k = 0; k < st.opts.size(); ++k) {
        std::vector<double> lchk, nz, kurt;
        for (std::size_t si = 0; si < c.seeds.size(); ++si) {
            const DenseRun& r = runs[si][k];
            const std::string tag = st.opts[k].name + "_seed" + std::to_string(c.seeds[si]);
            CsvWriter cw({"sparsity", "val_loss", "val_accuracy"});
            for (const auto& p : r.curve) cw.row(Vec{p.sparsity, p.loss, p.accuracy});
            out.files["prune_curve_" + tag + ".csv"] = cw.str();
            out.files["histogram_" + tag + ".csv"] = histogram_csv(r.weights);
            out.files["history_" + tag + ".csv"] = history_csv(r.history);
            out.files["checkpoint_" + tag + ".bin"] = checkpoint_bytes(r.theta);
            out.files["checkpoint_" + tag + ".json"] =
                checkpoint_sidecar(r.theta, {{"seed", c.seeds[si]},
                                             {"optimizer", optimizer_json(st.opts[k])},
                                             {"schedule", to_string(st.opts[k].cfg.schedule)},
                                             {"steps", st.steps},
                                             {"rng", Rng::algorithm}})
                    .dump(2) + "\n";
            lchk.push_back(r.curve[ci].loss);
            nz.push_back(r.weights.frac_near_zero);
            kurt.push_back(r.weights.excess_kurtosis);
        }
        per[st.opts[k].name] = {{"optimizer", optimizer_json(st.opts[k])},
                                {"loss_at_check_sparsity", mean_var(lchk)},
                                {"frac_near_zero", mean_var(nz)},
                                {"excess_kurtosis", mean_var(kurt)}};
    }
    out.summary = {{"grid", grid}, {"check_sparsity", s_chk}, {"optimizers", per}};
    int h = find_optimizer(st.opts, "horst"), w = find_optimizer(st.opts, "adamw");
    if (h >= 0 && w >= 0) {
        double lh = per[st.opts[h].name]["loss_at_check_sparsity"]["mean"].get<double>();
        double lw = per[st.opts[w].name]["loss_at_check_sparsity"]["mean"].get<double>();
        out.assertions.push_back({"one-shot mean loss at s=" + fmt_num(s_chk) + ": horst < adamw", lh < lw,
                                  "horst " + fmt_num(lh) + " vs adamw " + fmt_num(lw)});
        Assertion nz{"frac_near_zero: horst > adamw on every seed", true, ""};
        for (std::size_t si = 0; si < c.seeds.size(); ++si) {
            double a = runs[si][h].weights.frac_near_zero, b = runs[si][w].weights.frac_near_zero;
            nz.pass = nz.pass && a > b;
            nz.detail += "seed " + std::to_string(c.seeds[si]) + ": " + fmt_num(a) + " vs " + fmt_num(b) + "; ";
        }
        out.assertions.push_back(nz);
    }
    return out;
}

inline ExperimentOutput run_ham_vs_horst_toy(const ExperimentConfig& c, std::size_t jobs) {
    TwoLayerSetup st = parse_two_layer(c.settings);
    auto runs = seed_optimizer_grid<DenseRun>(jobs, c.seeds.size(), st.opts.size(), [&](std::size_t si, std::size_t oi) {
        return run_dense(st, oi, c.seeds[si], {}, 41);
    });
    ExperimentOutput out;
    CsvWriter fin({"seed", "optimizer", "val_accuracy", "val_loss", "frac_near_zero", "excess_kurtosis", "sign_flips",
                   "clamped"});
    json per = json::object();
    for (std::size_t k = 0; k < st.opts.size(); ++k) {
        std::vector<double> acc, loss, nz;
        for (std::size_t si = 0; si < c.seeds.size(); ++si) {
            const DenseRun& r = runs[si][k];
            out.files["history_" + st.opts[k].name + "_seed" + std::to_string(c.seeds[si]) + ".csv"] =
                history_csv(r.history);
            fin.row(std::vector<std::string>{std::to_string(c.seeds[si]), st.opts[k].name, fmt_double(r.val_accuracy),
                                             fmt_double(r.val_loss), fmt_double(r.weights.frac_near_zero),
                                             fmt_double(r.weights.excess_kurtosis), std::to_string(r.stats.sign_flips),
                                             std::to_string(r.stats.clamped)});
            acc.push_back(r.val_accuracy);
            loss.push_back(r.val_loss);
            nz.push_back(r.weights.frac_near_zero);
        }
        per[st.opts[k].name] = {{"optimizer", optimizer_json(st.opts[k])},
                                {"val_accuracy", mean_var(acc)},
                                {"val_loss", mean_var(loss)},
                                {"frac_near_zero", mean_var(nz)}};
    }
    out.files["final.csv"] = fin.str();
    out.summary = {{"optimizers", per}};
    return out;
}

// --------------------------------------------------- operator properties ----

inline ExperimentOutput run_operator_properties(const ExperimentConfig& c, std::size_t jobs) {
    const std::size_t samples = cfg::count(c.settings, "samples", "config");
    const std::size_t dim = cfg::count(c.settings, "dimension", "config", 3);
    auto tables = parallel_map<std::vector<PropertyRow>>(
        jobs, c.seeds.size(), [&](std::size_t i) { return operator_algebra_properties(c.seeds[i], samples, dim); });
    ExperimentOutput out;
    for (std::size_t i = 0; i < c.seeds.size(); ++i) {
        CsvWriter w({"property", "pass", "value", "threshold", "detail"});
        for (const auto& r : tables[i]) {
            w.row(std::vector<std::string>{"\"" + r.name + "\"", r.pass ? "1" : "0", fmt_double(r.value),
                                           fmt_double(r.threshold), "\"" + r.detail + "\""});
            if (i == 0) out.assertions.push_back({r.name, r.pass, fmt_double(r.value)});
            else if (!r.pass) out.assertions.push_back({r.name + " (seed " + std::to_string(c.seeds[i]) + ")", false, fmt_double(r.value)});
        }
        out.files["properties_seed" + std::to_string(c.seeds[i]) + ".csv"] = w.str();
    }
    std::size_t passed = 0, total = 0;
    for (const auto& t : tables)
        for (const auto& r : t) {
            ++total;
            passed += r.pass;
        }
    out.summary = {{"passed", passed}, {"total", total}};
    return out;
}

// ------------------------------------------------------------ dispatcher ----

inline ExperimentOutput run_experiment(const ExperimentConfig& c, std::size_t jobs = 1) {
    ExperimentOutput out;
    switch (c.experiment) {
    case ExperimentKind::implicit_bias_toy: out = run_implicit_bias_toy(c, jobs); break;
    case ExperimentKind::flow_convergence: out = run_flow_convergence(c, jobs); break;
    case ExperimentKind::operator_properties: out = run_operator_properties(c, jobs); break;
    case ExperimentKind::acdc_toy: out = run_acdc_toy(c, jobs); break;
    case ExperimentKind::one_shot_toy: out = run_one_shot_toy(c, jobs); break;
    case ExperimentKind::ham_vs_horst_toy: out = run_ham_vs_horst_toy(c, jobs); break;
    }
    json meta{{"experiment", to_string(c.experiment)},
              {"reproduces", reproduces(c.experiment)},
              {"rng", Rng::algorithm},
              {"seeds", c.seeds},
              {"config", config_to_json(c)}};
    json asserts = json::array();
    for (const auto& a : out.assertions) asserts.push_back({{"name", a.name}, {"pass", a.pass}, {"detail", a.detail}});
    meta["assertions"] = asserts;
    meta["results"] = out.summary;
    out.summary = meta;
    out.files["summary.json"] = meta.dump(2) + "\n";
    return out;
}

// Writes every output file under `dir`, creating it if needed.
inline void write_outputs(const std::filesystem::path& dir, const ExperimentOutput& out) {
    std::filesystem::create_directories(dir);
    for (const auto& [name, bytes] : out.files) write_text(dir / name, bytes);
}

} // namespace horst
