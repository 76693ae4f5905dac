#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "horst/core.hpp"
#include "horst/optim.hpp"
#include "horst/problems.hpp"

namespace horst {

struct MaskEvent {
    std::size_t iteration = 0;
    std::string rule = "magnitude";
};

struct SparsityMask {
    std::vector<std::uint8_t> bits; // 1 keeps, 0 prunes
    double target_sparsity = 0.0;
    std::vector<std::string> scope;
    MaskEvent event;

    std::size_t zeros() const {
        return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), std::uint8_t{0}));
    }
};

inline std::vector<std::string> all_segments(const ParamVector& theta) {
    std::vector<std::string> all;
    for (const auto& s : theta.segments()) all.push_back(s.name);
    return all;
}

// Weight tensors of the two-layer net; the flag drops the first and last layer.
inline std::vector<std::string> prune_scope(bool exempt_first_last = false) {
    if (exempt_first_last) return {};
    return {"W1", "W2"};
}

// Per covered segment, zero the floor(s * len) smallest |theta| entries (ties: lowest index).
inline SparsityMask magnitude_prune(const ParamVector& theta, double s,
                                    const std::vector<std::string>& scope,
                                    std::size_t iteration = 0) {
    if (!(s >= 0.0) || s >= 1.0) throw argument_error("magnitude_prune: need 0 <= s < 1");
    SparsityMask m;
    m.bits.assign(theta.size(), 1);
    m.target_sparsity = s;
    for (const auto& name : scope) (void)theta.segment(name);
    m.scope = scope;
    m.event = {iteration, "magnitude_per_segment"};
    const Vec& v = theta.values();
    for (const auto& name : m.scope) {
        const Segment& seg = theta.segment(name);
        const auto k = static_cast<std::size_t>(std::floor(s * static_cast<double>(seg.length)));
        if (k == 0) continue;
        std::vector<std::size_t> idx(seg.length);
        std::iota(idx.begin(), idx.end(), seg.start);
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            return std::abs(v[a]) < std::abs(v[b]);
        });
        for (std::size_t r = 0; r < k; ++r) m.bits[idx[r]] = 0;
    }
    return m;
}

// theta * mask. When `state` is given, Adam moments of coordinates the mask newly
// removes (nonzero before, masked now) are reset.
inline ParamVector apply_mask(const ParamVector& theta, const SparsityMask& mask,
                              AdamState* state = nullptr) {
    if (mask.bits.size() != theta.size()) throw dimension_error("apply_mask: mask length");
    ParamVector out = theta;
    std::vector<std::uint8_t> fresh(theta.size(), 0);
    for (std::size_t i = 0; i < theta.size(); ++i)
        if (!mask.bits[i]) {
            fresh[i] = 1;
            out[i] = 0.0;
        }
    if (state) state->reset(fresh);
    return out;
}

inline double segment_sparsity(const ParamVector& theta, const std::string& name) {
    const Segment& s = theta.segment(name);
    std::size_t z = 0;
    for (std::size_t i = s.start; i < s.start + s.length; ++i) z += theta[i] == 0.0;
    return s.length ? static_cast<double>(z) / s.length : 0.0;
}

enum class Phase { dense, sparse };

// warmup_dense + pairs * 2 * phase_length + final_sparse == total_steps.
// After the dense warmup, each pair is a sparse phase followed by a dense phase.
struct AcdcSchedule {
    std::size_t total_steps = 0;
    std::size_t warmup_dense = 0;
    std::size_t phase_length = 0;
    std::size_t final_sparse = 0;
    double sparsity = 0.0;

    static AcdcSchedule make_default(std::size_t total, double s, std::size_t pairs = 5) {
        AcdcSchedule a;
        a.total_steps = total;
        a.sparsity = s;
        a.warmup_dense = total / 10;
        a.final_sparse = total / 5;
        a.phase_length = (total - a.warmup_dense - a.final_sparse) / (2 * pairs);
        a.final_sparse = total - a.warmup_dense - 2 * pairs * a.phase_length;
        return a;
    }

    std::size_t pairs() const {
        std::size_t mid = total_steps - warmup_dense - final_sparse;
        return phase_length ? mid / (2 * phase_length) : 0;
    }

    void validate() const {
        if (!(sparsity >= 0.0) || sparsity >= 1.0) throw config_error("acdc.sparsity must be in [0, 1)");
        if (phase_length == 0) throw config_error("acdc.phase_length must be positive");
        if (warmup_dense == 0) throw config_error("acdc schedule must begin dense");
        if (final_sparse == 0) throw config_error("acdc schedule must end sparse");
        if (warmup_dense + final_sparse > total_steps)
            throw config_error("acdc warmup + final_sparse exceed total_steps");
        std::size_t mid = total_steps - warmup_dense - final_sparse;
        if (mid % (2 * phase_length) != 0 || mid == 0)
            throw config_error("acdc: warmup + k*2*phase_length + final_sparse must equal total_steps, k >= 1");
    }

    Phase phase_at(std::size_t k) const {
        if (k < warmup_dense) return Phase::dense;
        if (k >= total_steps - final_sparse) return Phase::sparse;
        return ((k - warmup_dense) / phase_length) % 2 == 0 ? Phase::sparse : Phase::dense;
    }
};

struct TrainSettings {
    OptimizerKind kind = OptimizerKind::adamw;
    OptimizerConfig cfg;
    std::size_t steps = 2000;
    std::size_t record_every = 100;
};

struct PhaseBoundary {
    std::size_t iteration = 0;
    Phase phase = Phase::dense;
};

struct AcdcResult {
    ParamVector theta;
    SparsityMask mask;
    std::vector<StepRecord> history;
    std::vector<PhaseBoundary> boundaries;
    std::size_t pruning_events = 0;
    std::size_t regrown = 0;           // masked coordinates nonzero at the end of a dense phase
    bool mask_violated = false;        // a masked coordinate was nonzero after a sparse step
    bool exact_counts = true;          // every pruning event hit floor(s * len) per segment
};

inline bool check_prune_counts(const ParamVector& theta, const SparsityMask& m) {
    for (const auto& name : m.scope) {
        const Segment& s = theta.segment(name);
        std::size_t z = 0;
        for (std::size_t i = s.start; i < s.start + s.length; ++i) z += m.bits[i] == 0;
        if (z != static_cast<std::size_t>(std::floor(m.target_sparsity * s.length))) return false;
    }
    return true;
}

// Alternating dense/sparse training. Sparse phases freeze masked coordinates:
// their gradients are zeroed and the mask is re-applied after every step.
inline AcdcResult acdc_train(const TwoLayerTask& task, const TrainSettings& ts,
                             const AcdcSchedule& sched, std::uint64_t seed,
                             const std::vector<std::string>& scope = prune_scope()) {
    sched.validate();
    if (ts.kind != OptimizerKind::adamw && ts.kind != OptimizerKind::horst && ts.kind != OptimizerKind::ham)
        throw config_error("acdc_train: optimizer must be adamw, horst or ham");
    AcdcResult res;
    ParamVector theta = task.net.init(seed);
    OptimizerConfig cfg = ts.cfg;
    if (cfg.total_steps == 0) cfg.total_steps = sched.total_steps;
    cfg.validate();
    Optimizer opt(ts.kind, cfg, theta.size());
    SparsityMask mask;
    mask.bits.assign(theta.size(), 1);
    bool sparse = false;
    std::vector<std::uint8_t> masked_before(theta.size(), 0);
    Vec g;
    for (std::size_t k = 0; k < sched.total_steps; ++k) {
        Phase ph = sched.phase_at(k);
        if (k == 0 || ph != sched.phase_at(k - 1)) {
            res.boundaries.push_back({k, ph});
            if (ph == Phase::sparse) {
                if (sparse == false && k > 0) {
                    for (std::size_t i = 0; i < theta.size(); ++i)
                        if (masked_before[i] && theta[i] != 0.0) ++res.regrown;
                }
                mask = magnitude_prune(theta, sched.sparsity, scope, k);
                if (!check_prune_counts(theta, mask)) res.exact_counts = false;
                ++res.pruning_events;
                theta = apply_mask(theta, mask, &opt.state());
                for (std::size_t i = 0; i < theta.size(); ++i) masked_before[i] = !mask.bits[i];
                sparse = true;
            } else {
                sparse = false;
            }
        }
        double loss = task.net.loss_and_grad(theta.values(), task.train, &g);
        if (sparse)
            for (std::size_t i = 0; i < g.size(); ++i)
                if (!mask.bits[i]) g[i] = 0.0;
        Vec next = opt.step(theta.values(), g);
        if (sparse) {
            for (std::size_t i = 0; i < next.size(); ++i)
                if (!mask.bits[i]) {
                    if (next[i] != 0.0) res.mask_violated = true;
                    next[i] = 0.0;
                }
        }
        if (ts.record_every && (k % ts.record_every == 0 || k + 1 == sched.total_steps)) {
            StepRecord rec;
            rec.iteration = k;
            rec.loss = loss;
            rec.grad_norms = norms_of(g);
            rec.update_norms = norms_of(sub(next, theta.values()));
            res.history.push_back(rec);
        }
        theta.values() = std::move(next);
    }
    res.theta = std::move(theta);
    res.mask = mask;
    return res;
}

struct TrainStats {
    std::size_t sign_flips = 0; // AdamW half steps that crossed zero (HORST / HAM)
    std::size_t clamped = 0;    // exponents hitting the +-50 guard
};

// Plain dense training of the two-layer task.
inline ParamVector dense_train(const TwoLayerTask& task, const TrainSettings& ts, std::uint64_t seed,
                               std::vector<StepRecord>* history = nullptr, TrainStats* stats = nullptr) {
    ParamVector theta = task.net.init(seed);
    OptimizerConfig cfg = ts.cfg;
    if (cfg.total_steps == 0) cfg.total_steps = ts.steps;
    cfg.validate();
    Optimizer opt(ts.kind, cfg, theta.size());
    Vec g;
    for (std::size_t k = 0; k < ts.steps; ++k) {
        double loss = task.net.loss_and_grad(theta.values(), task.train, &g);
        Vec next = opt.step(theta.values(), g);
        if (history && ts.record_every && (k % ts.record_every == 0 || k + 1 == ts.steps)) {
            StepRecord rec;
            rec.iteration = k;
            rec.loss = loss;
            rec.grad_norms = norms_of(g);
            rec.update_norms = norms_of(sub(next, theta.values()));
            history->push_back(rec);
        }
        theta.values() = std::move(next);
    }
    if (stats) *stats = {opt.sign_flips(), opt.guard().clamped};
    return theta;
}

struct PrunePoint {
    double sparsity = 0.0;
    double loss = 0.0;
    double accuracy = 0.0;
};

// One-shot per-segment magnitude pruning without fine-tuning, evaluated on `eval`.
inline std::vector<PrunePoint> one_shot_prune_eval(const ParamVector& dense, const TwoLayerNet& net,
                                                   const MulticlassDataset& eval,
                                                   const std::vector<double>& grid,
                                                   const std::vector<std::string>& scope = prune_scope()) {
    std::vector<PrunePoint> out;
    for (double s : grid) {
        ParamVector p = s == 0.0 ? dense : apply_mask(dense, magnitude_prune(dense, s, scope));
        PrunePoint pt;
        pt.sparsity = s;
        pt.loss = net.loss_and_grad(p.values(), eval, nullptr, &pt.accuracy);
        out.push_back(pt);
    }
    return out;
}

struct WeightDistribution {
    Vec edges;
    std::vector<std::size_t> counts;
    double mean = 0.0, stddev = 0.0;
    double excess_kurtosis = 0.0;
    double frac_near_zero = 0.0; // |(theta - mean) / std| < 0.1
    double l1_l2_ratio = 0.0;
    bool degenerate = false;
};

// Standardized histogram over [-range, range] plus summary statistics.
inline WeightDistribution weight_distribution_report(const Vec& theta, std::size_t bins = 41,
                                                     double range = 5.0) {
    if (theta.empty() || norm2(theta) == 0.0)
        throw argument_error("weight_distribution_report: need ||theta|| > 0");
    WeightDistribution w;
    const double n = static_cast<double>(theta.size());
    w.mean = std::accumulate(theta.begin(), theta.end(), 0.0) / n;
    double m2 = 0.0, m4 = 0.0;
    for (double v : theta) {
        double d = v - w.mean;
        m2 += d * d;
        m4 += d * d * d * d;
    }
    m2 /= n;
    m4 /= n;
    w.stddev = std::sqrt(m2);
    w.l1_l2_ratio = norm1(theta) / norm2(theta);
    Vec z = theta;
    double lo = -range, hi = range;
    if (w.stddev == 0.0) {
        w.degenerate = true;
        lo = *std::min_element(theta.begin(), theta.end()) - 0.5;
        hi = *std::max_element(theta.begin(), theta.end()) + 0.5;
    } else {
        w.excess_kurtosis = m4 / (m2 * m2) - 3.0;
        std::size_t near = 0;
        for (double& v : z) {
            v = (v - w.mean) / w.stddev;
            if (std::abs(v) < 0.1) ++near;
        }
        w.frac_near_zero = near / n;
    }
    w.edges.resize(bins + 1);
    for (std::size_t b = 0; b <= bins; ++b) w.edges[b] = lo + (hi - lo) * b / bins;
    w.counts.assign(bins, 0);
    for (double v : z) {
        double c = std::clamp(v, lo, hi);
        auto b = static_cast<std::size_t>((c - lo) / (hi - lo) * bins);
        w.counts[std::min(b, bins - 1)]++;
    }
    return w;
}

} // namespace horst
