#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "horst/core.hpp"
#include "horst/flows.hpp"
#include "horst/rng.hpp"

namespace horst {

struct SparseTeacherDataset {
    std::vector<Vec> X; // N rows of length D
    Vec y;
    Vec teacher;
    std::size_t D = 0, N = 0, s_star = 0;
    std::uint64_t seed = 0;

    MarginProblem as_margin_problem() const { return {X, y}; }
};

// Standard normal X; teacher on the first s coordinates with |entries| ~ U[0.5, 1.5]
// and random signs; y = sign <teacher, x> (a zero inner product counts as +1).
inline SparseTeacherDataset make_sparse_teacher(std::size_t D, std::size_t N, std::size_t s,
                                                std::uint64_t seed) {
    if (s < 1 || s > D) throw argument_error("make_sparse_teacher: need 1 <= s <= D");
    if (N < 1) throw argument_error("make_sparse_teacher: need N >= 1");
    SparseTeacherDataset ds;
    ds.D = D;
    ds.N = N;
    ds.s_star = s;
    ds.seed = seed;
    Rng rng(seed);
    ds.teacher.assign(D, 0.0);
    for (std::size_t j = 0; j < s; ++j) {
        double mag = rng.uniform(0.5, 1.5);
        ds.teacher[j] = rng.sign() * mag;
    }
    ds.X.assign(N, Vec(D));
    ds.y.assign(N, 1.0);
    for (std::size_t i = 0; i < N; ++i) {
        for (double& v : ds.X[i]) v = rng.normal();
        ds.y[i] = dot(ds.X[i], ds.teacher) < 0.0 ? -1.0 : 1.0;
    }
    return ds;
}

// Small dense-teacher margin instance (n features, K points).
inline MarginProblem make_margin_instance(std::size_t n, std::size_t K, std::uint64_t seed) {
    return make_sparse_teacher(n, K, n, seed).as_margin_problem();
}

enum class ModelKind { linear, diagonal_uv, hadamard_depth_p, two_layer };

inline const char* to_string(ModelKind k) {
    switch (k) {
    case ModelKind::linear: return "linear";
    case ModelKind::diagonal_uv: return "diagonal_uv";
    case ModelKind::hadamard_depth_p: return "hadamard_depth_p";
    case ModelKind::two_layer: return "two_layer";
    }
    return "?";
}

// Linear-in-theta models: theta_eff = params (linear) or the product of `depth` factors.
struct Model {
    ModelKind kind = ModelKind::linear;
    std::size_t D = 0;
    int depth = 1;
    ParamVector parameters;

    Vec effective_theta(const Vec& params) const {
        if (params.size() != D * static_cast<std::size_t>(depth))
            throw dimension_error("Model: parameter length mismatch");
        Vec t(D, 1.0);
        for (int f = 0; f < depth; ++f)
            for (std::size_t j = 0; j < D; ++j) t[j] *= params[f * D + j];
        return t;
    }
};

// Factors start balanced at `init_scale`; the first factor carries sign_pattern when given.
inline Model make_model(ModelKind kind, std::size_t D, int depth = 2, double init_scale = 0.1,
                        const Vec& sign_pattern = {}) {
    Model m;
    m.kind = kind;
    m.D = D;
    if (kind == ModelKind::two_layer)
        throw argument_error("make_model: use two_layer_task for the two-layer network");
    m.depth = kind == ModelKind::linear ? 1 : kind == ModelKind::diagonal_uv ? 2 : depth;
    if (m.depth < 1) throw argument_error("make_model: depth must be >= 1");
    std::vector<Segment> segs;
    Vec v(D * m.depth, init_scale);
    for (int f = 0; f < m.depth; ++f)
        segs.push_back({m.depth == 1 ? "theta" : "w" + std::to_string(f), f * D, D});
    for (std::size_t j = 0; j < sign_pattern.size() && j < D; ++j)
        if (sign_pattern[j] < 0) v[j] = -v[j];
    m.parameters = ParamVector(std::move(v), std::move(segs));
    return m;
}

struct LossGrad {
    double loss = 0.0;
    double log_loss = 0.0;
    Vec grad;
};

// Averaged exponential loss (1/N) sum exp(-y_i <theta_eff, x_i>) and its analytic gradient.
inline LossGrad exp_loss_and_grad(const Model& model, const SparseTeacherDataset& ds,
                                  const Vec& params) {
    if (model.kind == ModelKind::two_layer)
        throw argument_error("exp_loss_and_grad: not defined for the two-layer model");
    if (model.D != ds.D) throw dimension_error("exp_loss_and_grad: model/dataset width mismatch");
    Vec theta = model.effective_theta(params);
    const std::size_t N = ds.N, D = ds.D;
    Vec m(N);
    double mn = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < N; ++i) {
        m[i] = ds.y[i] * dot(ds.X[i], theta);
        mn = std::min(mn, m[i]);
    }
    // exp(-m_i) = exp(-mn) exp(-(m_i - mn)); the second factor is in (0, 1].
    double s = 0.0;
    Vec w(N);
    for (std::size_t i = 0; i < N; ++i) s += (w[i] = std::exp(-(m[i] - mn)));
    LossGrad out;
    out.log_loss = -mn + std::log(s / static_cast<double>(N));
    out.loss = std::exp(out.log_loss);
    const double scale_all = std::exp(-mn) / static_cast<double>(N);
    Vec gt(D, 0.0);
    for (std::size_t i = 0; i < N; ++i) {
        double c = -w[i] * scale_all * ds.y[i];
        if (c == 0.0) continue;
        for (std::size_t j = 0; j < D; ++j) gt[j] += c * ds.X[i][j];
    }
    if (model.depth == 1) {
        out.grad = std::move(gt);
        return out;
    }
    out.grad.assign(params.size(), 0.0);
    for (int f = 0; f < model.depth; ++f)
        for (std::size_t j = 0; j < D; ++j) {
            double others = 1.0;
            for (int l = 0; l < model.depth; ++l)
                if (l != f) others *= params[l * D + j];
            out.grad[f * D + j] = gt[j] * others;
        }
    return out;
}

struct SupportMetrics {
    bool top_k_hit = false;
    double spurious_quiet = 0.0;
    double saturation = 0.0;
    bool degenerate = false;
};

inline SupportMetrics support_recovery_metrics(const Vec& theta, const Vec& teacher) {
    require_same_length(theta, teacher, "support_recovery_metrics");
    SupportMetrics r;
    const double mx = norm_inf(theta);
    if (mx == 0.0) {
        r.degenerate = true;
        return r;
    }
    const std::size_t D = theta.size();
    std::vector<std::size_t> support;
    for (std::size_t j = 0; j < D; ++j)
        if (teacher[j] != 0.0) support.push_back(j);
    std::vector<std::size_t> idx(D);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return std::abs(theta[a]) > std::abs(theta[b]); });
    std::vector<std::size_t> top(idx.begin(), idx.begin() + support.size());
    std::sort(top.begin(), top.end());
    r.top_k_hit = top == support;
    std::size_t off = 0, quiet = 0, sat = 0;
    for (std::size_t j = 0; j < D; ++j) {
        double a = std::abs(theta[j]) / mx;
        if (a > 0.9) ++sat;
        if (teacher[j] == 0.0) {
            ++off;
            if (a < 0.1) ++quiet;
        }
    }
    r.spurious_quiet = off ? static_cast<double>(quiet) / off : 1.0;
    r.saturation = static_cast<double>(sat) / D;
    return r;
}

// ---- two-layer network task ----

struct MulticlassDataset {
    std::vector<Vec> X;
    std::vector<int> y;
    int classes = 0;
    std::size_t D = 0;
    std::size_t size() const { return X.size(); }
};

struct TwoLayerNet {
    std::size_t D = 20, H = 64;
    int C = 4;

    std::size_t n_params() const { return H * D + H + C * H + C; }

    std::vector<Segment> segments() const {
        return {{"W1", 0, H * D}, {"b1", H * D, H}, {"W2", H * D + H, C * H},
                {"b2", H * D + H + C * H, static_cast<std::size_t>(C)}};
    }

    ParamVector init(std::uint64_t seed) const {
        Rng rng(seed);
        Vec p(n_params(), 0.0);
        const double s1 = 1.0 / std::sqrt(static_cast<double>(D));
        const double s2 = 1.0 / std::sqrt(static_cast<double>(H));
        for (std::size_t k = 0; k < H * D; ++k) p[k] = s1 * rng.normal();
        for (std::size_t k = 0; k < C * H; ++k) p[H * D + H + k] = s2 * rng.normal();
        return ParamVector(std::move(p), segments());
    }

    // Mean softmax cross-entropy; writes the gradient when grad != nullptr.
    double loss_and_grad(const Vec& p, const MulticlassDataset& ds, Vec* grad,
                         double* accuracy = nullptr) const {
        if (p.size() != n_params()) throw dimension_error("TwoLayerNet: parameter length");
        const double* W1 = p.data();
        const double* b1 = W1 + H * D;
        const double* W2 = b1 + H;
        const double* b2 = W2 + C * H;
        if (grad) grad->assign(p.size(), 0.0);
        double* gW1 = grad ? grad->data() : nullptr;
        double* gb1 = grad ? gW1 + H * D : nullptr;
        double* gW2 = grad ? gb1 + H : nullptr;
        double* gb2 = grad ? gW2 + C * H : nullptr;
        Vec a(H), z(C), dz(C), da(H);
        double total = 0.0;
        std::size_t correct = 0;
        const double invN = 1.0 / static_cast<double>(ds.size());
        for (std::size_t i = 0; i < ds.size(); ++i) {
            const Vec& x = ds.X[i];
            for (std::size_t h = 0; h < H; ++h) {
                double s = b1[h];
                const double* row = W1 + h * D;
                for (std::size_t d = 0; d < D; ++d) s += row[d] * x[d];
                a[h] = std::tanh(s);
            }
            double zmax = -std::numeric_limits<double>::infinity();
            int arg = 0;
            for (int c = 0; c < C; ++c) {
                double s = b2[c];
                const double* row = W2 + c * H;
                for (std::size_t h = 0; h < H; ++h) s += row[h] * a[h];
                z[c] = s;
                if (s > zmax) {
                    zmax = s;
                    arg = c;
                }
            }
            if (arg == ds.y[i]) ++correct;
            double se = 0.0;
            for (int c = 0; c < C; ++c) se += std::exp(z[c] - zmax);
            const double lse = zmax + std::log(se);
            total += lse - z[ds.y[i]];
            if (!grad) continue;
            for (int c = 0; c < C; ++c)
                dz[c] = (std::exp(z[c] - lse) - (c == ds.y[i] ? 1.0 : 0.0)) * invN;
            std::fill(da.begin(), da.end(), 0.0);
            for (int c = 0; c < C; ++c) {
                gb2[c] += dz[c];
                double* grow = gW2 + c * H;
                const double* row = W2 + c * H;
                for (std::size_t h = 0; h < H; ++h) {
                    grow[h] += dz[c] * a[h];
                    da[h] += dz[c] * row[h];
                }
            }
            for (std::size_t h = 0; h < H; ++h) {
                double ds_ = da[h] * (1.0 - a[h] * a[h]);
                if (ds_ == 0.0) continue;
                gb1[h] += ds_;
                double* grow = gW1 + h * D;
                for (std::size_t d = 0; d < D; ++d) grow[d] += ds_ * x[d];
            }
        }
        if (accuracy) *accuracy = static_cast<double>(correct) * invN;
        return total * invN;
    }

    double accuracy(const Vec& p, const MulticlassDataset& ds) const {
        double acc = 0.0;
        loss_and_grad(p, ds, nullptr, &acc);
        return acc;
    }
};

struct TwoLayerTask {
    MulticlassDataset train;
    MulticlassDataset val;
    TwoLayerNet net;
    std::uint64_t seed = 0;
};

struct TwoLayerTaskConfig {
    std::size_t D = 20;
    std::size_t N = 2000;     // training points
    std::size_t N_val = 1000; // held-out points from the same distribution
    int classes = 4;
    std::size_t hidden = 64;
    std::size_t informative = 4; // class means live on the first `informative` inputs
    double separation = 1.5;
    double noise_std = 1.0;
};

namespace detail {
inline MulticlassDataset gaussian_clusters(const TwoLayerTaskConfig& c,
                                           const std::vector<Vec>& means, std::size_t N, Rng& rng) {
    MulticlassDataset ds;
    ds.classes = c.classes;
    ds.D = c.D;
    // Stratified: class sizes differ by at most one.
    for (std::size_t i = 0; i < N; ++i) ds.y.push_back(static_cast<int>(i % c.classes));
    for (std::size_t i = N; i > 1; --i) std::swap(ds.y[i - 1], ds.y[rng.below(i)]);
    for (std::size_t i = 0; i < N; ++i) {
        Vec x(c.D);
        for (std::size_t d = 0; d < c.D; ++d) x[d] = means[ds.y[i]][d] + c.noise_std * rng.normal();
        ds.X.push_back(std::move(x));
    }
    return ds;
}
} // namespace detail

// Gaussian clusters whose means are distinct sign patterns on the informative inputs.
inline TwoLayerTask two_layer_task(std::uint64_t seed, const TwoLayerTaskConfig& c = {}) {
    if (c.informative > c.D || c.informative == 0)
        throw argument_error("two_layer_task: informative must be in [1, D]");
    if (c.classes < 2 || (c.informative < 63 && (std::size_t{1} << c.informative) < static_cast<std::size_t>(c.classes)))
        throw argument_error("two_layer_task: too few informative inputs for the class count");
    TwoLayerTask t;
    t.seed = seed;
    t.net.D = c.D;
    t.net.H = c.hidden;
    t.net.C = c.classes;
    Rng rng(derive_seed(seed, 1));
    std::vector<Vec> means;
    while (means.size() < static_cast<std::size_t>(c.classes)) {
        Vec m(c.D, 0.0);
        for (std::size_t d = 0; d < c.informative; ++d) m[d] = c.separation * rng.sign();
        if (std::find(means.begin(), means.end(), m) == means.end()) means.push_back(m);
    }
    t.train = detail::gaussian_clusters(c, means, c.N, rng);
    Rng vr(derive_seed(seed, 2));
    t.val = detail::gaussian_clusters(c, means, c.N_val, vr);
    return t;
}

} // namespace horst
