#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace horst {

using Vec = std::vector<double>;

struct dimension_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct argument_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct domain_error : std::domain_error {
    using std::domain_error::domain_error;
};
struct config_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

inline void require_same_length(const Vec& a, const Vec& b, const char* where) {
    if (a.size() != b.size())
        throw dimension_error(std::string(where) + ": length " + std::to_string(a.size()) +
                              " vs " + std::to_string(b.size()));
}

inline double sgn(double x) { return (x > 0.0) - (x < 0.0); }

inline double norm1(const Vec& x) {
    double s = 0.0;
    for (double v : x) s += std::abs(v);
    return s;
}
inline double norm2(const Vec& x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
}
inline double norm_inf(const Vec& x) {
    double s = 0.0;
    for (double v : x) s = std::max(s, std::abs(v));
    return s;
}
inline double norm_p(const Vec& x, double p) {
    if (std::isinf(p)) return norm_inf(x);
    double mx = norm_inf(x);
    if (mx == 0.0) return 0.0;
    double s = 0.0;
    for (double v : x) s += std::pow(std::abs(v) / mx, p);
    return mx * std::pow(s, 1.0 / p);
}
inline double dot(const Vec& a, const Vec& b) {
    require_same_length(a, b, "dot");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}
inline Vec sub(const Vec& a, const Vec& b) {
    require_same_length(a, b, "sub");
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}
inline Vec add(const Vec& a, const Vec& b) {
    require_same_length(a, b, "add");
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}
inline Vec scale(const Vec& a, double c) {
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = c * a[i];
    return r;
}
// Six significant digits, for messages.
inline std::string fmt_num(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

inline bool all_finite(const Vec& x) {
    return std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); });
}

struct Norms {
    double l1 = 0.0, l2 = 0.0, linf = 0.0;
};
inline Norms norms_of(const Vec& x) { return {norm1(x), norm2(x), norm_inf(x)}; }

struct Segment {
    std::string name;
    std::size_t start = 0;
    std::size_t length = 0;
};

// Flat parameter vector partitioned into named segments (one per tensor).
class ParamVector {
public:
    ParamVector() = default;
    explicit ParamVector(Vec values) : values_(std::move(values)) {
        segments_.push_back({"theta", 0, values_.size()});
    }
    ParamVector(Vec values, std::vector<Segment> segments)
        : values_(std::move(values)), segments_(std::move(segments)) {
        validate();
    }

    void validate() const {
        std::vector<Segment> s = segments_;
        std::sort(s.begin(), s.end(),
                  [](const Segment& a, const Segment& b) { return a.start < b.start; });
        std::size_t pos = 0;
        for (const auto& seg : s) {
            if (seg.start != pos)
                throw argument_error("segments must be disjoint and cover the vector: '" +
                                     seg.name + "' starts at " + std::to_string(seg.start));
            pos += seg.length;
        }
        if (pos != values_.size())
            throw argument_error("segments cover " + std::to_string(pos) + " of " +
                                 std::to_string(values_.size()) + " values");
    }

    std::size_t size() const { return values_.size(); }
    Vec& values() { return values_; }
    const Vec& values() const { return values_; }
    const std::vector<Segment>& segments() const { return segments_; }
    double& operator[](std::size_t i) { return values_[i]; }
    double operator[](std::size_t i) const { return values_[i]; }

    const Segment& segment(const std::string& name) const {
        for (const auto& s : segments_)
            if (s.name == name) return s;
        throw argument_error("unknown segment '" + name + "'");
    }
    bool has_segment(const std::string& name) const {
        return std::any_of(segments_.begin(), segments_.end(),
                           [&](const Segment& s) { return s.name == name; });
    }

private:
    Vec values_;
    std::vector<Segment> segments_;
};

// Gradient oracle; counts evaluations so callers can assert the per-step budget.
struct GradOracle {
    std::function<Vec(const Vec&)> eval;
    bool deterministic = true;
    std::uint64_t seed = 0;
    mutable std::size_t calls = 0;

    Vec operator()(const Vec& theta) const {
        ++calls;
        Vec g = eval(theta);
        require_same_length(theta, g, "GradOracle");
        return g;
    }
};

// A direction-producing map (theta, g) -> d. dim == nullopt accepts any length.
struct OperatorSpec {
    std::function<Vec(const Vec&, const Vec&)> apply;
    std::string label;
    std::optional<std::size_t> dim;

    Vec operator()(const Vec& theta, const Vec& g) const {
        require_same_length(theta, g, label.c_str());
        if (dim && *dim != theta.size())
            throw dimension_error(label + ": expects length " + std::to_string(*dim) + ", got " +
                                  std::to_string(theta.size()));
        Vec d = apply(theta, g);
        require_same_length(theta, d, label.c_str());
        return d;
    }
};

inline OperatorSpec with_dim(OperatorSpec op, std::size_t n) {
    op.dim = n;
    return op;
}

// compose(A, B)(theta, g) = A(theta, B(theta, g)).
inline OperatorSpec compose(const OperatorSpec& a, const OperatorSpec& b) {
    if (a.dim && b.dim && *a.dim != *b.dim)
        throw dimension_error("compose: " + a.label + " has length " + std::to_string(*a.dim) +
                              ", " + b.label + " has length " + std::to_string(*b.dim));
    OperatorSpec c;
    c.label = a.label + "*" + b.label;
    c.dim = a.dim ? a.dim : b.dim;
    c.apply = [a, b](const Vec& theta, const Vec& g) { return a(theta, b(theta, g)); };
    return c;
}

inline double commutator_residual(const OperatorSpec& a, const OperatorSpec& b, const Vec& theta,
                                  const Vec& g) {
    return norm2(sub(compose(a, b)(theta, g), compose(b, a)(theta, g)));
}

struct BoundednessReport {
    double max_ratio = 0.0;
    Vec witness_theta;
    Vec witness_grad;
    std::size_t sample_count = 0;
};

// max ||A(theta, g)||_2 / (1 + ||theta||_2) over the samples.
inline BoundednessReport boundedness_ratio(const OperatorSpec& a,
                                           const std::vector<std::pair<Vec, Vec>>& samples) {
    if (samples.empty()) throw argument_error("boundedness_ratio: empty sample list");
    BoundednessReport rep;
    rep.sample_count = samples.size();
    bool first = true;
    for (const auto& [theta, g] : samples) {
        double r = norm2(a(theta, g)) / (1.0 + norm2(theta));
        if (first || r > rep.max_ratio) {
            rep.max_ratio = r;
            rep.witness_theta = theta;
            rep.witness_grad = g;
            first = false;
        }
    }
    return rep;
}

} // namespace horst
