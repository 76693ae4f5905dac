#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include "horst/core.hpp"

namespace horst {

struct infeasible_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class LpStatus { optimal, infeasible, unbounded };

struct LpResult {
    LpStatus status = LpStatus::infeasible;
    Vec x;
    double objective = 0.0;
    Vec duals; // y with A'y <= c at optimality (equality-form multipliers)
    std::size_t pivots = 0;
};

// Dense two-phase tableau simplex for  min c'x  s.t.  A x = b, x >= 0.
// Bland's rule throughout; entries below pivot_tol are never pivoted on.
class DenseSimplex {
public:
    static constexpr double pivot_tol = 1e-10;
    static constexpr double cost_tol = 1e-10;

    static LpResult solve(const Vec& c, const std::vector<Vec>& A, const Vec& b) {
        const std::size_t m = A.size();
        const std::size_t n = c.size();
        if (b.size() != m) throw dimension_error("simplex: b length does not match rows of A");
        for (const auto& row : A)
            if (row.size() != n) throw dimension_error("simplex: ragged constraint matrix");

        // Columns: n structural, m artificial, then rhs.
        const std::size_t W = n + m + 1;
        std::vector<Vec> T(m + 1, Vec(W, 0.0));
        std::vector<double> flip(m, 1.0);
        for (std::size_t i = 0; i < m; ++i) {
            flip[i] = b[i] < 0.0 ? -1.0 : 1.0;
            for (std::size_t j = 0; j < n; ++j) T[i][j] = flip[i] * A[i][j];
            T[i][n + i] = 1.0;
            T[i][W - 1] = flip[i] * b[i];
        }
        std::vector<std::size_t> basis(m);
        for (std::size_t i = 0; i < m; ++i) basis[i] = n + i;

        LpResult res;
        // Phase 1: minimize the sum of artificials.
        Vec c1(n + m, 0.0);
        for (std::size_t i = 0; i < m; ++i) c1[n + i] = 1.0;
        set_objective(T, basis, c1, W);
        if (!run(T, basis, n + m, W, res.pivots)) throw std::logic_error("simplex: phase 1 unbounded");
        double scale_b = 1.0;
        for (double v : b) scale_b = std::max(scale_b, std::abs(v));
        if (-T[m][W - 1] > 1e-9 * scale_b) {
            res.status = LpStatus::infeasible;
            return res;
        }
        // Drive remaining artificials out of the basis where possible.
        for (std::size_t i = 0; i < m; ++i) {
            if (basis[i] < n) continue;
            for (std::size_t j = 0; j < n; ++j)
                if (std::abs(T[i][j]) > pivot_tol) {
                    pivot(T, basis, i, j, W);
                    ++res.pivots;
                    break;
                }
        }
        // Phase 2: artificial columns stay in the tableau (they carry B^{-1}) but may not enter.
        Vec c2(n + m, 0.0);
        for (std::size_t j = 0; j < n; ++j) c2[j] = c[j];
        set_objective(T, basis, c2, W);
        if (!run(T, basis, n, W, res.pivots)) {
            res.status = LpStatus::unbounded;
            return res;
        }
        res.status = LpStatus::optimal;
        res.x.assign(n, 0.0);
        for (std::size_t i = 0; i < m; ++i)
            if (basis[i] < n) res.x[basis[i]] = T[i][W - 1];
        res.objective = 0.0;
        for (std::size_t j = 0; j < n; ++j) res.objective += c[j] * res.x[j];
        // Reduced cost of artificial i is -y_i in the flipped system.
        res.duals.assign(m, 0.0);
        for (std::size_t i = 0; i < m; ++i) res.duals[i] = -T[m][n + i] * flip[i];
        return res;
    }

private:
    // Objective row holds reduced costs; rhs cell holds -z.
    static void set_objective(std::vector<Vec>& T, const std::vector<std::size_t>& basis,
                              const Vec& cost, std::size_t W) {
        const std::size_t m = basis.size();
        Vec& z = T[m];
        std::fill(z.begin(), z.end(), 0.0);
        for (std::size_t j = 0; j < cost.size(); ++j) z[j] = cost[j];
        for (std::size_t i = 0; i < m; ++i) {
            double cb = cost[basis[i]];
            if (cb == 0.0) continue;
            for (std::size_t j = 0; j < W; ++j) z[j] -= cb * T[i][j];
        }
    }

    static void pivot(std::vector<Vec>& T, std::vector<std::size_t>& basis, std::size_t r,
                      std::size_t col, std::size_t W) {
        const double pv = T[r][col];
        for (std::size_t j = 0; j < W; ++j) T[r][j] /= pv;
        T[r][col] = 1.0;
        for (std::size_t i = 0; i < T.size(); ++i) {
            if (i == r) continue;
            double f = T[i][col];
            if (f == 0.0) continue;
            for (std::size_t j = 0; j < W; ++j) T[i][j] -= f * T[r][j];
            T[i][col] = 0.0;
        }
        basis[r] = col;
    }

    // Bland's rule over columns [0, n_enter). Returns false when unbounded.
    static bool run(std::vector<Vec>& T, std::vector<std::size_t>& basis, std::size_t n_enter,
                    std::size_t W, std::size_t& pivots) {
        const std::size_t m = basis.size();
        const std::size_t cap = 50000 + 100 * (m + W);
        for (std::size_t it = 0; it < cap; ++it) {
            std::size_t col = n_enter;
            for (std::size_t j = 0; j < n_enter; ++j)
                if (T[m][j] < -cost_tol) {
                    col = j;
                    break;
                }
            if (col == n_enter) return true;
            std::size_t row = m;
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < m; ++i) {
                if (T[i][col] <= pivot_tol) continue;
                double ratio = T[i][W - 1] / T[i][col];
                if (ratio < best - 1e-14 ||
                    (std::abs(ratio - best) <= 1e-14 && row < m && basis[i] < basis[row])) {
                    best = ratio;
                    row = i;
                }
            }
            if (row == m) return false;
            pivot(T, basis, row, col, W);
            ++pivots;
        }
        throw std::runtime_error("simplex: iteration cap reached");
    }
};

} // namespace horst
