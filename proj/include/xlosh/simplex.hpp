#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

namespace xlosh {

// Dense two-phase simplex for the tiny LPs the contour planner produces
// (at most a handful of variables and rows). Solves
//     min c.x  s.t.  A x = b,  x >= 0
// with b >= 0 assumed (callers negate rows as needed). Bland's rule keeps
// it cycle-free; exactness at this scale beats a general solver.
struct SimplexResult {
    bool feasible = false;
    double objective = 0.0;
    std::vector<double> x;
};

namespace detail {

class SimplexTableau {
public:
    SimplexTableau(std::vector<std::vector<double>> A, std::vector<double> b,
                   std::vector<double> c)
        : m_(A.size()), n_(c.size()), A_(std::move(A)), b_(std::move(b)), c_(std::move(c)) {}

    SimplexResult solve() {
        // Phase 1: artificial basis, minimize artificial sum.
        std::size_t total = n_ + m_;
        basis_.resize(m_);
        tab_.assign(m_ + 1, std::vector<double>(total + 1, 0.0));
        for (std::size_t i = 0; i < m_; ++i) {
            for (std::size_t j = 0; j < n_; ++j) tab_[i][j] = A_[i][j];
            tab_[i][n_ + i] = 1.0;
            tab_[i][total] = b_[i];
            basis_[i] = n_ + i;
        }
        // Phase-1 objective row: sum of artificial rows, negated reduced costs.
        for (std::size_t j = 0; j <= total; ++j) {
            double s = 0.0;
            for (std::size_t i = 0; i < m_; ++i) s += tab_[i][j];
            tab_[m_][j] = -s;
        }
        for (std::size_t i = 0; i < m_; ++i) tab_[m_][n_ + i] = 0.0;
        run_pivots(total);
        if (std::abs(tab_[m_][total]) > 1e-9) return {false, 0.0, {}};

        // Drive any artificial variable still in the basis out of it.
        for (std::size_t i = 0; i < m_; ++i) {
            if (basis_[i] < n_) continue;
            std::size_t enter = total;
            for (std::size_t j = 0; j < n_; ++j)
                if (std::abs(tab_[i][j]) > 1e-11) { enter = j; break; }
            if (enter == total) continue; // redundant row
            pivot(i, enter, total);
        }

        // Phase 2: restore the real objective over the current basis.
        for (std::size_t j = 0; j <= total; ++j) tab_[m_][j] = 0.0;
        for (std::size_t j = 0; j < n_; ++j) tab_[m_][j] = c_[j];
        for (std::size_t i = 0; i < m_; ++i) {
            if (basis_[i] >= n_) continue;
            double coef = tab_[m_][basis_[i]];
            if (coef == 0.0) continue;
            for (std::size_t j = 0; j <= total; ++j) tab_[m_][j] -= coef * tab_[i][j];
        }
        // Forbid artificial columns from re-entering.
        blocked_from_ = n_;
        run_pivots(total);

        SimplexResult res;
        res.feasible = true;
        res.objective = -tab_[m_][total];
        res.x.assign(n_, 0.0);
        for (std::size_t i = 0; i < m_; ++i)
            if (basis_[i] < n_) res.x[basis_[i]] = tab_[i][total];
        return res;
    }

private:
    void run_pivots(std::size_t total) {
        for (int guard = 0; guard < 10000; ++guard) {
            // Bland: smallest-index entering column with negative reduced cost.
            std::size_t enter = total;
            for (std::size_t j = 0; j < (blocked_from_ ? *blocked_from_ : total); ++j)
                if (tab_[m_][j] < -1e-11) { enter = j; break; }
            if (enter == total) return;
            std::size_t leave = m_;
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < m_; ++i) {
                if (tab_[i][enter] <= 1e-11) continue;
                double ratio = tab_[i][total] / tab_[i][enter];
                if (ratio < best - 1e-12 ||
                    (std::abs(ratio - best) <= 1e-12 && (leave == m_ || basis_[i] < basis_[leave]))) {
                    best = ratio;
                    leave = i;
                }
            }
            if (leave == m_) return; // unbounded; callers bound every variable
            pivot(leave, enter, total);
        }
    }

    void pivot(std::size_t row, std::size_t col, std::size_t total) {
        double p = tab_[row][col];
        for (std::size_t j = 0; j <= total; ++j) tab_[row][j] /= p;
        for (std::size_t i = 0; i <= m_; ++i) {
            if (i == row) continue;
            double f = tab_[i][col];
            if (f == 0.0) continue;
            for (std::size_t j = 0; j <= total; ++j) tab_[i][j] -= f * tab_[row][j];
        }
        basis_[row] = col;
    }

    std::size_t m_, n_;
    std::vector<std::vector<double>> A_;
    std::vector<double> b_, c_;
    std::vector<std::vector<double>> tab_;
    std::vector<std::size_t> basis_;
    std::optional<std::size_t> blocked_from_;
};

} // namespace detail

inline SimplexResult simplex_solve(std::vector<std::vector<double>> A,
                                   std::vector<double> b, std::vector<double> c) {
    return detail::SimplexTableau(std::move(A), std::move(b), std::move(c)).solve();
}

} // namespace xlosh
