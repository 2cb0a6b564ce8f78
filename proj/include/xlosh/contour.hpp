#pragma once

#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "xlosh/common.hpp"
#include "xlosh/foxh.hpp"
#include "xlosh/simplex.hpp"

namespace xlosh {

// Pole-separation constraints on the contour abscissas: per-variable box
// bounds plus joint halfspaces coeffs.c >= rhs from the outer numerator
// gamma family.
struct ContourConstraints {
    std::vector<double> lb, ub;
    struct Halfspace {
        std::vector<double> coeffs;
        double rhs;
    };
    std::vector<Halfspace> halfspaces;
};

inline constexpr double contour_epsilon_default = 0.1;

/// Per variable i: lb_i from the rightmost pole of the per-variable upper
// numerator family ((c-1)/g + eps), ub_i from the leftmost pole of the
// lower numerator family (d/dl - eps). When a family is empty there is no
// pole to separate from; the missing bound defaults to a width-2 window
// against the other one (or [-1, 1] when both are absent) to keep the LP
// bounded without astronomical sentinels. One halfspace per outer upper
// numerator term j: sum_i alpha_{j,i} c_i >= a_j - 1 + eps.
inline ContourConstraints derive_constraints(const FoxHParams& params,
                                             double epsilon = contour_epsilon_default) {
    params.validate();
    const int M = params.dim;
    ContourConstraints cc;
    cc.lb.assign(std::size_t(M), std::numeric_limits<double>::quiet_NaN());
    cc.ub.assign(std::size_t(M), std::numeric_limits<double>::quiet_NaN());
    for (int i = 0; i < M; ++i) {
        const auto& pv = params.per_variable[std::size_t(i)];
        double lo = -std::numeric_limits<double>::infinity();
        double hi = std::numeric_limits<double>::infinity();
        for (const auto& t : pv.upper_num) lo = std::max(lo, (t.offset - 1.0) / t.coeffs[0]);
        for (const auto& t : pv.lower_num) hi = std::min(hi, t.offset / t.coeffs[0]);
        bool has_lo = std::isfinite(lo), has_hi = std::isfinite(hi);
        if (has_lo) lo += epsilon;
        if (has_hi) hi -= epsilon;
        if (!has_lo && !has_hi) { lo = -1.0; hi = 1.0; }
        else if (!has_lo) lo = hi - 2.0;
        else if (!has_hi) hi = lo + 2.0;
        cc.lb[std::size_t(i)] = lo;
        cc.ub[std::size_t(i)] = hi;
    }
    for (const auto& t : params.outer_upper_num)
        cc.halfspaces.push_back({t.coeffs, t.offset - 1.0 + epsilon});
    return cc;
}

// Minimizes sum_i c_i over the constraint polytope via the dense two-phase
// simplex; any optimal vertex is acceptable (the optimum value is what the
// callers rely on).
inline ContourSpec plan_contour(const FoxHParams& params, double half_height = 10.0,
                                double epsilon = contour_epsilon_default) {
    const ContourConstraints cc = derive_constraints(params, epsilon);
    const int M = params.dim;
    for (int i = 0; i < M; ++i)
        if (!(cc.lb[std::size_t(i)] <= cc.ub[std::size_t(i)])) {
            std::ostringstream os;
            os << "plan_contour: no valid contour, variable " << (i + 1)
               << " has empty pole-separation interval [" << cc.lb[std::size_t(i)] << ", "
               << cc.ub[std::size_t(i)] << "]";
            throw contour_error(os.str());
        }

    // Shift to x = c - lb >= 0 and add one slack per halfspace, one upper
    // bound row per variable:  A x = b, x >= 0.
    const std::size_t J = cc.halfspaces.size();
    const std::size_t nvar = std::size_t(M) + J + std::size_t(M);
    std::vector<std::vector<double>> A;
    std::vector<double> b, obj(nvar, 0.0);
    for (int i = 0; i < M; ++i) obj[std::size_t(i)] = 1.0;

    for (std::size_t j = 0; j < J; ++j) {
        std::vector<double> row(nvar, 0.0);
        double rhs = cc.halfspaces[j].rhs;
        for (int i = 0; i < M; ++i) {
            row[std::size_t(i)] = cc.halfspaces[j].coeffs[std::size_t(i)];
            rhs -= cc.halfspaces[j].coeffs[std::size_t(i)] * cc.lb[std::size_t(i)];
        }
        row[std::size_t(M) + j] = -1.0; // surplus
        if (rhs < 0.0) {
            for (auto& v : row) v = -v;
            rhs = -rhs;
        }
        A.push_back(std::move(row));
        b.push_back(rhs);
    }
    for (int i = 0; i < M; ++i) {
        std::vector<double> row(nvar, 0.0);
        row[std::size_t(i)] = 1.0;
        row[std::size_t(M) + J + std::size_t(i)] = 1.0;
        A.push_back(std::move(row));
        b.push_back(cc.ub[std::size_t(i)] - cc.lb[std::size_t(i)]);
    }

    SimplexResult r = simplex_solve(std::move(A), std::move(b), std::move(obj));
    if (!r.feasible) {
        std::ostringstream os;
        os << "plan_contour: no valid contour, joint halfspace constraints infeasible"
           << " (outer numerator family conflicts with the per-variable intervals)";
        throw contour_error(os.str());
    }
    ContourSpec cs;
    cs.half_height = half_height;
    cs.abscissa.resize(std::size_t(M));
    for (int i = 0; i < M; ++i) cs.abscissa[std::size_t(i)] = r.x[std::size_t(i)] + cc.lb[std::size_t(i)];
    return cs;
}

// True iff every interval and halfspace holds with margin >= 0 (epsilon is
// already baked into the constraint set); a small float-dust slack keeps
// active LP vertices valid.
inline bool validate_contour(const FoxHParams& params, const ContourSpec& contour,
                             double epsilon = contour_epsilon_default) {
    if (int(contour.abscissa.size()) != params.dim) return false;
    if (!(contour.half_height > 0.0)) return false;
    const ContourConstraints cc = derive_constraints(params, epsilon);
    constexpr double slack = 1e-9;
    for (int i = 0; i < params.dim; ++i) {
        double c = contour.abscissa[std::size_t(i)];
        if (c < cc.lb[std::size_t(i)] - slack || c > cc.ub[std::size_t(i)] + slack) return false;
    }
    for (const auto& h : cc.halfspaces) {
        double dot = 0.0;
        for (int i = 0; i < params.dim; ++i) dot += h.coeffs[std::size_t(i)] * contour.abscissa[std::size_t(i)];
        if (dot < h.rhs - slack) return false;
    }
    return true;
}

} // namespace xlosh
