#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "xlosh/common.hpp"
#include "xlosh/contour.hpp"
#include "xlosh/cubature.hpp"
#include "xlosh/foxh.hpp"
#include "xlosh/network.hpp"

namespace xlosh {

enum class xlos_method { closed_form, asymptotic_low, asymptotic_high, oracle_m1 };

inline std::string method_token(xlos_method m) {
    switch (m) {
        case xlos_method::closed_form: return "closed";
        case xlos_method::asymptotic_low: return "asym-low";
        case xlos_method::asymptotic_high: return "asym-high";
        case xlos_method::oracle_m1: return "oracle-m1";
    }
    return "?";
}

struct XlosQuery {
    Scenario scenario;
    double K_th_dB = 0.0;
    int order = 0;           // cubature order per dimension, 0 picks the default
    EvalOptions foxh;        // QMC budget / replicates / seed for the H evaluations
    double half_height = 10.0;
};

struct XlosDiagnostics {
    double raw = 0.0;                // probability before clamping to [0,1]
    double stderr_total = 0.0;       // propagated from replicate stderrs, 0 for replicates=1
    std::vector<double> h_stderr;    // per-term H standard error, (tier assignment, node) order
};

struct XlosResult {
    double probability = 0.0;
    xlos_method method = xlos_method::closed_form;
    XlosDiagnostics diagnostics;
};

inline constexpr int monitor_set_cap = 3;

inline int default_cubature_order(int M) { return M >= 3 ? 8 : 16; }

namespace detail {

inline int resolve_order(int M, int order) {
    if (order == 0) return default_cubature_order(M);
    if (order < 2) throw parse_error("xlos: cubature order must be >= 2");
    return order;
}

inline void check_monitor_cap(int M) {
    if (M > monitor_set_cap)
        throw incompatible_error("xlos: monitor_set_size capped at " +
                                 std::to_string(monitor_set_cap));
}

// All tier assignments (n_1..n_M), n_1 varying slowest.
inline std::vector<std::vector<std::size_t>> tier_assignments(std::size_t tiers, int M) {
    std::vector<std::vector<std::size_t>> out;
    std::vector<std::size_t> cur(std::size_t(M), 0);
    for (;;) {
        out.push_back(cur);
        int m = M - 1;
        while (m >= 0) {
            if (++cur[std::size_t(m)] < tiers) break;
            cur[std::size_t(m)] = 0;
            --m;
        }
        if (m < 0) break;
    }
    return out;
}

inline std::string assignment_str(const std::vector<std::size_t>& a) {
    std::string s = "(";
    for (std::size_t m = 0; m < a.size(); ++m)
        s += (m ? "," : "") + std::to_string(a[m] + 1);
    return s + ")";
}

} // namespace detail

// Parameter block of the M-variate H-function behind the service probability:
// outer families indexed i = 1..M-1 carry the indicator coefficient pattern
// (1_{1<=i},...,1_{M<=i}), one extra numerator term (1-M; alpha/2,...),
// per-variable kernel Gamma(s_m)/Gamma(1+s_m). Arguments are
// z_m = K_th Lambda_{n_m}^{alpha/2} / (omega_{l,m} K_{n_m}).
inline FoxHParams build_foxh_params(const DerivedNetwork& net, double alpha,
                                    const std::vector<std::size_t>& assignment,
                                    const double* omega_row, double k_th_linear) {
    const int M = int(assignment.size());
    if (M < 1) throw parse_error("build_foxh_params: empty tier assignment");
    if (!(alpha > 0.0)) throw parse_error("build_foxh_params: alpha must be positive");
    FoxHParams p;
    p.dim = M;
    for (int i = 1; i <= M - 1; ++i) {
        std::vector<double> ind(std::size_t(M), 0.0);
        for (int m = 0; m < i; ++m) ind[std::size_t(m)] = 1.0;
        p.outer_upper_num.push_back({1.0 - 2.0 * i / alpha, ind, gamma_sign::numerator});
        p.outer_lower_den.push_back({-2.0 * i / alpha, ind, gamma_sign::denominator});
    }
    p.outer_upper_num.push_back(
        {1.0 - M, std::vector<double>(std::size_t(M), alpha / 2.0), gamma_sign::numerator});
    p.per_variable.resize(std::size_t(M));
    for (auto& pv : p.per_variable) {
        pv.upper_num.push_back({1.0, {1.0}, gamma_sign::numerator});
        pv.lower_den.push_back({0.0, {1.0}, gamma_sign::denominator});
    }
    p.z.resize(std::size_t(M));
    for (int m = 0; m < M; ++m) {
        const std::size_t n = assignment[std::size_t(m)];
        if (n >= net.K.size()) throw parse_error("build_foxh_params: tier index out of range");
        double zm = k_th_linear * std::pow(net.Lambda[n], alpha / 2.0) /
                    (omega_row[m] * net.K[n]);
        if (!(zm > 0.0) || !std::isfinite(zm))
            throw eval_error("build_foxh_params: nonpositive argument z for variable " +
                             std::to_string(m + 1));
        p.z[std::size_t(m)] = zm;
    }
    return p;
}

// Service probability through the closed form: P = 1 - (2 sqrt(pi)/alpha)^M
// sum over tier assignments of prod_m lambda~_{n_m} times the cubature sum of
// w_l I_1, with I_1 = (alpha/2) (pi lambda_T)^{-M} H(z(n,l)). Every (n, l)
// term shares the same gamma structure, so one planned contour serves the
// whole batch and the gamma products are computed once per QMC point.
inline XlosResult xlos_closed_form(const XlosQuery& query) {
    const Scenario& sc = query.scenario;
    sc.validate();
    const int M = sc.monitor_set_size;
    detail::check_monitor_cap(M);
    const DerivedNetwork net = derive(sc);
    const double alpha = sc.channel.alpha;
    const double kth = std::pow(10.0, query.K_th_dB / 10.0);
    const int order = detail::resolve_order(M, query.order);

    const Cubature cub = product_gauss_hermite(M, order);
    const std::vector<LognormalSpec> specs(std::size_t(M), {0.0, sc.channel.sigmaK_dB});
    const std::vector<double> om = lognormal_nodes(cub, specs);
    const auto assignments = detail::tier_assignments(sc.tiers.size(), M);
    const std::int64_t L = cub.count;

    const FoxHParams tpl = build_foxh_params(net, alpha, assignments[0], om.data(), kth);
    ContourSpec contour;
    try {
        contour = plan_contour(tpl, query.half_height);
    } catch (const contour_error& e) {
        throw contour_error("closed form: contour planning failed for tier assignment " +
                            detail::assignment_str(assignments[0]) + ", node 0: " + e.what());
    }

    std::vector<std::vector<double>> z_list;
    z_list.reserve(assignments.size() * std::size_t(L));
    for (const auto& a : assignments)
        for (std::int64_t l = 0; l < L; ++l)
            z_list.push_back(
                build_foxh_params(net, alpha, a, om.data() + std::size_t(l) * M, kth).z);

    std::vector<EvalResult> res;
    try {
        res = eval_batch(tpl, contour, z_list, query.foxh);
    } catch (const eval_error&) {
        // Localize the failing term so the error names (tier assignment, node).
        for (std::size_t q = 0; q < z_list.size(); ++q) {
            try {
                FoxHParams p = tpl;
                p.z = z_list[q];
                (void)eval(p, contour, query.foxh);
            } catch (const eval_error& inner) {
                throw eval_error("closed form: H evaluation failed at tier assignment " +
                                 detail::assignment_str(assignments[q / std::size_t(L)]) +
                                 ", node " + std::to_string(q % std::size_t(L)) + ": " +
                                 inner.what());
            }
        }
        throw;
    }

    const double outer = std::pow(2.0 * std::sqrt(std::numbers::pi) / alpha, double(M));
    const double i1_coef = (alpha / 2.0) * std::pow(std::numbers::pi * net.lambda_T, -double(M));
    double tot = 0.0, var = 0.0;
    XlosDiagnostics diag;
    diag.h_stderr.reserve(z_list.size());
    std::size_t q = 0;
    for (const auto& a : assignments) {
        double lam_prod = 1.0;
        for (std::size_t n : a) lam_prod *= net.lambda_tilde[n];
        for (std::int64_t l = 0; l < L; ++l, ++q) {
            const double coef = lam_prod * i1_coef * cub.w[std::size_t(l)];
            tot += coef * res[q].estimate.real();
            var += coef * coef * res[q].stderr_est * res[q].stderr_est;
            diag.h_stderr.push_back(res[q].stderr_est);
        }
    }

    XlosResult out;
    out.method = xlos_method::closed_form;
    diag.raw = 1.0 - outer * tot;
    diag.stderr_total = outer * std::sqrt(var);
    out.diagnostics = std::move(diag);
    out.probability = std::clamp(out.diagnostics.raw, 0.0, 1.0);
    return out;
}

// Threshold asymptotics: the low-ratio limit is exactly 1; the high-ratio
// tail is pi^{-(M/2-1)} sum_n (lambda_T/Omega_{n_1}) prod_m rho_{n_m}
// sum_l w_l (omega_{l,1} K_{n_1}/K_th)^{2/alpha}, clamped.
enum class asym_regime { low, high };

inline XlosResult xlos_asymptotic(const XlosQuery& query, asym_regime regime) {
    const Scenario& sc = query.scenario;
    sc.validate();
    const int M = sc.monitor_set_size;
    detail::check_monitor_cap(M);
    XlosResult out;
    if (regime == asym_regime::low) {
        out.method = xlos_method::asymptotic_low;
        out.probability = 1.0;
        out.diagnostics.raw = 1.0;
        return out;
    }
    const DerivedNetwork net = derive(sc);
    const double alpha = sc.channel.alpha;
    const double kth = std::pow(10.0, query.K_th_dB / 10.0);
    const int order = detail::resolve_order(M, query.order);
    const Cubature cub = product_gauss_hermite(M, order);
    const std::vector<LognormalSpec> specs(std::size_t(M), {0.0, sc.channel.sigmaK_dB});
    const std::vector<double> om = lognormal_nodes(cub, specs);

    double tot = 0.0;
    for (const auto& a : detail::tier_assignments(sc.tiers.size(), M)) {
        double rho_prod = 1.0;
        for (std::size_t n : a) rho_prod *= net.rho[n];
        const std::size_t n1 = a[0];
        double inner = 0.0;
        for (std::int64_t l = 0; l < cub.count; ++l)
            inner += cub.w[std::size_t(l)] *
                     std::pow(om[std::size_t(l) * M] * net.K[n1] / kth, 2.0 / alpha);
        tot += (net.lambda_T / net.Omega[n1]) * rho_prod * inner;
    }
    out.method = xlos_method::asymptotic_high;
    out.diagnostics.raw = std::pow(std::numbers::pi, -(M / 2.0 - 1.0)) * tot;
    out.probability = std::clamp(out.diagnostics.raw, 0.0, 1.0);
    return out;
}

// Independent single-cell check that bypasses the H-function machinery:
// integrates the exact lognormal CDF against the nearest-point distance law
// of the pooled process. With t = pi lambda_T r^2,
//   P = 1 - sum_n rho_n int_0^inf Phi(10 log10(c_n t^{alpha/2}) / sigma_K) e^{-t} dt,
//   c_n = K_th Omega_n^{alpha/2} / (K_n (pi lambda_T)^{alpha/2}).
inline double xlos_oracle_m1(const Scenario& sc, double K_th_dB) {
    sc.validate();
    if (sc.monitor_set_size != 1)
        throw incompatible_error("oracle-m1: requires monitor_set_size 1");
    const DerivedNetwork net = derive(sc);
    const double alpha = sc.channel.alpha;
    const double sig = sc.channel.sigmaK_dB;
    const double kth = std::pow(10.0, K_th_dB / 10.0);
    double tot = 0.0;
    for (std::size_t n = 0; n < net.rho.size(); ++n) {
        const double c = kth * std::pow(net.Omega[n], alpha / 2.0) /
                         (net.K[n] * std::pow(std::numbers::pi * net.lambda_T, alpha / 2.0));
        double v = 0.0;
        if (sig == 0.0) {
            // Degenerate CDF: the integrand is 1{t > c^{-2/alpha}} e^{-t}.
            v = std::exp(-std::pow(c, -2.0 / alpha));
        } else {
            auto f = [&](double t) {
                if (t <= 0.0) return 0.0;
                const double db = 10.0 * std::log10(c * std::pow(t, alpha / 2.0));
                return 0.5 * std::erfc(-db / (sig * std::numbers::sqrt2)) * std::exp(-t);
            };
            boost::math::quadrature::exp_sinh<double> integrator;
            double err = 0.0, l1 = 0.0;
            v = integrator.integrate(f, 1e-9, &err, &l1);
            if (!(err * std::max(1.0, l1) <= 1e-6))
                throw eval_error("oracle-m1: quadrature did not reach the requested accuracy");
        }
        tot += net.rho[n] * v;
    }
    return 1.0 - tot;
}

struct SweepRow {
    double K_th_dB = 0.0;
    XlosResult result;
};

// One row per (grid point, method), grid-major, evaluated in a fixed order so
// reruns with the same options reproduce the table exactly.
inline std::vector<SweepRow> sweep(const Scenario& sc, const std::vector<double>& grid,
                                   const std::vector<xlos_method>& methods,
                                   int order = 0, const EvalOptions& foxh = {},
                                   double half_height = 10.0) {
    if (grid.empty()) throw parse_error("sweep: empty K_th grid");
    if (methods.empty()) throw parse_error("sweep: no methods requested");
    std::vector<SweepRow> rows;
    rows.reserve(grid.size() * methods.size());
    for (double kdb : grid) {
        XlosQuery q{sc, kdb, order, foxh, half_height};
        for (xlos_method m : methods) {
            SweepRow row;
            row.K_th_dB = kdb;
            switch (m) {
                case xlos_method::closed_form: row.result = xlos_closed_form(q); break;
                case xlos_method::asymptotic_low:
                    row.result = xlos_asymptotic(q, asym_regime::low);
                    break;
                case xlos_method::asymptotic_high:
                    row.result = xlos_asymptotic(q, asym_regime::high);
                    break;
                case xlos_method::oracle_m1: {
                    double p = xlos_oracle_m1(sc, kdb);
                    row.result.probability = std::clamp(p, 0.0, 1.0);
                    row.result.method = xlos_method::oracle_m1;
                    row.result.diagnostics.raw = p;
                    break;
                }
            }
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

} // namespace xlosh
