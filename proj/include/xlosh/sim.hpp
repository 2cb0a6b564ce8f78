#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "xlosh/common.hpp"
#include "xlosh/network.hpp"
#include "xlosh/parallel.hpp"

namespace xlosh {

struct SimConfig {
    std::int64_t trials = 0;
    double window_radius = 0.0; // 0 selects the automatic radius
    std::uint64_t seed = 0;
};

struct SimResult {
    double estimate = 0.0;
    double ci95_halfwidth = 0.0;
    std::int64_t trials = 0;
    std::uint64_t seed = 0;
    double window_radius = 0.0;
};

namespace detail {

// Counter-based stream: every trial gets its own engine derived from
// (seed, trial), so results do not depend on scheduling order.
class splitmix64_engine {
  public:
    using result_type = std::uint64_t;
    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~std::uint64_t(0); }
    explicit splitmix64_engine(std::uint64_t state) : state_(state) {}
    result_type operator()() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

  private:
    std::uint64_t state_;
};

inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline splitmix64_engine trial_engine(std::uint64_t seed, std::uint64_t trial) {
    return splitmix64_engine(mix64(seed + 0x9e3779b97f4a7c15ULL) ^
                             mix64(trial * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL));
}

inline double uniform01(splitmix64_engine& eng) {
    return double(eng() >> 11) * 0x1.0p-53;
}

inline double standard_normal(splitmix64_engine& eng) {
    std::normal_distribution<double> nd(0.0, 1.0);
    return nd(eng);
}

inline std::int64_t poisson_count(splitmix64_engine& eng, double mean) {
    std::poisson_distribution<std::int64_t> pd(mean);
    return pd(eng);
}

inline void check_cfg(const SimConfig& cfg) {
    if (cfg.trials < 1) throw parse_error("sim: trials must be >= 1");
    if (cfg.window_radius < 0.0) throw parse_error("sim: window_radius must be positive or 0");
}

inline SimResult tally(std::int64_t successes, const SimConfig& cfg, double radius) {
    SimResult r;
    r.trials = cfg.trials;
    r.seed = cfg.seed;
    r.window_radius = radius;
    r.estimate = double(successes) / double(cfg.trials);
    r.ci95_halfwidth = 1.96 * std::sqrt(r.estimate * (1.0 - r.estimate) / double(cfg.trials));
    return r;
}

// Per-block success counting over [0, trials); integer sums are order-free.
template <typename TrialFn>
inline std::int64_t count_successes(std::int64_t trials, TrialFn&& trial_fn) {
    const std::int64_t nb = block_count(trials);
    std::vector<std::int64_t> block_hits(std::size_t(nb), 0);
    parallel_blocks(nb, [&](std::int64_t b) {
        const std::int64_t lo = b * reduction_block_size;
        const std::int64_t hi = std::min<std::int64_t>(lo + reduction_block_size, trials);
        std::int64_t hits = 0;
        for (std::int64_t t = lo; t < hi; ++t)
            if (trial_fn(std::uint64_t(t))) ++hits;
        block_hits[std::size_t(b)] = hits;
    });
    return std::accumulate(block_hits.begin(), block_hits.end(), std::int64_t(0));
}

} // namespace detail

// Window radius with Pr[M-th nearest pooled point beyond it] < 1e-6, from the
// 1 - 1e-6 quantile of a Gamma(M + 30, 1) surrogate for the disk count.
inline double auto_window_radius(double lambda_T, int M) {
    if (!(lambda_T > 0.0)) throw parse_error("sim: pooled density must be positive");
    const double q = boost::math::gamma_p_inv(double(M) + 30.0, 1.0 - 1e-6);
    return std::sqrt(q / (std::numbers::pi * lambda_T));
}

// Displaced-domain simulation: unit-power processes of density lambda~_n, the
// M nearest points form the monitoring set, and each carries
// K = K_n gamma Omega_n^{-alpha/2} r^{-alpha} with an independent lognormal
// gamma (0 mean, sigma_K dB). The gamma draws follow the distance order, so
// runs with larger M extend, rather than reshuffle, the draw sequence -- with
// a shared seed the success sets are nested across M.
inline SimResult simulate_equivalent(const Scenario& sc, double K_th_dB, const SimConfig& cfg) {
    sc.validate();
    detail::check_cfg(cfg);
    const DerivedNetwork net = derive(sc);
    const int M = sc.monitor_set_size;
    const double alpha = sc.channel.alpha;
    const double sigK = sc.channel.sigmaK_dB;
    const double kth = std::pow(10.0, K_th_dB / 10.0);
    const double R = cfg.window_radius > 0.0 ? cfg.window_radius
                                             : auto_window_radius(net.lambda_T, M);
    const double area = std::numbers::pi * R * R;
    const std::size_t NT = sc.tiers.size();

    std::int64_t hits = detail::count_successes(cfg.trials, [&](std::uint64_t trial) {
        auto eng = detail::trial_engine(cfg.seed, trial);
        std::vector<std::pair<double, std::size_t>> pts; // (distance, tier)
        for (std::size_t n = 0; n < NT; ++n) {
            const std::int64_t cnt = detail::poisson_count(eng, net.lambda_tilde[n] * area);
            for (std::int64_t k = 0; k < cnt; ++k)
                pts.emplace_back(R * std::sqrt(detail::uniform01(eng)), n);
        }
        if (std::int64_t(pts.size()) < M)
            throw window_error("sim: fewer than " + std::to_string(M) +
                               " points in the window (radius " + std::to_string(R) + ")");
        std::partial_sort(pts.begin(), pts.begin() + M, pts.end());
        bool ok = false;
        for (int m = 0; m < M; ++m) {
            const auto& [r, n] = pts[std::size_t(m)];
            const double gam = std::pow(10.0, sigK * detail::standard_normal(eng) / 10.0);
            const double K = net.K[n] * gam * std::pow(net.Omega[n], -alpha / 2.0) *
                             std::pow(r, -alpha);
            if (K > kth) ok = true;
        }
        return ok;
    });
    return detail::tally(hits, cfg, R);
}

// Physical-domain simulation: tier processes at density lambda_n, per-station
// lognormal shadowing (mu_n, sigma_n dB), selection by received power
// P_n X r^{-nu}, K attached at the physical distance. Exploratory companion
// to simulate_equivalent; the two use different selection statistics.
inline SimResult simulate_physical(const Scenario& sc, double K_th_dB, const SimConfig& cfg) {
    sc.validate();
    detail::check_cfg(cfg);
    const DerivedNetwork net = derive(sc);
    const int M = sc.monitor_set_size;
    const double alpha = sc.channel.alpha;
    const double nu = sc.channel.nu;
    const double sigK = sc.channel.sigmaK_dB;
    const double kth = std::pow(10.0, K_th_dB / 10.0);
    double lambda_phys = 0.0;
    for (const auto& t : sc.tiers) lambda_phys += t.lambda;
    const double R = cfg.window_radius > 0.0 ? cfg.window_radius
                                             : auto_window_radius(lambda_phys, M);
    const double area = std::numbers::pi * R * R;
    const std::size_t NT = sc.tiers.size();

    struct Station {
        double rsrp, r;
        std::size_t tier;
        bool operator<(const Station& o) const { return rsrp > o.rsrp; }
    };

    std::int64_t hits = detail::count_successes(cfg.trials, [&](std::uint64_t trial) {
        auto eng = detail::trial_engine(cfg.seed, trial);
        std::vector<Station> pts;
        for (std::size_t n = 0; n < NT; ++n) {
            const auto& tier = sc.tiers[n];
            const double p_lin = std::pow(10.0, tier.power_dBm / 10.0);
            const std::int64_t cnt = detail::poisson_count(eng, tier.lambda * area);
            for (std::int64_t k = 0; k < cnt; ++k) {
                const double r = R * std::sqrt(detail::uniform01(eng));
                const double X = std::pow(
                    10.0,
                    (tier.shadow_mu_dB + tier.shadow_sigma_dB * detail::standard_normal(eng)) /
                        10.0);
                pts.push_back({p_lin * X * std::pow(r, -nu), r, n});
            }
        }
        if (std::int64_t(pts.size()) < M)
            throw window_error("sim: fewer than " + std::to_string(M) +
                               " points in the window (radius " + std::to_string(R) + ")");
        std::partial_sort(pts.begin(), pts.begin() + M, pts.end());
        bool ok = false;
        for (int m = 0; m < M; ++m) {
            const auto& st = pts[std::size_t(m)];
            const double gam = std::pow(10.0, sigK * detail::standard_normal(eng) / 10.0);
            const double K = net.K[st.tier] * gam * std::pow(st.r, -alpha);
            if (K > kth) ok = true;
        }
        return ok;
    });
    return detail::tally(hits, cfg, R);
}

// Samples z_m = r_(m)^alpha of the M nearest points of a pooled process,
// one sorted row per trial (row-major, trials x M).
inline std::vector<double> sample_nearest_powers(double lambda_T, double alpha, int M,
                                                 const SimConfig& cfg) {
    if (!(lambda_T > 0.0)) throw parse_error("sim: lambda_T must be positive");
    if (!(alpha > 0.0)) throw parse_error("sim: alpha must be positive");
    if (M < 1) throw parse_error("sim: M must be >= 1");
    detail::check_cfg(cfg);
    const double R = cfg.window_radius > 0.0 ? cfg.window_radius
                                             : auto_window_radius(lambda_T, M);
    const double area = std::numbers::pi * R * R;
    std::vector<double> out(std::size_t(cfg.trials) * std::size_t(M));

    const std::int64_t nb = block_count(cfg.trials);
    parallel_blocks(nb, [&](std::int64_t b) {
        const std::int64_t lo = b * reduction_block_size;
        const std::int64_t hi = std::min<std::int64_t>(lo + reduction_block_size, cfg.trials);
        std::vector<double> r;
        for (std::int64_t t = lo; t < hi; ++t) {
            auto eng = detail::trial_engine(cfg.seed, std::uint64_t(t));
            const std::int64_t cnt = detail::poisson_count(eng, lambda_T * area);
            if (cnt < M)
                throw window_error("sim: fewer than " + std::to_string(M) +
                                   " points in the window (radius " + std::to_string(R) + ")");
            r.resize(std::size_t(cnt));
            for (std::int64_t k = 0; k < cnt; ++k)
                r[std::size_t(k)] = R * std::sqrt(detail::uniform01(eng));
            std::partial_sort(r.begin(), r.begin() + M, r.end());
            for (int m = 0; m < M; ++m)
                out[std::size_t(t) * std::size_t(M) + std::size_t(m)] =
                    std::pow(r[std::size_t(m)], alpha);
        }
    });
    return out;
}

// Marginal density of the m-th entry (1-based):
// f_m(z) = (2 (pi lambda_T)^m / (alpha (m-1)!)) z^{2m/alpha - 1}
//          e^{-pi lambda_T z^{2/alpha}}.
inline double nearest_power_marginal_pdf(double lambda_T, double alpha, int m, double z) {
    if (!(z > 0.0)) return 0.0;
    const double plt = std::numbers::pi * lambda_T;
    double log_f = std::log(2.0 / alpha) + m * std::log(plt) - std::lgamma(double(m)) +
                   (2.0 * m / alpha - 1.0) * std::log(z) - plt * std::pow(z, 2.0 / alpha);
    return std::exp(log_f);
}

struct DistanceMarginal {
    int m = 0;                     // order-statistic index, 1-based
    std::vector<double> edges;     // bins + 1 entries
    std::vector<std::int64_t> counts;
    std::vector<double> density;   // counts / (trials * width)
    std::vector<double> analytic;  // marginal pdf at bin midpoints
};

struct JointDistanceHistograms {
    std::vector<double> samples; // trials x M row-major, each row ascending
    std::vector<DistanceMarginal> marginals;
};

// Histograms of every marginal against the analytic law, binned from 0 to the
// 99.9% quantile of the M-th marginal so all comparisons share support.
inline JointDistanceHistograms empirical_joint_distance_pdf(double lambda_T, double alpha,
                                                            int M, const SimConfig& cfg,
                                                            int bins = 40) {
    if (bins < 1) throw parse_error("sim: bins must be >= 1");
    JointDistanceHistograms out;
    out.samples = sample_nearest_powers(lambda_T, alpha, M, cfg);
    const double t_hi = boost::math::gamma_p_inv(double(M), 0.999);
    const double z_hi = std::pow(t_hi / (std::numbers::pi * lambda_T), alpha / 2.0);
    for (int m = 1; m <= M; ++m) {
        DistanceMarginal dm;
        dm.m = m;
        dm.edges.resize(std::size_t(bins) + 1);
        const double width = z_hi / bins;
        for (int b = 0; b <= bins; ++b) dm.edges[std::size_t(b)] = b * width;
        dm.counts.assign(std::size_t(bins), 0);
        for (std::int64_t t = 0; t < cfg.trials; ++t) {
            const double z = out.samples[std::size_t(t) * std::size_t(M) + std::size_t(m - 1)];
            const auto b = std::int64_t(z / width);
            if (b >= 0 && b < bins) ++dm.counts[std::size_t(b)];
        }
        dm.density.resize(std::size_t(bins));
        dm.analytic.resize(std::size_t(bins));
        for (int b = 0; b < bins; ++b) {
            dm.density[std::size_t(b)] =
                double(dm.counts[std::size_t(b)]) / (double(cfg.trials) * width);
            dm.analytic[std::size_t(b)] =
                nearest_power_marginal_pdf(lambda_T, alpha, m, (b + 0.5) * width);
        }
        out.marginals.push_back(std::move(dm));
    }
    return out;
}

} // namespace xlosh
