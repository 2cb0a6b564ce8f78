#pragma once

#include <cmath>
#include <fstream>
#include <numbers>
#include <string>
#include <vector>

#include <json.hpp>

#include "xlosh/common.hpp"

namespace xlosh {

// Channel-level model: path loss nu, K-factor distance exponent alpha,
// K-factor intercept calibration (K0 at reference height h0 / beamwidth
// theta0, exponents kappa1 > 0 and kappa2 < 0), and the K-factor shadowing
// spread sigmaK in dB. The seasonal multiplier on K0 defaults to 1.
struct ChannelModel {
    double nu = 3.0;
    double alpha = 0.5;
    double kappa1 = 0.46;
    double kappa2 = -0.62;
    double K0 = 10.0;
    double h0_m = 3.0;
    double theta0_deg = 17.0;
    double sigmaK_dB = 3.0;
    double seasonal = 1.0;
};

struct TierConfig {
    double lambda = 0.0;        // deployment density, points per unit area
    double power_dBm = 0.0;     // per-RE transmit power
    double height_m = 0.0;
    double beamwidth_deg = 0.0;
    double shadow_mu_dB = 0.0;
    double shadow_sigma_dB = 0.0;
};

struct Scenario {
    ChannelModel channel;
    std::vector<TierConfig> tiers;
    int monitor_set_size = 1;

    void validate() const {
        if (tiers.empty()) throw parse_error("scenario: at least one tier required");
        if (monitor_set_size < 1) throw parse_error("scenario: monitor_set_size must be >= 1");
        if (!(channel.nu > 0.0)) throw parse_error("scenario: nu must be positive");
        if (!(channel.alpha > 0.0)) throw parse_error("scenario: alpha must be positive");
        if (!(channel.kappa1 > 0.0)) throw parse_error("scenario: kappa1 must be positive");
        if (!(channel.kappa2 < 0.0)) throw parse_error("scenario: kappa2 must be negative");
        if (!(channel.K0 > 0.0)) throw parse_error("scenario: K0 must be positive");
        for (const auto& t : tiers) {
            if (!(t.lambda > 0.0)) throw parse_error("scenario: tier lambda must be positive");
            if (!(t.height_m > 0.0)) throw parse_error("scenario: tier height must be positive");
            if (!(t.beamwidth_deg > 0.0 && t.beamwidth_deg <= 360.0))
                throw parse_error("scenario: tier beamwidth must be in (0, 360]");
        }
    }
};

// Equivalent-network quantities: per-tier displaced densities and the
// K-factor intercepts, plus the pooled density lambda_T.
struct DerivedNetwork {
    std::vector<double> Omega, lambda_tilde, rho, K, Lambda;
    double lambda_T = 0.0;
};

// E[X^{2/nu}] for X lognormal with 10 log10 X ~ N(mu, sigma^2), i.e.
// exp((ln10/5) mu/nu + (1/2)((ln10/5) sigma/nu)^2).
inline double fractional_moment(double mu_dB, double sigma_dB, double nu) {
    if (!(nu > 0.0)) throw parse_error("fractional_moment: nu must be positive");
    const double c = std::numbers::ln10 / 5.0;
    double a = c * mu_dB / nu;
    double b = c * sigma_dB / nu;
    return std::exp(a + 0.5 * b * b);
}

// K-factor intercept K_n = K0 (h/h0)^{kappa1} (theta/theta0)^{kappa2},
// kappa2 negative so wider beams lower it.
inline double k_intercept(const TierConfig& tier, const ChannelModel& ch) {
    return ch.seasonal * ch.K0 * std::pow(tier.height_m / ch.h0_m, ch.kappa1) *
           std::pow(tier.beamwidth_deg / ch.theta0_deg, ch.kappa2);
}

inline DerivedNetwork derive(const Scenario& sc) {
    sc.validate();
    DerivedNetwork d;
    const std::size_t N = sc.tiers.size();
    d.Omega.resize(N);
    d.lambda_tilde.resize(N);
    d.rho.resize(N);
    d.K.resize(N);
    d.Lambda.resize(N);
    for (std::size_t n = 0; n < N; ++n) {
        const auto& t = sc.tiers[n];
        double p_lin = std::pow(10.0, t.power_dBm / 10.0); // linear milliwatts
        d.Omega[n] = std::pow(p_lin, 2.0 / sc.channel.nu) *
                     fractional_moment(t.shadow_mu_dB, t.shadow_sigma_dB, sc.channel.nu);
        d.lambda_tilde[n] = t.lambda * d.Omega[n];
        d.K[n] = k_intercept(t, sc.channel);
        d.lambda_T += d.lambda_tilde[n];
    }
    for (std::size_t n = 0; n < N; ++n) {
        d.rho[n] = d.lambda_tilde[n] / d.lambda_T;
        d.Lambda[n] = d.Omega[n] / (std::numbers::pi * d.lambda_T);
    }
    return d;
}

// Scenario file (JSON): {"channel": {...}, "tiers": [...], "monitor_set_size": M}.
inline Scenario scenario_from_json(const nlohmann::json& j) {
    Scenario sc;
    if (!j.contains("channel")) throw parse_error("scenario file: missing field `channel`");
    if (!j.contains("tiers")) throw parse_error("scenario file: missing field `tiers`");
    if (!j.contains("monitor_set_size"))
        throw parse_error("scenario file: missing field `monitor_set_size`");
    const auto& c = j.at("channel");
    auto grab = [&](const nlohmann::json& o, const char* k, const char* where) {
        if (!o.contains(k))
            throw parse_error(std::string("scenario file: missing field `") + k + "` in " + where);
        return o.at(k).get<double>();
    };
    sc.channel.nu = grab(c, "nu", "channel");
    sc.channel.alpha = grab(c, "alpha", "channel");
    sc.channel.kappa1 = grab(c, "kappa1", "channel");
    sc.channel.kappa2 = grab(c, "kappa2", "channel");
    sc.channel.K0 = grab(c, "K0", "channel");
    sc.channel.h0_m = grab(c, "h0_m", "channel");
    sc.channel.theta0_deg = grab(c, "theta0_deg", "channel");
    sc.channel.sigmaK_dB = grab(c, "sigmaK_dB", "channel");
    if (c.contains("seasonal")) sc.channel.seasonal = c.at("seasonal").get<double>();
    for (const auto& tj : j.at("tiers")) {
        TierConfig t;
        t.lambda = grab(tj, "lambda", "tier");
        t.power_dBm = grab(tj, "power_dBm", "tier");
        t.height_m = grab(tj, "height_m", "tier");
        t.beamwidth_deg = grab(tj, "beamwidth_deg", "tier");
        t.shadow_mu_dB = grab(tj, "shadow_mu_dB", "tier");
        t.shadow_sigma_dB = grab(tj, "shadow_sigma_dB", "tier");
        sc.tiers.push_back(t);
    }
    sc.monitor_set_size = j.at("monitor_set_size").get<int>();
    sc.validate();
    return sc;
}

inline Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open scenario file: " + path);
    try {
        nlohmann::json j;
        in >> j;
        return scenario_from_json(j);
    } catch (const parse_error&) {
        throw;
    } catch (const std::exception& e) {
        throw parse_error("scenario file `" + path + "`: " + e.what());
    }
}

} // namespace xlosh
