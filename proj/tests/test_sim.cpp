#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "xlosh/sim.hpp"
#include "xlosh/xlos.hpp"

using xlosh::Scenario;
using xlosh::SimConfig;
using xlosh::SimResult;

namespace {

std::string asset(const char* name) {
    return std::string(XLOSH_ASSET_DIR) + "/" + name;
}

Scenario udn() { return xlosh::load_scenario(asset("udn.json")); }
Scenario hetnet() { return xlosh::load_scenario(asset("hetnet.json")); }

} // namespace

TEST_CASE("automatic window radius", "[sim]") {
    SECTION("matches the gamma-quantile construction") {
        const double lt = 0.09;
        for (int M : {1, 2, 3}) {
            const double q = boost::math::gamma_p_inv(double(M) + 30.0, 1.0 - 1e-6);
            REQUIRE(xlosh::auto_window_radius(lt, M)
                    == Catch::Approx(std::sqrt(q / (std::numbers::pi * lt))).epsilon(1e-14));
        }
    }

    SECTION("grows with the monitor count and shrinks with density") {
        REQUIRE(xlosh::auto_window_radius(0.1, 2) > xlosh::auto_window_radius(0.1, 1));
        REQUIRE(xlosh::auto_window_radius(0.2, 1) < xlosh::auto_window_radius(0.1, 1));
    }

    SECTION("nonpositive pooled density is rejected") {
        REQUIRE_THROWS_AS(xlosh::auto_window_radius(0.0, 1), xlosh::parse_error);
    }
}

TEST_CASE("simulation bookkeeping", "[sim]") {
    SimConfig cfg{2000, 0.0, 99};
    SimResult r = xlosh::simulate_equivalent(udn(), 10.0, cfg);
    REQUIRE(r.trials == 2000);
    REQUIRE(r.seed == 99);
    const double lt = xlosh::derive(udn()).lambda_T;
    REQUIRE(r.window_radius == Catch::Approx(xlosh::auto_window_radius(lt, 1)).epsilon(1e-14));
    REQUIRE(r.ci95_halfwidth
            == Catch::Approx(1.96 * std::sqrt(r.estimate * (1.0 - r.estimate) / 2000.0))
                   .epsilon(1e-14));

    SECTION("an explicit window radius is carried through") {
        SimConfig wide{500, 60.0, 99};
        REQUIRE(xlosh::simulate_equivalent(udn(), 10.0, wide).window_radius == 60.0);
    }

    SECTION("runs are reproducible for a fixed seed") {
        SimResult again = xlosh::simulate_equivalent(udn(), 10.0, cfg);
        REQUIRE(again.estimate == r.estimate);
        REQUIRE(again.ci95_halfwidth == r.ci95_halfwidth);
        REQUIRE(again.window_radius == r.window_radius);
    }
}

TEST_CASE("void-probability check without shadowing", "[sim]") {
    // With sigma_K = 0 a single monitored cell succeeds iff the nearest point
    // of the pooled process falls inside a deterministic disk, so the exact
    // probability is available in closed form.
    Scenario sc = udn();
    sc.channel.sigmaK_dB = 0.0;
    const xlosh::DerivedNetwork net = xlosh::derive(sc);
    const double kth = std::pow(10.0, 0.8);
    const double c = kth * std::pow(net.Omega[0], 0.25) /
                     (net.K[0] * std::pow(std::numbers::pi * net.lambda_T, 0.25));
    const double expect = 1.0 - std::exp(-std::pow(c, -4.0));

    SimConfig cfg{100000, 0.0, 2024};
    SimResult r = xlosh::simulate_equivalent(sc, 8.0, cfg);
    REQUIRE(std::abs(r.estimate - expect) < std::max(3.0 * r.ci95_halfwidth, 0.005));
}

TEST_CASE("simulation tracks the single-cell quadrature value", "[sim]") {
    SimConfig cfg{100000, 0.0, 7};
    SimResult r = xlosh::simulate_equivalent(udn(), 10.0, cfg);
    REQUIRE(std::abs(r.estimate - 0.337395561568) < std::max(3.0 * r.ci95_halfwidth, 0.01));
}

TEST_CASE("trivially low threshold always succeeds", "[sim]") {
    SimConfig cfg{20000, 0.0, 42};
    SimResult r = xlosh::simulate_equivalent(udn(), -100.0, cfg);
    REQUIRE(r.estimate == 1.0);
    REQUIRE(r.ci95_halfwidth == 0.0);
}

TEST_CASE("shared seed nests the success sets across monitor sizes", "[sim]") {
    // A fixed window radius keeps the per-trial draw sequences identical, so
    // widening the monitor set can only add successes.
    Scenario sc = hetnet();
    const double lt = xlosh::derive(sc).lambda_T;
    const double R = xlosh::auto_window_radius(lt, 3);
    double prev = -1.0;
    for (int M : {1, 2, 3}) {
        sc.monitor_set_size = M;
        SimConfig cfg{20000, R, 5};
        SimResult r = xlosh::simulate_equivalent(sc, 5.0, cfg);
        REQUIRE(r.estimate >= prev);
        prev = r.estimate;
    }
    REQUIRE(prev > 0.0);
}

TEST_CASE("physical-domain simulation agrees when tier shadowing vanishes", "[sim]") {
    // Without per-station shadowing the displaced process is an exact rescale
    // of the physical one, so both selection rules pick the same statistics.
    Scenario sc = udn();
    sc.tiers[0].shadow_sigma_dB = 0.0;
    SimConfig cfg{50000, 0.0, 31};
    SimResult eq = xlosh::simulate_equivalent(sc, 10.0, cfg);
    SimResult ph = xlosh::simulate_physical(sc, 10.0, cfg);
    REQUIRE(std::abs(eq.estimate - ph.estimate)
            < std::max(3.0 * (eq.ci95_halfwidth + ph.ci95_halfwidth), 0.015));
}

TEST_CASE("nearest-point power samples", "[sim]") {
    const double lt = 0.1, alpha = 0.5;
    SimConfig cfg{512, 0.0, 13};
    auto z = xlosh::sample_nearest_powers(lt, alpha, 3, cfg);
    REQUIRE(z.size() == 512 * 3);

    SECTION("rows are sorted ascending") {
        for (std::size_t t = 0; t < 512; ++t) {
            REQUIRE(z[t * 3] <= z[t * 3 + 1]);
            REQUIRE(z[t * 3 + 1] <= z[t * 3 + 2]);
            REQUIRE(z[t * 3] > 0.0);
        }
    }

    SECTION("argument validation") {
        REQUIRE_THROWS_AS(xlosh::sample_nearest_powers(0.0, alpha, 1, cfg), xlosh::parse_error);
        REQUIRE_THROWS_AS(xlosh::sample_nearest_powers(lt, 0.0, 1, cfg), xlosh::parse_error);
        REQUIRE_THROWS_AS(xlosh::sample_nearest_powers(lt, alpha, 0, cfg), xlosh::parse_error);
    }
}

TEST_CASE("empirical marginals match the analytic order-statistic laws", "[sim]") {
    const double lt = 0.1, alpha = 1.0;
    SimConfig cfg{40000, 0.0, 17};
    auto hist = xlosh::empirical_joint_distance_pdf(lt, alpha, 2, cfg, 40);
    REQUIRE(hist.marginals.size() == 2);
    REQUIRE(hist.samples.size() == 40000 * 2);

    for (const auto& dm : hist.marginals) {
        REQUIRE(dm.edges.size() == 41);
        REQUIRE(dm.counts.size() == 40);
        const double width = dm.edges[1] - dm.edges[0];
        double l1 = 0.0;
        for (int b = 0; b < 40; ++b) {
            const double diff = dm.density[std::size_t(b)] - dm.analytic[std::size_t(b)];
            l1 += std::abs(diff) * width;
            // binomial fluctuation plus midpoint-rule bias
            const double sigma =
                std::sqrt(std::max(dm.analytic[std::size_t(b)] * width, 1e-4) / 40000.0) / width;
            REQUIRE(std::abs(diff) < 5.0 * sigma + 0.01);
        }
        REQUIRE(l1 < 0.05);
    }

    SECTION("the density columns integrate to roughly one") {
        for (const auto& dm : hist.marginals) {
            const double width = dm.edges[1] - dm.edges[0];
            double mass = 0.0;
            for (double d : dm.density) mass += d * width;
            REQUIRE(mass > 0.97);
            REQUIRE(mass <= 1.0);
        }
    }
}

TEST_CASE("first-marginal distribution function agreement", "[sim]") {
    // Empirical CDF of z_1 against 1 - exp(-pi lambda_T z^{2/alpha}).
    const double lt = 0.05, alpha = 0.5;
    SimConfig cfg{50000, 0.0, 23};
    auto z = xlosh::sample_nearest_powers(lt, alpha, 1, cfg);
    std::sort(z.begin(), z.end());
    double ks = 0.0;
    const double plt = std::numbers::pi * lt;
    for (std::size_t k = 0; k < z.size(); ++k) {
        const double F = 1.0 - std::exp(-plt * std::pow(z[k], 2.0 / alpha));
        ks = std::max(ks, std::abs(F - double(k + 1) / double(z.size())));
        ks = std::max(ks, std::abs(F - double(k) / double(z.size())));
    }
    REQUIRE(ks < 0.015);
}

TEST_CASE("window handling", "[sim]") {
    SECTION("a starved window raises window_error") {
        SimConfig cfg{100, 1e-6, 3};
        REQUIRE_THROWS_AS(xlosh::simulate_equivalent(udn(), 0.0, cfg), xlosh::window_error);
        REQUIRE_THROWS_AS(xlosh::sample_nearest_powers(0.1, 0.5, 1, cfg), xlosh::window_error);
    }

    SECTION("the automatic radius keeps every trial populated") {
        SimConfig cfg{50000, 0.0, 1234};
        REQUIRE_NOTHROW(xlosh::simulate_equivalent(udn(), 0.0, cfg));
    }

    SECTION("configuration validation") {
        REQUIRE_THROWS_AS(xlosh::simulate_equivalent(udn(), 0.0, SimConfig{0, 0.0, 1}),
                          xlosh::parse_error);
        REQUIRE_THROWS_AS(xlosh::simulate_equivalent(udn(), 0.0, SimConfig{10, -1.0, 1}),
                          xlosh::parse_error);
        REQUIRE_THROWS_AS(xlosh::empirical_joint_distance_pdf(0.1, 0.5, 1, SimConfig{10, 0, 1}, 0),
                          xlosh::parse_error);
    }
}
