#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "xlosh/contour.hpp"
#include "xlosh/xlos.hpp"

using xlosh::DerivedNetwork;
using xlosh::EvalOptions;
using xlosh::FoxHParams;
using xlosh::Scenario;
using xlosh::XlosQuery;
using xlosh::XlosResult;

namespace {

std::string asset(const char* name) {
    return std::string(XLOSH_ASSET_DIR) + "/" + name;
}

Scenario udn() { return xlosh::load_scenario(asset("udn.json")); }
Scenario ldn() { return xlosh::load_scenario(asset("ldn.json")); }
Scenario hetnet() { return xlosh::load_scenario(asset("hetnet.json")); }

EvalOptions reduced_budget() {
    EvalOptions o;
    o.points = 200000;
    return o;
}

} // namespace

TEST_CASE("service-probability H parameters, single monitored cell", "[xlos]") {
    DerivedNetwork net = xlosh::derive(udn());
    const double omega = 1.7;
    const double kth = std::pow(10.0, 0.5);
    FoxHParams p = xlosh::build_foxh_params(net, 0.5, {0}, &omega, kth);

    REQUIRE(p.dim == 1);
    // single outer term (1-M; alpha/2) = (0; 0.25)
    REQUIRE(p.outer_upper_num.size() == 1);
    REQUIRE(p.outer_upper_num[0].offset == 0.0);
    REQUIRE(p.outer_upper_num[0].coeffs == std::vector<double>{0.25});
    REQUIRE(p.outer_upper_den.empty());
    REQUIRE(p.outer_lower_den.empty());
    // per-variable Gamma(s)/Gamma(1+s) kernel
    REQUIRE(p.per_variable[0].upper_num.size() == 1);
    REQUIRE(p.per_variable[0].upper_num[0].offset == 1.0);
    REQUIRE(p.per_variable[0].lower_den.size() == 1);
    REQUIRE(p.per_variable[0].lower_den[0].offset == 0.0);
    REQUIRE(p.per_variable[0].lower_num.empty());
    REQUIRE(p.per_variable[0].upper_den.empty());

    double expect_z = kth * std::pow(net.Lambda[0], 0.25) / (omega * net.K[0]);
    REQUIRE(p.z[0] == Catch::Approx(expect_z).epsilon(1e-14));
}

TEST_CASE("service-probability H parameters, two monitored cells", "[xlos]") {
    DerivedNetwork net = xlosh::derive(hetnet());
    const double om[2] = {1.0, 2.0};
    FoxHParams p = xlosh::build_foxh_params(net, 0.5, {0, 1}, om, 1.0);

    REQUIRE(p.dim == 2);
    REQUIRE(p.outer_upper_num.size() == 2);
    // indicator family i=1: (1 - 2/alpha; 1,0) = (-3; 1,0)
    REQUIRE(p.outer_upper_num[0].offset == -3.0);
    REQUIRE(p.outer_upper_num[0].coeffs == std::vector<double>{1.0, 0.0});
    // closing term (1-M; alpha/2, alpha/2) = (-1; 0.25, 0.25)
    REQUIRE(p.outer_upper_num[1].offset == -1.0);
    REQUIRE(p.outer_upper_num[1].coeffs == std::vector<double>{0.25, 0.25});
    // matching denominator family (-2/alpha; 1,0) = (-4; 1,0)
    REQUIRE(p.outer_lower_den.size() == 1);
    REQUIRE(p.outer_lower_den[0].offset == -4.0);
    REQUIRE(p.outer_lower_den[0].coeffs == std::vector<double>{1.0, 0.0});

    REQUIRE(p.z[0] == Catch::Approx(std::pow(net.Lambda[0], 0.25) / net.K[0]).epsilon(1e-14));
    REQUIRE(p.z[1]
            == Catch::Approx(std::pow(net.Lambda[1], 0.25) / (2.0 * net.K[1])).epsilon(1e-14));
}

TEST_CASE("planned contours sit at abscissa 0.1", "[xlos]") {
    DerivedNetwork net1 = xlosh::derive(udn());
    DerivedNetwork net2 = xlosh::derive(hetnet());
    const double om[3] = {1.0, 1.0, 1.0};

    FoxHParams p1 = xlosh::build_foxh_params(net1, 0.5, {0}, om, 1.0);
    auto c1 = xlosh::plan_contour(p1);
    REQUIRE(c1.abscissa[0] == Catch::Approx(0.1).margin(1e-9));

    FoxHParams p2 = xlosh::build_foxh_params(net2, 0.5, {0, 1}, om, 1.0);
    auto c2 = xlosh::plan_contour(p2);
    REQUIRE(c2.abscissa[0] == Catch::Approx(0.1).margin(1e-9));
    REQUIRE(c2.abscissa[1] == Catch::Approx(0.1).margin(1e-9));

    FoxHParams p3 = xlosh::build_foxh_params(net2, 0.5, {0, 1, 1}, om, 1.0);
    auto c3 = xlosh::plan_contour(p3);
    for (double c : c3.abscissa) REQUIRE(c == Catch::Approx(0.1).margin(1e-9));
}

TEST_CASE("closed form tracks the independent single-cell oracle", "[xlos]") {
    // frozen quadrature references for the dense single-tier scenario
    const struct { double kth_dB, ref; } table[] = {
        {-5.0, 0.999990}, {0.0, 0.996328}, {5.0, 0.867068},
        {10.0, 0.337396}, {15.0, 0.029789}, {20.0, 0.000655},
    };
    Scenario sc = udn();
    for (const auto& row : table) {
        CAPTURE(row.kth_dB);
        REQUIRE(xlosh::xlos_oracle_m1(sc, row.kth_dB)
                == Catch::Approx(row.ref).margin(1e-5));
        XlosQuery q{sc, row.kth_dB, 0, reduced_budget(), 10.0};
        XlosResult r = xlosh::xlos_closed_form(q);
        REQUIRE(std::abs(r.probability - row.ref) < 0.02);
    }
}

TEST_CASE("closed form regression pin at the default budget", "[xlos]") {
    XlosQuery q{udn(), 10.0, 0, {}, 10.0};
    XlosResult r = xlosh::xlos_closed_form(q);
    REQUIRE(r.probability == Catch::Approx(0.336117732897).margin(1e-7));
    REQUIRE(r.method == xlosh::xlos_method::closed_form);
    REQUIRE(r.diagnostics.raw == r.probability); // no clamping active here
    REQUIRE(r.diagnostics.h_stderr.size() == 16); // one tier assignment x order 16
    REQUIRE(r.diagnostics.stderr_total == 0.0);   // single replicate
}

TEST_CASE("oracle regression pins", "[xlos]") {
    REQUIRE(xlosh::xlos_oracle_m1(udn(), 10.0)
            == Catch::Approx(0.337395561568).margin(1e-9));
    REQUIRE(xlosh::xlos_oracle_m1(ldn(), -5.0)
            == Catch::Approx(0.381882104466).margin(1e-9));
}

TEST_CASE("oracle degenerate and limiting cases", "[xlos]") {
    SECTION("zero shadowing collapses to the void-probability form") {
        Scenario sc = udn();
        sc.channel.sigmaK_dB = 0.0;
        DerivedNetwork net = xlosh::derive(sc);
        const double kth = std::pow(10.0, 0.8);
        const double c = kth * std::pow(net.Omega[0], 0.25) /
                         (net.K[0] * std::pow(std::numbers::pi * net.lambda_T, 0.25));
        double expect = 1.0 - std::exp(-std::pow(c, -4.0));
        REQUIRE(xlosh::xlos_oracle_m1(sc, 8.0) == Catch::Approx(expect).epsilon(1e-12));
    }

    SECTION("huge threshold starves the probability") {
        REQUIRE(xlosh::xlos_oracle_m1(udn(), 60.0) < 1e-6);
    }

    SECTION("multi-cell scenarios are rejected") {
        REQUIRE_THROWS_AS(xlosh::xlos_oracle_m1(hetnet(), 0.0), xlosh::incompatible_error);
    }
}

TEST_CASE("asymptotic regimes", "[xlos]") {
    SECTION("low-ratio limit is exactly one") {
        XlosQuery q{udn(), -60.0, 0, {}, 10.0};
        XlosResult r = xlosh::xlos_asymptotic(q, xlosh::asym_regime::low);
        REQUIRE(r.probability == 1.0);
        REQUIRE(r.diagnostics.raw == 1.0);
        REQUIRE(r.method == xlosh::xlos_method::asymptotic_low);
    }

    SECTION("high-ratio tail follows the exact power law before clamping") {
        XlosQuery q20{udn(), 20.0, 0, {}, 10.0};
        XlosQuery q30{udn(), 30.0, 0, {}, 10.0};
        double r20 = xlosh::xlos_asymptotic(q20, xlosh::asym_regime::high).diagnostics.raw;
        double r30 = xlosh::xlos_asymptotic(q30, xlosh::asym_regime::high).diagnostics.raw;
        // slope -2/alpha = -4 per decade of linear threshold
        REQUIRE(r30 / r20 == Catch::Approx(1e-4).epsilon(1e-10));
    }

    SECTION("tail value regression pin") {
        XlosQuery q{ldn(), 20.0, 0, {}, 10.0};
        XlosResult r = xlosh::xlos_asymptotic(q, xlosh::asym_regime::high);
        REQUIRE(r.diagnostics.raw == Catch::Approx(1.065664734833e-9).epsilon(1e-9));
        REQUIRE(r.probability == r.diagnostics.raw); // below 1, no clamp
    }

    SECTION("raw value above one is clamped but preserved") {
        XlosQuery q{udn(), -20.0, 0, {}, 10.0};
        XlosResult r = xlosh::xlos_asymptotic(q, xlosh::asym_regime::high);
        REQUIRE(r.probability == 1.0);
        REQUIRE(r.diagnostics.raw > 1.0);
    }
}

TEST_CASE("monitoring more cells can only help", "[xlos]") {
    Scenario two = hetnet();
    Scenario one = two;
    one.monitor_set_size = 1;
    XlosQuery q1{one, 5.0, 8, reduced_budget(), 10.0};
    XlosQuery q2{two, 5.0, 8, reduced_budget(), 10.0};
    double p1 = xlosh::xlos_closed_form(q1).probability;
    double p2 = xlosh::xlos_closed_form(q2).probability;
    REQUIRE(p2 >= p1 - 0.02);
    // frozen pins for the reduced-budget configuration
    REQUIRE(p1 == Catch::Approx(0.130047).margin(5e-4));
    REQUIRE(p2 == Catch::Approx(0.184522).margin(5e-4));
}

TEST_CASE("replicates propagate into the diagnostics", "[xlos]") {
    EvalOptions opt;
    opt.points = 50000;
    opt.replicates = 3;
    opt.seed = 11;
    XlosQuery q{udn(), 10.0, 0, opt, 10.0};
    XlosResult r = xlosh::xlos_closed_form(q);
    REQUIRE(r.diagnostics.stderr_total > 0.0);
    REQUIRE(r.diagnostics.h_stderr.size() == 16);
    for (double se : r.diagnostics.h_stderr) REQUIRE(se >= 0.0);
    // clamped probability still inside the unit interval
    REQUIRE(r.probability >= 0.0);
    REQUIRE(r.probability <= 1.0);
}

TEST_CASE("query validation", "[xlos]") {
    SECTION("cubature order below two") {
        XlosQuery q{udn(), 0.0, 1, {}, 10.0};
        REQUIRE_THROWS_AS(xlosh::xlos_closed_form(q), xlosh::parse_error);
    }

    SECTION("monitor set larger than the supported cap") {
        Scenario sc = hetnet();
        sc.monitor_set_size = 4;
        XlosQuery q{sc, 0.0, 0, {}, 10.0};
        REQUIRE_THROWS_AS(xlosh::xlos_closed_form(q), xlosh::incompatible_error);
        REQUIRE_THROWS_AS(xlosh::xlos_asymptotic(q, xlosh::asym_regime::high),
                          xlosh::incompatible_error);
    }

    SECTION("default cubature order by dimension") {
        REQUIRE(xlosh::default_cubature_order(1) == 16);
        REQUIRE(xlosh::default_cubature_order(2) == 16);
        REQUIRE(xlosh::default_cubature_order(3) == 8);
    }
}

TEST_CASE("threshold sweep", "[xlos]") {
    Scenario sc = udn();

    SECTION("single point, single method") {
        auto rows = xlosh::sweep(sc, {10.0}, {xlosh::xlos_method::oracle_m1});
        REQUIRE(rows.size() == 1);
        REQUIRE(rows[0].K_th_dB == 10.0);
        REQUIRE(rows[0].result.probability == Catch::Approx(0.337395561568).margin(1e-9));
    }

    SECTION("grid-major ordering over methods") {
        auto rows = xlosh::sweep(sc, {0.0, 5.0},
                                 {xlosh::xlos_method::asymptotic_high,
                                  xlosh::xlos_method::oracle_m1});
        REQUIRE(rows.size() == 4);
        REQUIRE(rows[0].K_th_dB == 0.0);
        REQUIRE(rows[0].result.method == xlosh::xlos_method::asymptotic_high);
        REQUIRE(rows[1].K_th_dB == 0.0);
        REQUIRE(rows[1].result.method == xlosh::xlos_method::oracle_m1);
        REQUIRE(rows[2].K_th_dB == 5.0);
        REQUIRE(rows[3].result.method == xlosh::xlos_method::oracle_m1);
    }

    SECTION("probability is nonincreasing in the threshold") {
        auto rows = xlosh::sweep(sc, {0.0, 5.0, 10.0, 15.0},
                                 {xlosh::xlos_method::closed_form}, 0, reduced_budget());
        for (std::size_t k = 1; k < rows.size(); ++k)
            REQUIRE(rows[k].result.probability
                    <= rows[k - 1].result.probability + 0.01);
    }

    SECTION("degenerate requests are rejected") {
        REQUIRE_THROWS_AS(xlosh::sweep(sc, {}, {xlosh::xlos_method::oracle_m1}),
                          xlosh::parse_error);
        REQUIRE_THROWS_AS(xlosh::sweep(sc, {1.0}, {}), xlosh::parse_error);
    }
}
