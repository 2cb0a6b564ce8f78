// Command-line front end: Fox H evaluation and contour planning, XLOS service
// probability sweeps (closed form, asymptotics, simulation, 1-D oracle), and
// cubature inspection. Every run writes a manifest sufficient to reproduce
// its outputs bit-for-bit.

#include <chrono>
#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "xlosh/contour.hpp"
#include "xlosh/cubature.hpp"
#include "xlosh/foxh.hpp"
#include "xlosh/manifest.hpp"
#include "xlosh/network.hpp"
#include "xlosh/sim.hpp"
#include "xlosh/xlos.hpp"

namespace {

using namespace xlosh;

std::string fmt_g(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string fmt_signed(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%+.10g", v);
    return buf;
}

std::string contour_lines(const ContourSpec& c) {
    std::string out;
    char buf[128];
    for (double a : c.abscissa) {
        std::snprintf(buf, sizeof buf, "%.4f %+.4fi  %.4f %+.4fi\n", a, -c.half_height, a,
                      c.half_height);
        out += buf;
    }
    return out;
}

// Grid syntax: a single number, or a:b:step inclusive of both endpoints
// within 1e-9.
std::vector<double> parse_grid(const std::string& text) {
    auto number = [](const std::string& s) {
        std::size_t pos = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &pos);
        } catch (const std::exception&) {
            throw parse_error("grid: `" + s + "` is not a number");
        }
        if (pos != s.size()) throw parse_error("grid: `" + s + "` is not a number");
        return v;
    };
    std::vector<std::string> parts;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= text.size(); ++i) {
        if (i == text.size() || text[i] == ':') {
            parts.push_back(text.substr(start, i - start));
            start = i + 1;
        }
    }
    if (parts.size() == 1) return {number(parts[0])};
    if (parts.size() != 3) throw parse_error("grid: expected `a:b:step` or a single number");
    const double a = number(parts[0]), b = number(parts[1]), step = number(parts[2]);
    if (step == 0.0) throw parse_error("grid: step must be nonzero");
    std::vector<double> g;
    for (std::int64_t k = 0;; ++k) {
        const double v = a + double(k) * step;
        if (step > 0.0 ? v > b + 1e-9 : v < b - 1e-9) break;
        g.push_back(v);
        if (g.size() > 1000000) throw parse_error("grid: too many points");
    }
    if (g.empty()) throw parse_error("grid: empty range");
    return g;
}

ContourSpec load_contour_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open contour file: " + path);
    try {
        nlohmann::json j;
        in >> j;
        const nlohmann::json& c = j.contains("contour") ? j.at("contour") : j;
        if (!c.contains("abscissa")) throw parse_error("contour file: missing `abscissa`");
        ContourSpec spec;
        spec.abscissa = c.at("abscissa").get<std::vector<double>>();
        if (c.contains("half_height")) spec.half_height = c.at("half_height").get<double>();
        return spec;
    } catch (const parse_error&) {
        throw;
    } catch (const std::exception& e) {
        throw parse_error("contour file `" + path + "`: " + e.what());
    }
}

void emit(const std::string& content, const std::string& out_path) {
    if (out_path.empty()) {
        std::fputs(content.c_str(), stdout);
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw eval_error("cannot write output file: " + out_path);
    out << content;
    std::printf("wrote %s\n", out_path.c_str());
}

std::string manifest_path_for(const std::string& explicit_path, const std::string& out_path,
                              const std::string& subcommand) {
    if (!explicit_path.empty()) return explicit_path;
    if (!out_path.empty()) return out_path + ".manifest.json";
    return subcommand + ".manifest.json";
}

struct CommonArgs {
    std::vector<std::string> argv;
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

    void finish(RunManifest& man, const std::string& path) const {
        man.argv = argv;
        man.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        man.write(path);
    }
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"multivariate Fox H evaluation and XLOS service probability toolkit"};
    app.require_subcommand(1);
    CommonArgs common;
    common.argv.assign(argv, argv + argc);

    // ---- foxh-eval ----------------------------------------------------
    std::string fe_params, fe_contour, fe_manifest;
    std::int64_t fe_points = 0;
    int fe_replicates = 1;
    std::uint64_t fe_seed = 0;
    double fe_height = 10.0;
    auto* fe = app.add_subcommand("foxh-eval", "evaluate an H-function parameter file");
    fe->add_option("params", fe_params, "parameter file (JSON)")->required();
    fe->add_option("--contour", fe_contour, "contour file overriding any embedded contour");
    auto* fe_height_opt =
        fe->add_option("--height", fe_height, "contour half-height W (overrides file values)");
    fe->add_option("--points", fe_points, "QMC point budget (0 = dimension default)");
    fe->add_option("--replicates", fe_replicates, "randomized replicates for error bars");
    fe->add_option("--seed", fe_seed, "seed for replicate randomization");
    fe->add_option("--manifest", fe_manifest, "manifest path");

    // ---- foxh-contour -------------------------------------------------
    std::string fc_params, fc_manifest;
    double fc_height = 10.0, fc_epsilon = contour_epsilon_default;
    auto* fc = app.add_subcommand("foxh-contour", "plan an integration contour");
    fc->add_option("params", fc_params, "parameter file (JSON)")->required();
    fc->add_option("--height", fc_height, "contour half-height W");
    fc->add_option("--epsilon", fc_epsilon, "pole clearance epsilon");
    fc->add_option("--manifest", fc_manifest, "manifest path");

    // ---- xlos ----------------------------------------------------------
    std::string xl_scenario, xl_kth, xl_method = "closed", xl_out, xl_manifest;
    std::int64_t xl_trials = 100000, xl_points = 0;
    int xl_order = 0, xl_replicates = 1;
    std::uint64_t xl_seed = 0;
    double xl_height = 10.0, xl_radius = 0.0;
    auto* xl = app.add_subcommand("xlos", "XLOS service probability over a threshold grid");
    xl->add_option("scenario", xl_scenario, "scenario file (JSON)")->required();
    xl->add_option("--kth", xl_kth, "threshold grid in dB: `a:b:step` or a number")->required();
    xl->add_option("--method", xl_method, "closed | asym-low | asym-high | sim | oracle-m1")
        ->check(CLI::IsMember({"closed", "asym-low", "asym-high", "sim", "oracle-m1"}));
    xl->add_option("--trials", xl_trials, "simulation trials");
    xl->add_option("--seed", xl_seed, "seed for simulation / QMC replicates");
    xl->add_option("--order", xl_order, "cubature order per dimension (0 = default)");
    xl->add_option("--points", xl_points, "QMC point budget (0 = dimension default)");
    xl->add_option("--replicates", xl_replicates, "QMC replicates for error bars");
    xl->add_option("--height", xl_height, "contour half-height W");
    xl->add_option("--radius", xl_radius, "simulation window radius (0 = auto)");
    xl->add_option("--out", xl_out, "CSV output path (stdout when omitted)");
    xl->add_option("--manifest", xl_manifest, "manifest path");

    // ---- cubature-dump --------------------------------------------------
    int cd_M = 0, cd_order = 0;
    std::string cd_out, cd_manifest;
    auto* cd = app.add_subcommand("cubature-dump", "dump cubature weights and abscissas");
    cd->add_option("M", cd_M, "dimension")->required();
    cd->add_option("order", cd_order, "points per dimension")->required();
    cd->add_option("--out", cd_out, "CSV output path (stdout when omitted)");
    cd->add_option("--manifest", cd_manifest, "manifest path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (fe->parsed()) {
            RunManifest man;
            man.add_input(fe_params);
            const FoxHFile file = load_foxh_file(fe_params);
            ContourSpec contour;
            bool planned = false;
            if (!fe_contour.empty()) {
                man.add_input(fe_contour);
                contour = load_contour_file(fe_contour);
                if (fe_height_opt->count() > 0) contour.half_height = fe_height;
            } else if (file.contour) {
                contour = *file.contour;
                if (fe_height_opt->count() > 0) contour.half_height = fe_height;
            } else {
                contour = plan_contour(file.params, fe_height);
                planned = true;
            }
            if (planned) {
                std::printf("planned contour:\n%s", contour_lines(contour).c_str());
            }
            const EvalOptions opts{fe_points, fe_replicates, fe_seed};
            const EvalResult r = eval(file.params, contour, opts);
            std::printf("H = %s %si\n", fmt_g(r.estimate.real()).c_str(),
                        fmt_signed(r.estimate.imag()).c_str());
            std::printf("stderr = %s\n", fmt_g(r.stderr_est).c_str());
            std::printf("points = %" PRId64 "  replicates = %d  seed = %" PRIu64 "\n",
                        r.points_used, fe_replicates, fe_seed);
            man.seed = fe_seed;
            man.budgets["points"] = double(r.points_used);
            man.budgets["replicates"] = fe_replicates;
            man.budgets["height"] = contour.half_height;
            common.finish(man, manifest_path_for(fe_manifest, "", "foxh-eval"));
            return 0;
        }

        if (fc->parsed()) {
            RunManifest man;
            man.add_input(fc_params);
            const FoxHFile file = load_foxh_file(fc_params);
            const ContourSpec contour = plan_contour(file.params, fc_height, fc_epsilon);
            std::fputs(contour_lines(contour).c_str(), stdout);
            man.budgets["height"] = fc_height;
            man.budgets["epsilon"] = fc_epsilon;
            common.finish(man, manifest_path_for(fc_manifest, "", "foxh-contour"));
            return 0;
        }

        if (xl->parsed()) {
            RunManifest man;
            man.add_input(xl_scenario);
            const Scenario sc = load_scenario(xl_scenario);
            const std::vector<double> grid = parse_grid(xl_kth);
            const EvalOptions opts{xl_points, xl_replicates, xl_seed};

            std::string csv = "k_th_dB,method,p_xlos,stderr,ci95,seed\n";
            auto row = [&](double kdb, const std::string& method, double p, double se,
                           double ci) {
                char buf[256];
                std::snprintf(buf, sizeof buf, "%s,%s,%s,%s,%s,%" PRIu64 "\n",
                              fmt_g(kdb).c_str(), method.c_str(), fmt_g(p).c_str(),
                              fmt_g(se).c_str(), fmt_g(ci).c_str(), xl_seed);
                csv += buf;
            };

            if (xl_method == "sim") {
                const SimConfig cfg{xl_trials, xl_radius, xl_seed};
                for (double kdb : grid) {
                    const SimResult r = simulate_equivalent(sc, kdb, cfg);
                    row(kdb, "sim", r.estimate, r.ci95_halfwidth / 1.96, r.ci95_halfwidth);
                }
                man.budgets["trials"] = double(xl_trials);
            } else {
                xlos_method m = xlos_method::closed_form;
                if (xl_method == "asym-low") m = xlos_method::asymptotic_low;
                else if (xl_method == "asym-high") m = xlos_method::asymptotic_high;
                else if (xl_method == "oracle-m1") m = xlos_method::oracle_m1;
                const auto rows = sweep(sc, grid, {m}, xl_order, opts, xl_height);
                for (const auto& r : rows) {
                    const double se = r.result.diagnostics.stderr_total;
                    row(r.K_th_dB, method_token(r.result.method), r.result.probability, se,
                        1.96 * se);
                }
                man.budgets["order"] =
                    double(xl_order ? xl_order : default_cubature_order(sc.monitor_set_size));
                if (m == xlos_method::closed_form) {
                    man.budgets["points"] = double(
                        xl_points ? xl_points : default_point_budget(sc.monitor_set_size));
                    man.budgets["replicates"] = xl_replicates;
                    man.budgets["height"] = xl_height;
                }
            }
            emit(csv, xl_out);
            man.seed = xl_seed;
            common.finish(man, manifest_path_for(xl_manifest, xl_out, "xlos"));
            return 0;
        }

        if (cd->parsed()) {
            RunManifest man;
            const Cubature cub = product_gauss_hermite(cd_M, cd_order);
            std::string csv = "l,w";
            for (int m = 1; m <= cd_M; ++m) csv += ",u_" + std::to_string(m);
            csv += "\n";
            char buf[64];
            for (std::int64_t l = 0; l < cub.count; ++l) {
                std::snprintf(buf, sizeof buf, "%" PRId64, l + 1);
                csv += buf;
                std::snprintf(buf, sizeof buf, ",%.17g", cub.w[std::size_t(l)]);
                csv += buf;
                for (int m = 0; m < cd_M; ++m) {
                    std::snprintf(buf, sizeof buf, ",%.17g", cub.node(l, m));
                    csv += buf;
                }
                csv += "\n";
            }
            emit(csv, cd_out);
            man.budgets["M"] = cd_M;
            man.budgets["order"] = cd_order;
            common.finish(man, manifest_path_for(cd_manifest, cd_out, "cubature-dump"));
            return 0;
        }
    } catch (const parse_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const contour_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const incompatible_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 5;
    } catch (const std::exception& e) {
        // pole, window, evaluation, and any unexpected failures
        std::fprintf(stderr, "error: %s\n", e.what());
        return 4;
    }
    return 2;
}
