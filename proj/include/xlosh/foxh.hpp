#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "xlosh/common.hpp"
#include "xlosh/complex_gamma.hpp"
#include "xlosh/halton.hpp"
#include "xlosh/parallel.hpp"

namespace xlosh {

// Vertical Mellin-Barnes segments: per-variable real abscissa c_i, common
// truncation half-height W, i.e. the box prod_i [c_i - iW, c_i + iW].
struct ContourSpec {
    std::vector<double> abscissa;
    double half_height = 10.0;
};

// Full parameterization of an M-variate Fox H-function. Gamma groups store
// the raw (offset; coeffs) pairs; the integrand applies the group-specific
// argument maps:
//   outer_upper_num (a; alpha)  -> Gamma(1 - a + alpha.s)        numerator
//   outer_upper_den (a'; alpha')-> Gamma(a' - alpha'.s)          denominator
//   outer_lower_den (b; beta)   -> Gamma(1 - b + beta.s)         denominator
//   per-var upper_num (c; g)    -> Gamma(1 - c + g s_i)          numerator
//   per-var upper_den (c'; g')  -> Gamma(c' - g' s_i)            denominator
//   per-var lower_num (d; dl)   -> Gamma(d - dl s_i)             numerator
//   per-var lower_den (d'; dl') -> Gamma(1 - d' + dl' s_i)       denominator
// and the kernel carries z_i^{+s_i} with prefactor (2 pi i)^{-M}.
struct FoxHParams {
    struct PerVariable {
        std::vector<GammaTerm> upper_num, upper_den, lower_num, lower_den;
    };

    int dim = 0;
    std::vector<double> z;
    std::vector<GammaTerm> outer_upper_num, outer_upper_den, outer_lower_den;
    std::vector<PerVariable> per_variable;

    void validate() const {
        if (dim < 1) throw parse_error("FoxHParams: dim must be >= 1");
        if (int(z.size()) != dim) throw parse_error("FoxHParams: z length must equal dim");
        for (double zi : z)
            if (!(zi > 0.0)) throw parse_error("FoxHParams: arguments z must be positive reals");
        auto check_outer = [&](const std::vector<GammaTerm>& g, const char* name) {
            for (const auto& t : g)
                if (int(t.coeffs.size()) != dim) {
                    throw parse_error(std::string("FoxHParams: ") + name +
                                      " coeffs length must equal dim");
                }
        };
        check_outer(outer_upper_num, "outer_upper_num");
        check_outer(outer_upper_den, "outer_upper_den");
        check_outer(outer_lower_den, "outer_lower_den");
        if (int(per_variable.size()) != dim)
            throw parse_error("FoxHParams: per_variable length must equal dim");
        std::size_t total = outer_upper_num.size() + outer_upper_den.size() + outer_lower_den.size();
        for (const auto& pv : per_variable) {
            for (const auto* g : {&pv.upper_num, &pv.upper_den, &pv.lower_num, &pv.lower_den}) {
                total += g->size();
                for (const auto& t : *g)
                    if (t.coeffs.size() != 1)
                        throw parse_error("FoxHParams: per-variable coeffs length must be 1");
            }
        }
        if (total == 0) throw parse_error("FoxHParams: at least one gamma factor required");
    }

    // Flat gamma-factor list with the group argument maps applied, so each
    // factor is Gamma(offset + coeffs.s) tagged numerator/denominator.
    std::vector<GammaTerm> resolved_terms() const {
        std::vector<GammaTerm> out;
        auto scaled = [&](const std::vector<double>& v, double f) {
            std::vector<double> r(v.size());
            for (std::size_t i = 0; i < v.size(); ++i) r[i] = f * v[i];
            return r;
        };
        auto unit = [&](int i, double f) {
            std::vector<double> r(std::size_t(dim), 0.0);
            r[std::size_t(i)] = f;
            return r;
        };
        for (const auto& t : outer_upper_num)
            out.push_back({1.0 - t.offset, scaled(t.coeffs, 1.0), gamma_sign::numerator});
        for (const auto& t : outer_upper_den)
            out.push_back({t.offset, scaled(t.coeffs, -1.0), gamma_sign::denominator});
        for (const auto& t : outer_lower_den)
            out.push_back({1.0 - t.offset, scaled(t.coeffs, 1.0), gamma_sign::denominator});
        for (int i = 0; i < dim; ++i) {
            const auto& pv = per_variable[std::size_t(i)];
            for (const auto& t : pv.upper_num)
                out.push_back({1.0 - t.offset, unit(i, t.coeffs[0]), gamma_sign::numerator});
            for (const auto& t : pv.upper_den)
                out.push_back({t.offset, unit(i, -t.coeffs[0]), gamma_sign::denominator});
            for (const auto& t : pv.lower_num)
                out.push_back({t.offset, unit(i, -t.coeffs[0]), gamma_sign::numerator});
            for (const auto& t : pv.lower_den)
                out.push_back({1.0 - t.offset, unit(i, t.coeffs[0]), gamma_sign::denominator});
        }
        return out;
    }
};

struct EvalOptions {
    std::int64_t points = 0; // 0 picks the default budget for the dimension
    int replicates = 1;
    std::uint64_t seed = 0;
};

struct EvalResult {
    cplx estimate{0.0, 0.0};
    double stderr_est = 0.0; // replicate standard error, 0 when replicates == 1
    std::int64_t points_used = 0;
};

namespace detail {

inline cplx inv_two_pi_i_pow(int m) {
    const cplx f = cplx(0.0, -1.0) / (2.0 * std::numbers::pi); // 1/(2 pi i)
    cplx p(1.0, 0.0);
    for (int k = 0; k < m; ++k) p *= f;
    return p;
}

// Log of the gamma-factor product at s, shared across arguments z.
// Returns nullopt when a denominator factor sits on a pole: the integrand
// has a removable zero there, not a singularity. A numerator factor on a
// pole means the contour itself is invalid.
inline std::optional<cplx> log_gamma_part(const std::vector<GammaTerm>& resolved,
                                          const std::vector<cplx>& s) {
    cplx acc(0.0, 0.0);
    for (const auto& t : resolved) {
        cplx arg(t.offset, 0.0);
        for (std::size_t i = 0; i < t.coeffs.size(); ++i) arg += t.coeffs[i] * s[i];
        if (near_nonpositive_integer(arg)) {
            if (t.sign == gamma_sign::denominator) return std::nullopt;
            throw contour_error("foxh: numerator gamma pole on the contour");
        }
        cplx lg = log_gamma(arg);
        acc += (t.sign == gamma_sign::numerator) ? lg : -lg;
    }
    return acc;
}

} // namespace detail

// Single-point integrand value including the (2 pi i)^{-M} prefactor and
// the z^{+s} kernel. A numerator gamma pole raises pole_error (callers see
// the precondition violation); a denominator pole yields exact zero.
inline cplx integrand(const FoxHParams& params, const std::vector<cplx>& s) {
    params.validate();
    if (s.size() != std::size_t(params.dim))
        throw parse_error("integrand: s length must equal dim");
    auto resolved = params.resolved_terms();
    cplx acc(0.0, 0.0);
    for (const auto& t : resolved) {
        cplx arg(t.offset, 0.0);
        for (std::size_t i = 0; i < t.coeffs.size(); ++i) arg += t.coeffs[i] * s[i];
        if (xlosh::detail::near_nonpositive_integer(arg)) {
            if (t.sign == gamma_sign::denominator) return cplx(0.0, 0.0);
            throw pole_error("integrand: numerator gamma factor at a pole");
        }
        cplx lg = log_gamma(arg);
        acc += (t.sign == gamma_sign::numerator) ? lg : -lg;
    }
    for (int i = 0; i < params.dim; ++i) acc += s[std::size_t(i)] * std::log(params.z[std::size_t(i)]);
    return detail::inv_two_pi_i_pow(params.dim) * std::exp(acc);
}

// QMC estimate of H over the truncated contour box for a batch of argument
// vectors sharing the gamma structure: the z-independent gamma product is
// computed once per point and reused, only prod_i z_i^{s_i} varies. With
// replicates > 1, each replicate applies an independent Cranley-Patterson
// shift and the reported stderr is the replicate standard error.
inline std::vector<EvalResult> eval_batch(const FoxHParams& params_template,
                                          const ContourSpec& contour,
                                          const std::vector<std::vector<double>>& z_list,
                                          const EvalOptions& options = {}) {
    params_template.validate();
    const int M = params_template.dim;
    if (int(contour.abscissa.size()) != M)
        throw contour_error("eval: contour dimension mismatch");
    if (!(contour.half_height > 0.0))
        throw contour_error("eval: half_height must be positive");
    if (z_list.empty()) return {};
    for (const auto& zv : z_list) {
        if (int(zv.size()) != M) throw parse_error("eval_batch: z vector dimension mismatch");
        for (double zi : zv)
            if (!(zi > 0.0)) throw parse_error("eval_batch: arguments z must be positive reals");
    }
    if (options.replicates < 1) throw parse_error("eval: replicates must be >= 1");

    const std::int64_t N = options.points > 0 ? options.points : default_point_budget(M);
    const double W = contour.half_height;
    const auto resolved = params_template.resolved_terms();
    const cplx prefactor = detail::inv_two_pi_i_pow(M);
    const std::size_t nz = z_list.size();

    std::vector<std::vector<double>> lnz(nz, std::vector<double>(std::size_t(M)));
    for (std::size_t q = 0; q < nz; ++q)
        for (int i = 0; i < M; ++i) lnz[q][std::size_t(i)] = std::log(z_list[q][std::size_t(i)]);

    cplx volume(1.0, 0.0);
    for (int i = 0; i < M; ++i) volume *= cplx(0.0, 2.0 * W);

    const PointSet base = halton_points(M, N);
    const std::int64_t nb = block_count(N);
    const int R = options.replicates;

    std::vector<std::vector<cplx>> replicate_est(nz, std::vector<cplx>(std::size_t(R)));
    for (int r = 0; r < R; ++r) {
        const PointSet pts = (R == 1) ? base
                                      : randomize(base, options.seed * 0x9e3779b97f4a7c15ULL + std::uint64_t(r) + 1);
        // block partial sums, one row per argument vector
        std::vector<std::vector<cplx>> bsums(nz, std::vector<cplx>(std::size_t(nb), cplx(0, 0)));
        parallel_blocks(nb, [&](std::int64_t b) {
            const std::int64_t lo = b * reduction_block_size;
            const std::int64_t hi = std::min<std::int64_t>(lo + reduction_block_size, N);
            std::vector<cplx> s(std::size_t(M), cplx(0.0, 0.0));
            std::vector<cplx> local(nz, cplx(0, 0));
            for (std::int64_t k = lo; k < hi; ++k) {
                for (int i = 0; i < M; ++i)
                    s[std::size_t(i)] = cplx(contour.abscissa[std::size_t(i)],
                                             W * (2.0 * pts.at(k, i) - 1.0));
                auto g = detail::log_gamma_part(resolved, s);
                if (!g) continue; // removable zero of the integrand
                for (std::size_t q = 0; q < nz; ++q) {
                    cplx e = *g;
                    for (int i = 0; i < M; ++i) e += s[std::size_t(i)] * lnz[q][std::size_t(i)];
                    cplx f = prefactor * std::exp(e);
                    if (!std::isfinite(f.real()) || !std::isfinite(f.imag()))
                        throw eval_error("eval: non-finite integrand at point " + std::to_string(k) +
                                         ", argument " + std::to_string(q));
                    local[q] += f;
                }
            }
            for (std::size_t q = 0; q < nz; ++q) bsums[q][std::size_t(b)] = local[q];
        });
        for (std::size_t q = 0; q < nz; ++q)
            replicate_est[q][std::size_t(r)] = volume * pairwise_combine(bsums[q]) / double(N);
    }

    std::vector<EvalResult> out(nz);
    for (std::size_t q = 0; q < nz; ++q) {
        cplx mean(0.0, 0.0);
        for (const cplx& e : replicate_est[q]) mean += e;
        mean /= double(R);
        double se = 0.0;
        if (R > 1) {
            double ss = 0.0;
            for (const cplx& e : replicate_est[q]) ss += std::norm(e - mean);
            se = std::sqrt(ss / (double(R) * double(R - 1)));
        }
        out[q] = {mean, se, N};
    }
    return out;
}

inline EvalResult eval(const FoxHParams& params, const ContourSpec& contour,
                       const EvalOptions& options = {}) {
    return eval_batch(params, contour, {params.z}, options)[0];
}

// ---------------------------------------------------------------------------
// Parameter file format (JSON): fields `dim`, `z`, the three outer groups as
// lists of {offset, coeffs}, `per_variable` as a list of four-group blocks,
// optional `contour` {abscissa, half_height}. Round-trips bit-exactly.

namespace detail {

inline std::vector<GammaTerm> terms_from_json(const nlohmann::json& j, const std::string& field,
                                              gamma_sign sign) {
    std::vector<GammaTerm> out;
    if (!j.contains(field)) return out;
    if (!j.at(field).is_array()) throw parse_error("foxh file: field `" + field + "` must be a list");
    for (const auto& e : j.at(field)) {
        if (!e.contains("offset")) throw parse_error("foxh file: missing `offset` in " + field);
        if (!e.contains("coeffs")) throw parse_error("foxh file: missing `coeffs` in " + field);
        GammaTerm t;
        t.offset = e.at("offset").get<double>();
        t.coeffs = e.at("coeffs").get<std::vector<double>>();
        t.sign = sign;
        out.push_back(std::move(t));
    }
    return out;
}

inline nlohmann::json terms_to_json(const std::vector<GammaTerm>& terms) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& t : terms) arr.push_back({{"offset", t.offset}, {"coeffs", t.coeffs}});
    return arr;
}

} // namespace detail

struct FoxHFile {
    FoxHParams params;
    std::optional<ContourSpec> contour;
};

inline FoxHFile foxh_from_json(const nlohmann::json& j) {
    FoxHFile f;
    if (!j.contains("dim")) throw parse_error("foxh file: missing field `dim`");
    f.params.dim = j.at("dim").get<int>();
    if (!j.contains("z")) throw parse_error("foxh file: missing field `z`");
    f.params.z = j.at("z").get<std::vector<double>>();
    f.params.outer_upper_num = detail::terms_from_json(j, "outer_upper_num", gamma_sign::numerator);
    f.params.outer_upper_den = detail::terms_from_json(j, "outer_upper_den", gamma_sign::denominator);
    f.params.outer_lower_den = detail::terms_from_json(j, "outer_lower_den", gamma_sign::denominator);
    f.params.per_variable.resize(std::size_t(f.params.dim));
    if (j.contains("per_variable")) {
        const auto& pv = j.at("per_variable");
        if (!pv.is_array() || int(pv.size()) != f.params.dim)
            throw parse_error("foxh file: `per_variable` must list one block per variable");
        for (int i = 0; i < f.params.dim; ++i) {
            const auto& blk = pv[std::size_t(i)];
            auto& dst = f.params.per_variable[std::size_t(i)];
            dst.upper_num = detail::terms_from_json(blk, "upper_num", gamma_sign::numerator);
            dst.upper_den = detail::terms_from_json(blk, "upper_den", gamma_sign::denominator);
            dst.lower_num = detail::terms_from_json(blk, "lower_num", gamma_sign::numerator);
            dst.lower_den = detail::terms_from_json(blk, "lower_den", gamma_sign::denominator);
        }
    }
    if (j.contains("contour")) {
        const auto& c = j.at("contour");
        if (!c.contains("abscissa")) throw parse_error("foxh file: contour missing `abscissa`");
        if (!c.contains("half_height")) throw parse_error("foxh file: contour missing `half_height`");
        ContourSpec cs;
        cs.abscissa = c.at("abscissa").get<std::vector<double>>();
        cs.half_height = c.at("half_height").get<double>();
        f.contour = std::move(cs);
    }
    f.params.validate();
    return f;
}

inline nlohmann::json foxh_to_json(const FoxHFile& f) {
    nlohmann::json j;
    j["dim"] = f.params.dim;
    j["z"] = f.params.z;
    j["outer_upper_num"] = detail::terms_to_json(f.params.outer_upper_num);
    j["outer_upper_den"] = detail::terms_to_json(f.params.outer_upper_den);
    j["outer_lower_den"] = detail::terms_to_json(f.params.outer_lower_den);
    nlohmann::json pv = nlohmann::json::array();
    for (const auto& blk : f.params.per_variable)
        pv.push_back({{"upper_num", detail::terms_to_json(blk.upper_num)},
                      {"upper_den", detail::terms_to_json(blk.upper_den)},
                      {"lower_num", detail::terms_to_json(blk.lower_num)},
                      {"lower_den", detail::terms_to_json(blk.lower_den)}});
    j["per_variable"] = std::move(pv);
    if (f.contour)
        j["contour"] = {{"abscissa", f.contour->abscissa},
                        {"half_height", f.contour->half_height}};
    return j;
}

inline FoxHFile load_foxh_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open foxh parameter file: " + path);
    try {
        nlohmann::json j;
        in >> j;
        return foxh_from_json(j);
    } catch (const parse_error&) {
        throw;
    } catch (const std::exception& e) {
        throw parse_error("foxh file `" + path + "`: " + e.what());
    }
}

} // namespace xlosh
