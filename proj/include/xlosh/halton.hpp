#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "xlosh/common.hpp"
#include "xlosh/complex_gamma.hpp"

namespace xlosh {

// Row-major count x dim matrix of points strictly inside (0,1).
struct PointSet {
    int dim = 0;
    std::int64_t count = 0;
    std::vector<double> pts;

    double at(std::int64_t row, int col) const { return pts[std::size_t(row) * dim + col]; }
};

namespace detail {

inline constexpr int first_primes[64] = {
      2,   3,   5,   7,  11,  13,  17,  19,  23,  29,  31,  37,  41,  43,  47,  53,
     59,  61,  67,  71,  73,  79,  83,  89,  97, 101, 103, 107, 109, 113, 127, 131,
    137, 139, 149, 151, 157, 163, 167, 173, 179, 181, 191, 193, 197, 199, 211, 223,
    227, 229, 233, 239, 241, 251, 257, 263, 269, 271, 277, 281, 283, 293, 307, 311,
};

inline double radical_inverse(std::uint64_t n, int base) {
    double inv_base = 1.0 / base, f = inv_base, r = 0.0;
    while (n > 0) {
        r += double(n % std::uint64_t(base)) * f;
        n /= std::uint64_t(base);
        f *= inv_base;
    }
    return r;
}

} // namespace detail

// Halton sequence over the first `dim` prime bases, dropping the first
// `skip` elements and keeping every (leap+1)-th thereafter. The underlying
// sequence is indexed from 1, so skip=0, leap=0 starts at 1/2 in base 2.
inline PointSet halton_points(int dim, std::int64_t count,
                              std::int64_t skip = 1000, std::int64_t leap = 100) {
    if (dim < 1 || dim > 64)
        throw parse_error("halton_points: dim must be in [1, 64]");
    if (count < 1) throw parse_error("halton_points: count must be >= 1");
    PointSet ps{dim, count, std::vector<double>(std::size_t(count) * dim)};
    for (std::int64_t k = 0; k < count; ++k) {
        std::uint64_t idx = std::uint64_t(skip) + 1 + std::uint64_t(leap + 1) * std::uint64_t(k);
        for (int d = 0; d < dim; ++d)
            ps.pts[std::size_t(k) * dim + d] = detail::radical_inverse(idx, detail::first_primes[d]);
    }
    return ps;
}

// Default point budget N = 2^8 * 3^3 * 5^(2+dim).
inline std::int64_t default_point_budget(int dim) {
    std::int64_t n = 256 * 27;
    for (int i = 0; i < 2 + dim; ++i) {
        if (n > (std::int64_t(1) << 60) / 5)
            throw eval_error("default_point_budget: overflow");
        n *= 5;
    }
    return n;
}

// The per-dimension Cranley-Patterson offsets a given seed produces.
inline std::vector<double> shift_for_seed(int dim, std::uint64_t seed) {
    std::mt19937_64 eng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::vector<double> shift(std::size_t(dim), 0.0);
    for (auto& v : shift) v = uni(eng);
    return shift;
}

// Shift modulo 1 by an explicit per-dimension offset (test hook).
inline PointSet randomize_with_shift(const PointSet& in, const std::vector<double>& shift) {
    PointSet out = in;
    for (std::int64_t k = 0; k < in.count; ++k)
        for (int d = 0; d < in.dim; ++d) {
            double v = in.at(k, d) + shift[std::size_t(d)];
            v -= std::floor(v);
            if (v <= 0.0) v = std::numeric_limits<double>::min();
            out.pts[std::size_t(k) * in.dim + d] = v;
        }
    return out;
}

// Cranley-Patterson random shift, seed-deterministic.
inline PointSet randomize(const PointSet& in, std::uint64_t seed) {
    return randomize_with_shift(in, shift_for_seed(in.dim, seed));
}

// Affine map of unit-box points onto the box [lower_i, upper_i] per
// dimension; volume is the product of (complex) side lengths.
struct MappedBox {
    std::vector<cplx> points; // row-major count x dim
    cplx volume;
};

inline MappedBox map_to_box(const PointSet& in,
                            const std::vector<cplx>& lower,
                            const std::vector<cplx>& upper) {
    MappedBox out;
    out.volume = cplx(1.0, 0.0);
    std::vector<cplx> side(std::size_t(in.dim));
    for (int d = 0; d < in.dim; ++d) {
        side[d] = upper[d] - lower[d];
        if (side[d] == cplx(0.0, 0.0))
            throw eval_error("map_to_box: degenerate box side");
        out.volume *= side[d];
    }
    out.points.resize(std::size_t(in.count) * in.dim);
    for (std::int64_t k = 0; k < in.count; ++k)
        for (int d = 0; d < in.dim; ++d)
            out.points[std::size_t(k) * in.dim + d] = lower[d] + side[d] * in.at(k, d);
    return out;
}

} // namespace xlosh
