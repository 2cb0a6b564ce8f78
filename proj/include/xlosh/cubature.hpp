#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "xlosh/common.hpp"

namespace xlosh {

// Gaussian-weight monomial cubature: L weights and L x M abscissas against
// weight exp(-|u|^2), built as a product Gauss-Hermite rule. Weight sum is
// pi^{M/2}.
struct Cubature {
    int dim = 0;
    std::int64_t count = 0;
    std::vector<double> w;       // length L
    std::vector<double> u;       // row-major L x M

    double node(std::int64_t l, int m) const { return u[std::size_t(l) * dim + m]; }
};

struct LognormalSpec {
    double mu_dB = 0.0;
    double sigma_dB = 0.0;
};

// 1-D Gauss-Hermite rule (weight e^{-x^2}) by Golub-Welsch: eigenvalues of
// the symmetric tridiagonal Jacobi matrix give the nodes, squared first
// eigenvector components scaled by sqrt(pi) give the weights.
inline void gauss_hermite_1d(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    if (n < 1) throw parse_error("gauss_hermite: order must be >= 1");
    if (n == 1) {
        nodes = {0.0};
        weights = {std::sqrt(std::numbers::pi)};
        return;
    }
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) {
        double off = std::sqrt(k / 2.0);
        J(k - 1, k) = off;
        J(k, k - 1) = off;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    nodes.resize(std::size_t(n));
    weights.resize(std::size_t(n));
    const double sqrt_pi = std::sqrt(std::numbers::pi);
    for (int k = 0; k < n; ++k) {
        nodes[std::size_t(k)] = es.eigenvalues()(k);
        double v0 = es.eigenvectors()(0, k);
        weights[std::size_t(k)] = sqrt_pi * v0 * v0;
    }
}

// Product rule over M dimensions, order n per dimension, L = n^M nodes.
// The last coordinate cycles fastest.
inline Cubature product_gauss_hermite(int M, int n) {
    if (M < 1 || M > 6) throw parse_error("product_gauss_hermite: dim must be in [1, 6]");
    if (n < 1 || n > 64) throw parse_error("product_gauss_hermite: order must be in [1, 64]");
    std::vector<double> nodes, weights;
    gauss_hermite_1d(n, nodes, weights);
    Cubature cub;
    cub.dim = M;
    cub.count = 1;
    for (int m = 0; m < M; ++m) cub.count *= n;
    cub.w.resize(std::size_t(cub.count));
    cub.u.resize(std::size_t(cub.count) * M);
    for (std::int64_t l = 0; l < cub.count; ++l) {
        double wl = 1.0;
        std::int64_t rem = l;
        for (int m = M - 1; m >= 0; --m) {
            int k = int(rem % n);
            rem /= n;
            wl *= weights[std::size_t(k)];
            cub.u[std::size_t(l) * M + m] = nodes[std::size_t(k)];
        }
        cub.w[std::size_t(l)] = wl;
    }
    return cub;
}

// Lognormal quadrature nodes omega_{l,m} = 10^{(sqrt(2) sigma_m u_{l,m} + mu_m)/10}.
inline std::vector<double> lognormal_nodes(const Cubature& cub,
                                           const std::vector<LognormalSpec>& specs) {
    if (int(specs.size()) != cub.dim)
        throw parse_error("lognormal_nodes: specs length must equal cubature dim");
    std::vector<double> om(std::size_t(cub.count) * cub.dim);
    const double rt2 = std::numbers::sqrt2;
    for (std::int64_t l = 0; l < cub.count; ++l)
        for (int m = 0; m < cub.dim; ++m)
            om[std::size_t(l) * cub.dim + m] =
                std::pow(10.0, (rt2 * specs[std::size_t(m)].sigma_dB * cub.node(l, m) +
                                specs[std::size_t(m)].mu_dB) / 10.0);
    return om;
}

// The product of M lognormal CDFs as the weighted staircase
// pi^{-M/2} sum_l w_l prod_m 1{threshold_m > omega_{l,m}}; exact monotone
// nondecreasing in every threshold.
inline double product_lognormal_cdf(const std::vector<double>& thresholds,
                                    const std::vector<LognormalSpec>& specs,
                                    const Cubature& cub) {
    if (thresholds.size() != specs.size() || int(specs.size()) != cub.dim)
        throw parse_error("product_lognormal_cdf: dimension mismatch");
    for (double t : thresholds)
        if (!(t > 0.0)) throw parse_error("product_lognormal_cdf: thresholds must be positive");
    const std::vector<double> om = lognormal_nodes(cub, specs);
    double acc = 0.0;
    for (std::int64_t l = 0; l < cub.count; ++l) {
        bool inside = true;
        for (int m = 0; m < cub.dim && inside; ++m)
            inside = thresholds[std::size_t(m)] > om[std::size_t(l) * cub.dim + m];
        if (inside) acc += cub.w[std::size_t(l)];
    }
    // the normalized weight sum carries ~1 ulp of dust; pin the range
    return std::min(1.0, std::max(0.0, acc / std::pow(std::numbers::pi, cub.dim / 2.0)));
}

// Direct lognormal CDF Phi((10 log10 t - mu)/sigma) via the complementary
// error function; sigma = 0 degenerates to the step 1{10 log10 t > mu}.
inline double lognormal_cdf_direct(double threshold, const LognormalSpec& spec) {
    if (!(threshold > 0.0)) throw parse_error("lognormal_cdf_direct: threshold must be positive");
    double db = 10.0 * std::log10(threshold);
    if (spec.sigma_dB == 0.0) return db > spec.mu_dB ? 1.0 : 0.0;
    double x = (db - spec.mu_dB) / spec.sigma_dB;
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

} // namespace xlosh
