#pragma once

// Finite-difference oracles, deliberately independent of the jet pipeline:
// they consume only pointwise metric evaluations, so agreement with the
// jet-based results cross-checks both the calculus and the formulas.

#include <cstddef>
#include <span>
#include <vector>

#include "ccc/linalg.hpp"
#include "ccc/manifold.hpp"

namespace oracle {

inline std::size_t at3(int d, int k, int i, int j) {
    return (static_cast<std::size_t>(k) * d + i) * d + j;
}
inline std::size_t at4(int d, int l, int k, int i, int j) {
    return ((static_cast<std::size_t>(l) * d + k) * d + i) * d + j;
}

/// Central-difference ∂_l g_ij with step h.
inline std::vector<double> metric_gradient_fd(const ccc::ManifoldSpec& spec,
                                              std::span<const double> point, double h) {
    const int d = spec.dim;
    std::vector<double> out(static_cast<std::size_t>(d) * d * d, 0.0);
    std::vector<double> p(point.begin(), point.end());
    for (int l = 0; l < d; ++l) {
        double saved = p[static_cast<std::size_t>(l)];
        p[static_cast<std::size_t>(l)] = saved + h;
        std::vector<double> gp = spec.metric_at(p);
        p[static_cast<std::size_t>(l)] = saved - h;
        std::vector<double> gm = spec.metric_at(p);
        p[static_cast<std::size_t>(l)] = saved;
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                out[at3(d, l, i, j)] =
                    (gp[ccc::linalg::at(d, i, j)] - gm[ccc::linalg::at(d, i, j)]) / (2.0 * h);
    }
    return out;
}

/// Christoffel symbols Γ^k_{ij} from central differences of the metric.
inline std::vector<double> christoffel_fd(const ccc::ManifoldSpec& spec,
                                          std::span<const double> point, double h = 1e-5) {
    const int d = spec.dim;
    std::vector<double> dg = metric_gradient_fd(spec, point, h);
    std::vector<double> g = spec.metric_at(point);
    std::vector<double> g_inv = ccc::linalg::inverse(d, g);
    std::vector<double> out(static_cast<std::size_t>(d) * d * d, 0.0);
    for (int k = 0; k < d; ++k)
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                double acc = 0.0;
                for (int l = 0; l < d; ++l)
                    acc += g_inv[ccc::linalg::at(d, k, l)] *
                           (dg[at3(d, i, j, l)] + dg[at3(d, j, i, l)] - dg[at3(d, l, i, j)]);
                out[at3(d, k, i, j)] = 0.5 * acc;
            }
    return out;
}

/// R^l_{kij} from central differences of christoffel_fd (outer step h_outer,
/// inner metric step h_inner), with
///   R^l_{kij} = ∂_i Γ^l_{jk} − ∂_j Γ^l_{ik} + Γ^l_{im} Γ^m_{jk} − Γ^l_{jm} Γ^m_{ik}.
inline std::vector<double> riemann_fd(const ccc::ManifoldSpec& spec,
                                      std::span<const double> point, double h_outer = 1e-4,
                                      double h_inner = 1e-5) {
    const int d = spec.dim;
    std::vector<double> p(point.begin(), point.end());
    // dGamma[i][·] = ∂_i Γ
    std::vector<std::vector<double>> dgamma(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) {
        double saved = p[static_cast<std::size_t>(i)];
        p[static_cast<std::size_t>(i)] = saved + h_outer;
        std::vector<double> gp = christoffel_fd(spec, p, h_inner);
        p[static_cast<std::size_t>(i)] = saved - h_outer;
        std::vector<double> gm = christoffel_fd(spec, p, h_inner);
        p[static_cast<std::size_t>(i)] = saved;
        dgamma[static_cast<std::size_t>(i)].resize(gp.size());
        for (std::size_t t = 0; t < gp.size(); ++t)
            dgamma[static_cast<std::size_t>(i)][t] = (gp[t] - gm[t]) / (2.0 * h_outer);
    }
    std::vector<double> gamma = christoffel_fd(spec, point, h_inner);
    std::vector<double> out(static_cast<std::size_t>(d) * d * d * d, 0.0);
    for (int l = 0; l < d; ++l)
        for (int k = 0; k < d; ++k)
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) {
                    double acc = dgamma[static_cast<std::size_t>(i)][at3(d, l, j, k)] -
                                 dgamma[static_cast<std::size_t>(j)][at3(d, l, i, k)];
                    for (int m = 0; m < d; ++m)
                        acc += gamma[at3(d, l, i, m)] * gamma[at3(d, m, j, k)] -
                               gamma[at3(d, l, j, m)] * gamma[at3(d, m, i, k)];
                    out[at4(d, l, k, i, j)] = acc;
                }
    return out;
}

}  // namespace oracle
