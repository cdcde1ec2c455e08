#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "ccc/errors.hpp"

namespace ccc {

// ============================================================================
// Small dense matrices (row-major std::vector, runtime dimension)
// ============================================================================
//
// Everything in the pipeline is a 2n×2n matrix with 2n in single digits, so
// simple O(d³) routines with partial pivoting are both adequate and fully
// deterministic. The inverse is templated over the scalar so the same code
// inverts matrices of Jets (pivot selection uses the order-0 value).

namespace linalg {

inline std::size_t at(int dim, int i, int j) {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(dim) +
           static_cast<std::size_t>(j);
}

template <class T>
std::vector<T> matmul(int dim, const std::vector<T>& a, const std::vector<T>& b) {
    std::vector<T> out(a.size());
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) {
            T acc = a[at(dim, i, 0)] * b[at(dim, 0, j)];
            for (int k = 1; k < dim; ++k) acc += a[at(dim, i, k)] * b[at(dim, k, j)];
            out[at(dim, i, j)] = acc;
        }
    return out;
}

inline double max_abs(const std::vector<double>& a) {
    double m = 0.0;
    for (double x : a) m = std::max(m, std::abs(x));
    return m;
}

namespace detail {
inline double pivot_size(double x) { return std::abs(x); }
template <class T>
auto pivot_size(const T& x) -> decltype(x.value()) {
    return std::abs(x.value());
}
}  // namespace detail

/// Gauss–Jordan inverse with partial pivoting. Throws SingularError when a
/// pivot vanishes. `make_one`/`make_zero` provide scalar constants shaped
/// like the input entries (Jets need a dimension and order).
template <class T, class MakeConst>
std::vector<T> inverse(int dim, const std::vector<T>& m, const MakeConst& constant) {
    std::vector<T> a = m;
    std::vector<T> inv;
    inv.reserve(static_cast<std::size_t>(dim) * static_cast<std::size_t>(dim));
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) inv.push_back(constant(i == j ? 1.0 : 0.0));

    for (int col = 0; col < dim; ++col) {
        int pivot = col;
        double best = detail::pivot_size(a[at(dim, col, col)]);
        for (int r = col + 1; r < dim; ++r) {
            double cand = detail::pivot_size(a[at(dim, r, col)]);
            if (cand > best) {
                best = cand;
                pivot = r;
            }
        }
        if (!(best > 0.0))
            throw SingularError("singular matrix: zero pivot in column " +
                                std::to_string(col));
        if (pivot != col)
            for (int j = 0; j < dim; ++j) {
                std::swap(a[at(dim, col, j)], a[at(dim, pivot, j)]);
                std::swap(inv[at(dim, col, j)], inv[at(dim, pivot, j)]);
            }
        T diag = a[at(dim, col, col)];
        for (int j = 0; j < dim; ++j) {
            a[at(dim, col, j)] = a[at(dim, col, j)] / diag;
            inv[at(dim, col, j)] = inv[at(dim, col, j)] / diag;
        }
        for (int r = 0; r < dim; ++r) {
            if (r == col) continue;
            // No zero-skip here: an entry can vanish at the base point while
            // carrying nonzero higher-order data (matrices of Jets), and the
            // row operation must still be applied to that data.
            T f = a[at(dim, r, col)];
            for (int j = 0; j < dim; ++j) {
                a[at(dim, r, j)] = a[at(dim, r, j)] - f * a[at(dim, col, j)];
                inv[at(dim, r, j)] = inv[at(dim, r, j)] - f * inv[at(dim, col, j)];
            }
        }
    }
    return inv;
}

inline std::vector<double> inverse(int dim, const std::vector<double>& m) {
    return inverse<double>(dim, m, [](double v) { return v; });
}

/// ∞-norm condition estimate ‖A‖∞·‖A⁻¹‖∞.
inline double condition_estimate(int dim, const std::vector<double>& m,
                                 const std::vector<double>& m_inv) {
    auto norm_inf = [dim](const std::vector<double>& x) {
        double worst = 0.0;
        for (int i = 0; i < dim; ++i) {
            double row = 0.0;
            for (int j = 0; j < dim; ++j) row += std::abs(x[at(dim, i, j)]);
            worst = std::max(worst, row);
        }
        return worst;
    };
    return norm_inf(m) * norm_inf(m_inv);
}

/// Cholesky-style positive-definiteness probe on a symmetric matrix.
/// Returns 0 when positive definite, otherwise the magnitude of the first
/// non-positive pivot (a diagnostic residual, not an exception).
inline double positive_definite_defect(int dim, const std::vector<double>& m) {
    std::vector<double> a = m;
    for (int k = 0; k < dim; ++k) {
        double d = a[at(dim, k, k)];
        if (!(d > 0.0)) return std::max(std::abs(d), 1e-300);
        for (int i = k + 1; i < dim; ++i) {
            double f = a[at(dim, i, k)] / d;
            for (int j = k; j < dim; ++j)
                a[at(dim, i, j)] -= f * a[at(dim, k, j)];
        }
    }
    return 0.0;
}

}  // namespace linalg
}  // namespace ccc
