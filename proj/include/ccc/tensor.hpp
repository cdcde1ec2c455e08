#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "ccc/errors.hpp"
#include "ccc/linalg.hpp"
#include "ccc/manifold.hpp"

namespace ccc {

// ============================================================================
// Pointwise tensor algebra
// ============================================================================
//
// Index convention used throughout the library (fixed here, referenced
// everywhere else): for a (1,1) tensor the FIRST index is the upper one,
// (J X)^i = J^i_j X^j, stored row-major so J[i][j] = J^i_j. The curvature
// tensor is R(e_i, e_j) e_k = R^l_{kij} e_l; see levi_civita.hpp.

/// Everything needed to do metric algebra at one point: g, g⁻¹, J, and the
/// fundamental 2-form Ω_ij = g(J e_i, e_j) = J^m_i g_mj.
struct MetricFrame {
    int dim = 0;
    std::vector<double> point;
    std::vector<double> g;       // g_ij, row-major dim×dim
    std::vector<double> g_inv;   // g^ij
    std::vector<double> J;       // J^i_j
    std::vector<double> Omega;   // Ω_ij

    double g_at(int i, int j) const { return g[linalg::at(dim, i, j)]; }
    double g_inv_at(int i, int j) const { return g_inv[linalg::at(dim, i, j)]; }
    double J_at(int i, int j) const { return J[linalg::at(dim, i, j)]; }
    double Omega_at(int i, int j) const { return Omega[linalg::at(dim, i, j)]; }
};

/// Dense pointwise tensor value. `upper[s]` records whether slot s is
/// contravariant; components are row-major over (dim)^rank with the slot
/// order exactly as written in the formulas (e.g. R^l_{kij} is stored with
/// index order l,k,i,j).
class TensorValue {
public:
    TensorValue(int dim, std::vector<bool> upper, std::vector<double> point)
        : dim_(dim), upper_(std::move(upper)), point_(std::move(point)) {
        if (dim_ <= 0) throw Error("TensorValue: nonpositive dimension");
        std::size_t size = 1;
        for (std::size_t s = 0; s < upper_.size(); ++s) size *= static_cast<std::size_t>(dim_);
        data_.assign(size, 0.0);
    }

    int dim() const { return dim_; }
    int rank() const { return static_cast<int>(upper_.size()); }
    bool slot_upper(int s) const { return upper_.at(static_cast<std::size_t>(s)); }
    const std::vector<bool>& variance() const { return upper_; }
    std::span<const double> point() const { return point_; }
    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    /// Unchecked row-major access; hot path.
    template <class... Is>
    double& operator()(Is... idx) {
        static_assert(sizeof...(Is) > 0);
        return data_[flatten({static_cast<int>(idx)...})];
    }
    template <class... Is>
    double operator()(Is... idx) const {
        static_assert(sizeof...(Is) > 0);
        return data_[flatten({static_cast<int>(idx)...})];
    }

    double at(std::span<const int> idx) const {
        check_indices(idx);
        return data_[flatten(idx)];
    }
    void set(std::span<const int> idx, double v) {
        check_indices(idx);
        data_[flatten(idx)] = v;
    }

    double max_abs() const {
        double m = 0.0;
        for (double x : data_) m = std::max(m, std::abs(x));
        return m;
    }

    std::size_t flatten(std::span<const int> idx) const {
        std::size_t flat = 0;
        for (int i : idx) flat = flat * static_cast<std::size_t>(dim_) + static_cast<std::size_t>(i);
        return flat;
    }
    std::size_t flatten(std::initializer_list<int> idx) const {
        return flatten(std::span<const int>(idx.begin(), idx.size()));
    }

private:
    void check_indices(std::span<const int> idx) const {
        if (static_cast<int>(idx.size()) != rank())
            throw Error("TensorValue: expected " + std::to_string(rank()) + " indices, got " +
                        std::to_string(idx.size()));
        for (int i : idx)
            if (i < 0 || i >= dim_)
                throw Error("TensorValue: index " + std::to_string(i) + " out of range [0, " +
                            std::to_string(dim_) + ")");
    }

    int dim_ = 0;
    std::vector<bool> upper_;
    std::vector<double> point_;
    std::vector<double> data_;
};

namespace detail {

inline void require_frame_invariants(const MetricFrame& f) {
    const int d = f.dim;
    double gscale = std::max(1.0, linalg::max_abs(f.g));

    // g·g⁻¹ ≈ I.  The attainable accuracy scales with the conditioning of g,
    // so normalise by the ∞-norm product (≥ 1, and ~cond(g));
    // badly-conditioned metrics were already refused above this check.
    auto prod = linalg::matmul(d, f.g, f.g_inv);
    double worst = 0.0;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            worst = std::max(worst, std::abs(prod[linalg::at(d, i, j)] - (i == j ? 1.0 : 0.0)));
    double inv_scale = std::max(1.0, gscale * std::max(1.0, linalg::max_abs(f.g_inv)));
    if (worst / inv_scale > 1e-10)
        throw SpecError("metric frame: g·g_inv deviates from identity by " + std::to_string(worst));

    // Ω skew-symmetric.
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            double skew = std::abs(f.Omega[linalg::at(d, i, j)] + f.Omega[linalg::at(d, j, i)]);
            if (skew / gscale > 1e-12)
                throw SpecError("metric frame: fundamental form not skew at (" +
                                std::to_string(i) + "," + std::to_string(j) + ")");
        }

    // Jᵀ g J = g (Hermitian metric).
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            double acc = 0.0;
            for (int m = 0; m < d; ++m)
                for (int l = 0; l < d; ++l)
                    acc += f.J[linalg::at(d, m, i)] * f.g[linalg::at(d, m, l)] *
                           f.J[linalg::at(d, l, j)];
            if (std::abs(acc - f.g[linalg::at(d, i, j)]) / gscale > 1e-10)
                throw SpecError("metric frame: metric is not Hermitian for J at (" +
                                std::to_string(i) + "," + std::to_string(j) + ")");
        }
}

}  // namespace detail

/// Assemble the metric frame at a point, enforcing the structural invariants
/// (a violation means the spec is bad, not that the arithmetic failed).
inline MetricFrame metric_frame(const ManifoldSpec& spec, std::span<const double> point) {
    if (static_cast<int>(point.size()) != spec.dim)
        throw SpecError("metric_frame: point has " + std::to_string(point.size()) +
                        " coordinates, spec has dimension " + std::to_string(spec.dim));
    if (!spec.in_domain(point))
        throw SpecError("metric_frame: point outside the declared coordinate domain");

    MetricFrame f;
    f.dim = spec.dim;
    f.point.assign(point.begin(), point.end());
    f.g = spec.metric_at(point);
    f.J = spec.complex_structure_at(point);
    f.g_inv = linalg::inverse(f.dim, f.g);
    double cond = linalg::condition_estimate(f.dim, f.g, f.g_inv);
    if (!(cond <= 1e12))
        throw SingularError("metric_frame: metric condition estimate " + std::to_string(cond) +
                            " exceeds 1e12");

    f.Omega.assign(f.g.size(), 0.0);
    for (int i = 0; i < f.dim; ++i)
        for (int j = 0; j < f.dim; ++j) {
            double acc = 0.0;
            for (int m = 0; m < f.dim; ++m)
                acc += f.J[linalg::at(f.dim, m, i)] * f.g[linalg::at(f.dim, m, j)];
            f.Omega[linalg::at(f.dim, i, j)] = acc;
        }

    detail::require_frame_invariants(f);
    return f;
}

enum class Musical { Raise, Lower };

/// Contract one slot of a tensor with g⁻¹ (raise) or g (lower).  Raising is
/// only legal on a covariant slot and vice versa; raise∘lower is the
/// identity up to the frame's inversion accuracy.
inline TensorValue musical(const TensorValue& t, int slot, Musical direction,
                           const MetricFrame& frame) {
    if (slot < 0 || slot >= t.rank())
        throw SpecError("musical: slot " + std::to_string(slot) + " out of range for rank " +
                        std::to_string(t.rank()));
    if (t.dim() != frame.dim) throw SpecError("musical: tensor/frame dimension mismatch");
    bool up = t.slot_upper(slot);
    if (direction == Musical::Raise && up)
        throw SpecError("musical: slot " + std::to_string(slot) + " is already contravariant");
    if (direction == Musical::Lower && !up)
        throw SpecError("musical: slot " + std::to_string(slot) + " is already covariant");

    std::vector<bool> upper = t.variance();
    upper[static_cast<std::size_t>(slot)] = (direction == Musical::Raise);
    TensorValue out(t.dim(), upper, std::vector<double>(t.point().begin(), t.point().end()));

    const int d = t.dim();
    const int r = t.rank();
    std::size_t outer = 1;  // combined extent of slots before `slot`
    for (int s = 0; s < slot; ++s) outer *= static_cast<std::size_t>(d);
    std::size_t inner = 1;  // combined extent of slots after `slot`
    for (int s = slot + 1; s < r; ++s) inner *= static_cast<std::size_t>(d);

    const std::vector<double>& metric = (direction == Musical::Raise) ? frame.g_inv : frame.g;
    const std::vector<double>& src = t.data();
    std::vector<double>& dst = out.data();
    for (std::size_t o = 0; o < outer; ++o)
        for (int a = 0; a < d; ++a) {
            std::size_t dst_base = (o * static_cast<std::size_t>(d) + static_cast<std::size_t>(a)) * inner;
            for (std::size_t in = 0; in < inner; ++in) {
                double acc = 0.0;
                for (int b = 0; b < d; ++b)
                    acc += metric[linalg::at(d, a, b)] *
                           src[(o * static_cast<std::size_t>(d) + static_cast<std::size_t>(b)) * inner + in];
                dst[dst_base + in] = acc;
            }
        }
    return out;
}

/// (J v)^i = J^i_m v^m for a contravariant vector.
inline std::vector<double> apply_J(const MetricFrame& f, std::span<const double> v) {
    std::vector<double> out(static_cast<std::size_t>(f.dim), 0.0);
    for (int i = 0; i < f.dim; ++i) {
        double acc = 0.0;
        for (int m = 0; m < f.dim; ++m) acc += f.J_at(i, m) * v[static_cast<std::size_t>(m)];
        out[static_cast<std::size_t>(i)] = acc;
    }
    return out;
}

/// (a ∘ J)_i = a_m J^m_i for a covector (a ∘ J)(X) = a(J X).
inline std::vector<double> covector_J(const MetricFrame& f, std::span<const double> a) {
    std::vector<double> out(static_cast<std::size_t>(f.dim), 0.0);
    for (int i = 0; i < f.dim; ++i) {
        double acc = 0.0;
        for (int m = 0; m < f.dim; ++m) acc += a[static_cast<std::size_t>(m)] * f.J_at(m, i);
        out[static_cast<std::size_t>(i)] = acc;
    }
    return out;
}

/// g(v, w) for contravariant vectors.
inline double inner(const MetricFrame& f, std::span<const double> v, std::span<const double> w) {
    double acc = 0.0;
    for (int i = 0; i < f.dim; ++i)
        for (int j = 0; j < f.dim; ++j)
            acc += f.g_at(i, j) * v[static_cast<std::size_t>(i)] * w[static_cast<std::size_t>(j)];
    return acc;
}

inline double norm_sq(const MetricFrame& f, std::span<const double> v) { return inner(f, v, v); }

/// g⁻¹(a, b) for covectors (e.g. ‖dτ‖²).
inline double coinner(const MetricFrame& f, std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (int i = 0; i < f.dim; ++i)
        for (int j = 0; j < f.dim; ++j)
            acc += f.g_inv_at(i, j) * a[static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(j)];
    return acc;
}

}  // namespace ccc
