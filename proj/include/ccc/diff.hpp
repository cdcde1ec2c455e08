#pragma once

#include <numeric>
#include <span>
#include <vector>

#include "ccc/expr.hpp"
#include "ccc/jet.hpp"

namespace ccc {

// ============================================================================
// Exact evaluation and differentiation of expressions at a point
// ============================================================================
//
// The public surface is capped at total derivative order 4: that is what the
// curvature pipeline needs (metric → Christoffel → curvature → its covariant
// derivative → second derivatives of the scalar curvature). Orders beyond 4
// are rejected here; the Jet type itself is order-generic for internal use.

inline constexpr int kMaxDerivativeOrder = 4;

/// Exact composition of arithmetic at a point. Domain violations throw.
inline double evaluate(const Expr& f, std::span<const double> point) {
    return f.eval(point);
}

namespace detail {

/// Jet of an expression without the public order cap (internal use only).
inline Jet expr_jet_unchecked(const Expr& f, std::span<const double> point, int order) {
    const int dim = static_cast<int>(f.variables().size());
    if (dim == 0) throw Error("jet of an expression over zero variables");
    if (point.size() != f.variables().size())
        throw Error("point dimension " + std::to_string(point.size()) +
                    " does not match variable count " + std::to_string(dim));
    std::vector<Jet> vars;
    vars.reserve(static_cast<std::size_t>(dim));
    for (int v = 0; v < dim; ++v)
        vars.push_back(Jet::variable(point[static_cast<std::size_t>(v)], v, dim, order));
    JetOps ops{dim, order};
    return f.eval_with<Jet>(vars, ops);
}

}  // namespace detail

/// All partial derivatives of `f` at `point` through total degree `order`.
inline Jet jet(const Expr& f, std::span<const double> point, int order) {
    if (order < 0 || order > kMaxDerivativeOrder)
        throw Error("derivative order " + std::to_string(order) +
                    " outside supported range [0," +
                    std::to_string(kMaxDerivativeOrder) + "]");
    return detail::expr_jet_unchecked(f, point, order);
}

/// Single exact partial derivative ∂^α f at `point`, |α| ≤ 4.
inline double partial_derivative(const Expr& f, std::span<const int> alpha,
                                 std::span<const double> point) {
    int total = 0;
    for (int a : alpha) {
        if (a < 0) throw Error("negative entry in derivative multi-index");
        total += a;
    }
    if (total > kMaxDerivativeOrder)
        throw Error("derivative order " + std::to_string(total) +
                    " outside supported range [0," +
                    std::to_string(kMaxDerivativeOrder) + "]");
    return detail::expr_jet_unchecked(f, point, total).derivative(alpha);
}

}  // namespace ccc
