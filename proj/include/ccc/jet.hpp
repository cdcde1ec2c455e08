#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include "ccc/errors.hpp"
#include "ccc/expr.hpp"

namespace ccc {

// ============================================================================
// Truncated multivariate Taylor arithmetic
// ============================================================================
//
// A Jet holds the Taylor expansion of a scalar quantity at a chart point,
// truncated at a total degree: coefficients c_α = ∂^α f / α! for all
// multi-indices |α| ≤ order, stored densely in graded-lexicographic order.
// Arithmetic on Jets propagates derivatives exactly (to floating-point
// rounding); the six DSL functions compose through their univariate
// derivative sequences. Nothing here uses finite differences.
//
// The graded-lex enumeration makes the index set of a lower order a prefix
// of any higher order over the same variables, so jets of different orders
// combine naturally: a binary operation truncates to the smaller order.

/// Interned per-(dimension, order) bookkeeping: the multi-index enumeration,
/// factorials, the sparse multiplication table, and derivative index maps.
/// Instances live for the program's lifetime; Jets hold plain pointers.
class JetLayout {
public:
    struct Triple {
        std::int32_t a, b, c;  // product: out[c] += x[a] * y[b]
    };

    static const JetLayout& get(int dim, int order) {
        if (dim < 1 || dim > 16)
            throw Error("jet dimension must be in [1,16], got " + std::to_string(dim));
        if (order < 0 || order > 15)
            throw Error("jet order must be in [0,15], got " + std::to_string(order));
        static std::mutex mu;
        static std::map<std::pair<int, int>, std::unique_ptr<JetLayout>> cache;
        std::scoped_lock lock(mu);
        auto key = std::make_pair(dim, order);
        auto it = cache.find(key);
        if (it == cache.end())
            it = cache.emplace(key, std::unique_ptr<JetLayout>(new JetLayout(dim, order))).first;
        return *it->second;
    }

    int dim() const { return dim_; }
    int order() const { return order_; }
    int size() const { return static_cast<int>(degree_.size()); }

    int degree(int i) const { return degree_[static_cast<std::size_t>(i)]; }
    double factorial(int i) const { return factorial_[static_cast<std::size_t>(i)]; }

    std::span<const std::uint8_t> exponents(int i) const {
        return {exponents_.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(dim_),
                static_cast<std::size_t>(dim_)};
    }

    /// Index of the multi-index α, or -1 when |α| exceeds the order.
    int index_of(std::span<const int> alpha) const {
        std::uint64_t key = 0;
        int deg = 0;
        for (int v = 0; v < dim_; ++v) {
            int e = alpha[static_cast<std::size_t>(v)];
            if (e < 0) throw Error("negative multi-index entry");
            deg += e;
            key = (key << 4) | static_cast<std::uint64_t>(e & 0xF);
        }
        if (deg > order_) return -1;
        auto it = lookup_.find(key);
        return it == lookup_.end() ? -1 : it->second;
    }

    /// Index of α + e_v within this layout, or -1 when it would exceed the order.
    int bump(int i, int v) const {
        return bump_[static_cast<std::size_t>(i) * static_cast<std::size_t>(dim_) +
                     static_cast<std::size_t>(v)];
    }

    /// Index of the first-order multi-index e_v.
    int unit_index(int v) const { return 1 + v; }

    const std::vector<Triple>& triples() const { return triples_; }

private:
    JetLayout(int dim, int order) : dim_(dim), order_(order) {
        // Enumerate multi-indices by total degree, lexicographically within
        // a degree (first exponent descending). Degree-(order-1) layouts are
        // prefixes of this one by construction.
        std::vector<int> alpha(static_cast<std::size_t>(dim), 0);
        for (int d = 0; d <= order; ++d) enumerate(alpha, 0, d);

        const int n = size();
        lookup_.clear();
        for (int i = 0; i < n; ++i) lookup_.emplace(pack(exponents(i)), i);

        bump_.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(dim), -1);
        std::vector<int> tmp(static_cast<std::size_t>(dim));
        for (int i = 0; i < n; ++i) {
            auto e = exponents(i);
            for (int v = 0; v < dim; ++v) {
                for (int k = 0; k < dim; ++k) tmp[static_cast<std::size_t>(k)] = e[static_cast<std::size_t>(k)];
                tmp[static_cast<std::size_t>(v)] += 1;
                bump_[static_cast<std::size_t>(i) * static_cast<std::size_t>(dim) +
                      static_cast<std::size_t>(v)] = index_of(tmp);
            }
        }

        for (int a = 0; a < n; ++a) {
            for (int b = 0; b < n; ++b) {
                if (degree_[static_cast<std::size_t>(a)] + degree_[static_cast<std::size_t>(b)] > order) continue;
                auto ea = exponents(a);
                auto eb = exponents(b);
                for (int v = 0; v < dim; ++v)
                    tmp[static_cast<std::size_t>(v)] =
                        ea[static_cast<std::size_t>(v)] + eb[static_cast<std::size_t>(v)];
                int c = index_of(tmp);
                triples_.push_back({a, b, c});
            }
        }
    }

    void enumerate(std::vector<int>& alpha, int pos, int remaining) {
        if (pos == dim_ - 1) {
            alpha[static_cast<std::size_t>(pos)] = remaining;
            push(alpha);
            alpha[static_cast<std::size_t>(pos)] = 0;
            return;
        }
        for (int e = remaining; e >= 0; --e) {
            alpha[static_cast<std::size_t>(pos)] = e;
            enumerate(alpha, pos + 1, remaining - e);
        }
        alpha[static_cast<std::size_t>(pos)] = 0;
    }

    void push(const std::vector<int>& alpha) {
        int deg = 0;
        double fact = 1.0;
        for (int v = 0; v < dim_; ++v) {
            int e = alpha[static_cast<std::size_t>(v)];
            deg += e;
            for (int k = 2; k <= e; ++k) fact *= k;
            exponents_.push_back(static_cast<std::uint8_t>(e));
        }
        degree_.push_back(deg);
        factorial_.push_back(fact);
    }

    static std::uint64_t pack(std::span<const std::uint8_t> e) {
        std::uint64_t key = 0;
        for (std::uint8_t x : e) key = (key << 4) | static_cast<std::uint64_t>(x & 0xF);
        return key;
    }

    std::uint64_t pack(std::span<const int> e) const {
        std::uint64_t key = 0;
        for (int v = 0; v < dim_; ++v)
            key = (key << 4) | static_cast<std::uint64_t>(e[static_cast<std::size_t>(v)] & 0xF);
        return key;
    }

    int dim_, order_;
    std::vector<std::uint8_t> exponents_;  // size * dim, flattened
    std::vector<int> degree_;
    std::vector<double> factorial_;
    std::vector<int> bump_;
    std::vector<Triple> triples_;
    std::map<std::uint64_t, int> lookup_;
};

// ----------------------------------------------------------------------------

class Jet;
Jet reciprocal(const Jet& b);

class Jet {
public:
    Jet() = default;

    static Jet constant(double v, int dim, int order) {
        Jet j(JetLayout::get(dim, order));
        j.c_[0] = v;
        return j;
    }

    /// The coordinate function x_var expanded at value v.
    static Jet variable(double v, int var, int dim, int order) {
        Jet j(JetLayout::get(dim, order));
        j.c_[0] = v;
        if (order >= 1) j.c_[static_cast<std::size_t>(j.L_->unit_index(var))] = 1.0;
        return j;
    }

    bool valid() const { return L_ != nullptr; }
    int dim() const { return L_->dim(); }
    int order() const { return L_->order(); }
    int size() const { return L_->size(); }
    const JetLayout& layout() const { return *L_; }

    double value() const { return c_[0]; }
    double coeff(int i) const { return c_[static_cast<std::size_t>(i)]; }
    double& coeff(int i) { return c_[static_cast<std::size_t>(i)]; }

    /// ∂^α f at the base point (Taylor coefficient times α!).
    double derivative(std::span<const int> alpha) const {
        int i = L_->index_of(alpha);
        if (i < 0)
            throw Error("derivative order exceeds jet order " + std::to_string(order()));
        return c_[static_cast<std::size_t>(i)] * L_->factorial(i);
    }

    /// First derivative along one variable, as a value.
    double first(int var) const {
        if (order() < 1) throw Error("first derivative of an order-0 jet");
        return c_[static_cast<std::size_t>(L_->unit_index(var))];
    }

    /// Same expansion truncated to a lower order (prefix copy).
    Jet truncated(int new_order) const {
        if (new_order >= order()) return *this;
        Jet out(JetLayout::get(dim(), new_order));
        for (int i = 0; i < out.size(); ++i) out.c_[static_cast<std::size_t>(i)] = c_[static_cast<std::size_t>(i)];
        return out;
    }

    /// The jet of ∂f/∂x_var, one order lower.
    Jet derivative_jet(int var) const {
        if (order() < 1) throw Error("derivative jet of an order-0 jet");
        Jet out(JetLayout::get(dim(), order() - 1));
        for (int i = 0; i < out.size(); ++i) {
            int src = L_->bump(i, var);
            int ev = L_->exponents(i)[static_cast<std::size_t>(var)];
            out.c_[static_cast<std::size_t>(i)] =
                c_[static_cast<std::size_t>(src)] * static_cast<double>(ev + 1);
        }
        return out;
    }

    // ---- arithmetic ---------------------------------------------------------

    Jet operator-() const {
        Jet out = *this;
        for (double& x : out.c_) x = -x;
        return out;
    }

    Jet& operator+=(const Jet& o) { return merge(o, +1.0); }
    Jet& operator-=(const Jet& o) { return merge(o, -1.0); }

    Jet& operator+=(double d) { c_[0] += d; return *this; }
    Jet& operator-=(double d) { c_[0] -= d; return *this; }
    Jet& operator*=(double d) {
        for (double& x : c_) x *= d;
        return *this;
    }

    friend Jet operator+(Jet a, const Jet& b) {
        if (b.order() < a.order()) { Jet t = a.truncated(b.order()); t += b; return t; }
        a += b;
        return a;
    }
    friend Jet operator-(Jet a, const Jet& b) {
        if (b.order() < a.order()) { Jet t = a.truncated(b.order()); t -= b; return t; }
        a -= b;
        return a;
    }
    friend Jet operator+(Jet a, double d) { a += d; return a; }
    friend Jet operator+(double d, Jet a) { a += d; return a; }
    friend Jet operator-(Jet a, double d) { a -= d; return a; }
    friend Jet operator-(double d, const Jet& a) { Jet out = -a; out += d; return out; }
    friend Jet operator*(Jet a, double d) { a *= d; return a; }
    friend Jet operator*(double d, Jet a) { a *= d; return a; }
    friend Jet operator/(Jet a, double d) {
        if (d == 0.0) throw DomainError("division by zero");
        a *= 1.0 / d;
        return a;
    }

    friend Jet operator*(const Jet& a, const Jet& b) {
        const Jet* x = &a;
        const Jet* y = &b;
        int r = std::min(a.order(), b.order());
        const JetLayout& L = JetLayout::get(a.dim(), r);
        Jet out(L);
        for (const auto& t : L.triples())
            out.c_[static_cast<std::size_t>(t.c)] +=
                x->c_[static_cast<std::size_t>(t.a)] * y->c_[static_cast<std::size_t>(t.b)];
        return out;
    }

    friend Jet operator/(const Jet& a, const Jet& b) { return a * reciprocal(b); }
    friend Jet operator/(double d, const Jet& b) { return reciprocal(b) * d; }

    // ---- composition with a univariate outer function -----------------------

    /// Given f's derivative sequence at g's value (derivs[k] = f^(k)(g(0))),
    /// returns the jet of f∘g via Horner evaluation of the truncated series.
    friend Jet compose(std::span<const double> derivs, const Jet& g) {
        const int K = g.order();
        if (static_cast<int>(derivs.size()) < K + 1)
            throw Error("composition needs " + std::to_string(K + 1) + " derivatives");
        Jet h = g;
        h.c_[0] = 0.0;  // h = g - g(0)
        double fact = 1.0;
        for (int k = 2; k <= K; ++k) fact *= k;
        Jet r = Jet::constant(derivs[static_cast<std::size_t>(K)] / fact, g.dim(), K);
        for (int k = K - 1; k >= 0; --k) {
            fact = 1.0;
            for (int j = 2; j <= k; ++j) fact *= j;
            r = r * h;
            r.c_[0] += derivs[static_cast<std::size_t>(k)] / fact;
        }
        return r;
    }

private:
    explicit Jet(const JetLayout& L) : L_(&L), c_(static_cast<std::size_t>(L.size()), 0.0) {}

    Jet& merge(const Jet& o, double sign) {
        if (o.order() < order()) {
            Jet t = truncated(o.order());
            t.merge(o, sign);
            *this = std::move(t);
            return *this;
        }
        for (int i = 0; i < size(); ++i)
            c_[static_cast<std::size_t>(i)] += sign * o.c_[static_cast<std::size_t>(i)];
        return *this;
    }

    const JetLayout* L_ = nullptr;
    std::vector<double> c_;
};

// ----------------------------------------------------------------------------
// Function composition sequences
// ----------------------------------------------------------------------------

namespace detail {

inline std::vector<double> derivs_exp(double x0, int K) {
    double e = std::exp(x0);
    return std::vector<double>(static_cast<std::size_t>(K + 1), e);
}

inline std::vector<double> derivs_sin(double x0, int K) {
    const double s = std::sin(x0), c = std::cos(x0);
    const double cycle[4] = {s, c, -s, -c};
    std::vector<double> d(static_cast<std::size_t>(K + 1));
    for (int k = 0; k <= K; ++k) d[static_cast<std::size_t>(k)] = cycle[k % 4];
    return d;
}

inline std::vector<double> derivs_cos(double x0, int K) {
    const double s = std::sin(x0), c = std::cos(x0);
    const double cycle[4] = {c, -s, -c, s};
    std::vector<double> d(static_cast<std::size_t>(K + 1));
    for (int k = 0; k <= K; ++k) d[static_cast<std::size_t>(k)] = cycle[k % 4];
    return d;
}

inline std::vector<double> derivs_ln(double x0, int K) {
    if (!(x0 > 0.0))
        throw DomainError("ln of non-positive value (" + format_double(x0) + ")");
    std::vector<double> d(static_cast<std::size_t>(K + 1));
    d[0] = std::log(x0);
    // d^k/dx^k ln = (-1)^(k-1) (k-1)! / x^k
    double coef = 1.0;  // (k-1)! with alternating sign, built incrementally
    for (int k = 1; k <= K; ++k) {
        if (k > 1) coef *= -(k - 1);
        d[static_cast<std::size_t>(k)] = coef / std::pow(x0, k);
    }
    return d;
}

inline std::vector<double> derivs_tanh(double x0, int K) {
    if (K > 5) throw Error("tanh derivatives implemented through order 5");
    const double s = std::tanh(x0);
    const double u = 1.0 - s * s;
    std::vector<double> d(static_cast<std::size_t>(K + 1));
    const double full[6] = {
        s,
        u,
        -2.0 * s * u,
        u * (6.0 * s * s - 2.0),
        8.0 * s * u * (2.0 - 3.0 * s * s),
        8.0 * u * (2.0 - 15.0 * s * s + 15.0 * s * s * s * s),
    };
    for (int k = 0; k <= K; ++k) d[static_cast<std::size_t>(k)] = full[k];
    return d;
}

/// Derivatives of x ↦ x^e. Integer exponents admit any base (with the usual
/// zero-base restriction); fractional exponents need a strictly positive base
/// as soon as derivatives are taken.
inline std::vector<double> derivs_pow(double x0, double e, int K) {
    std::vector<double> d(static_cast<std::size_t>(K + 1));
    if (is_integer_value(e)) {
        if (x0 == 0.0 && e < 0.0)
            throw DomainError("zero raised to negative power");
        double fall = 1.0;  // e (e-1) ... (e-k+1)
        for (int k = 0; k <= K; ++k) {
            if (k > 0) fall *= (e - (k - 1));
            double p = e - k;
            double xp;
            if (x0 == 0.0)
                xp = (p == 0.0) ? 1.0 : 0.0;  // only reached when fall != 0 ⇒ p ≥ 0
            else
                xp = std::pow(x0, p);
            d[static_cast<std::size_t>(k)] = fall * xp;
        }
        return d;
    }
    if (!(x0 > 0.0))
        throw DomainError("non-positive base (" + format_double(x0) +
                          ") raised to fractional power " + format_double(e));
    double fall = 1.0;
    for (int k = 0; k <= K; ++k) {
        if (k > 0) fall *= (e - (k - 1));
        d[static_cast<std::size_t>(k)] = fall * std::pow(x0, e - k);
    }
    return d;
}

inline std::vector<double> derivs_recip(double x0, int K) {
    if (x0 == 0.0) throw DomainError("division by zero");
    std::vector<double> d(static_cast<std::size_t>(K + 1));
    // d^k/dx^k (1/x) = (-1)^k k! / x^(k+1)
    double coef = 1.0;
    double xp = 1.0 / x0;
    for (int k = 0; k <= K; ++k) {
        if (k > 0) coef *= -k;
        d[static_cast<std::size_t>(k)] = coef * xp;
        xp /= x0;
    }
    // note: coef * xp where xp = x0^{-(k+1)} at step k
    return d;
}

}  // namespace detail

inline Jet reciprocal(const Jet& b) {
    return compose(detail::derivs_recip(b.value(), b.order()), b);
}

inline Jet exp(const Jet& g) { return compose(detail::derivs_exp(g.value(), g.order()), g); }
inline Jet sin(const Jet& g) { return compose(detail::derivs_sin(g.value(), g.order()), g); }
inline Jet cos(const Jet& g) { return compose(detail::derivs_cos(g.value(), g.order()), g); }
inline Jet ln(const Jet& g) { return compose(detail::derivs_ln(g.value(), g.order()), g); }
inline Jet tanh(const Jet& g) { return compose(detail::derivs_tanh(g.value(), g.order()), g); }

inline Jet pow_const(const Jet& g, double e) {
    return compose(detail::derivs_pow(g.value(), e, g.order()), g);
}

inline Jet sqrt(const Jet& g) { return pow_const(g, 0.5); }

/// Policy adapter evaluating an Expr over Jets (see Expr::eval_with).
struct JetOps {
    int dim;
    int order;
    Jet constant(double v) const { return Jet::constant(v, dim, order); }
    Jet div(const Jet& a, const Jet& b) const { return a / b; }
    Jet pow_const(const Jet& b, double e) const { return ccc::pow_const(b, e); }
    Jet call(FuncId f, const Jet& x) const {
        switch (f) {
            case FuncId::Sin:  return ccc::sin(x);
            case FuncId::Cos:  return ccc::cos(x);
            case FuncId::Exp:  return ccc::exp(x);
            case FuncId::Ln:   return ccc::ln(x);
            case FuncId::Sqrt: return ccc::sqrt(x);
            case FuncId::Tanh: return ccc::tanh(x);
        }
        throw Error("unreachable function id");
    }
};

}  // namespace ccc
