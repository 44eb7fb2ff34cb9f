#pragma once

// Dense univariate polynomials with ascending coefficient storage.
// Degrees in this library stay tiny (<= 2g+2 with g <= 3 for curve data,
// <= ~16 for Pell certificates), so everything is plain O(n^2) arithmetic.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "errors.hpp"

namespace todakit {

using cplx = std::complex<double>;

template <class T>
struct Poly {
    std::vector<T> c; // c[k] multiplies u^k

    Poly() = default;
    explicit Poly(std::vector<T> coeffs) : c(std::move(coeffs)) {}

    static Poly constant(T v) { return Poly(std::vector<T>{v}); }

    int degree() const { return static_cast<int>(c.size()) - 1; }
    bool empty() const { return c.empty(); }

    T leading() const { return c.empty() ? T{} : c.back(); }

    // Drop trailing coefficients below `eps` in magnitude (keeps at least one).
    void trim(double eps = 0.0) {
        while (c.size() > 1 && std::abs(c.back()) <= eps) c.pop_back();
    }

    template <class X>
    auto operator()(X x) const -> decltype(T{} * x + T{}) {
        decltype(T{} * x + T{}) acc{};
        for (std::size_t i = c.size(); i-- > 0;) acc = acc * x + c[i];
        return acc;
    }

    Poly derivative() const {
        if (c.size() <= 1) return Poly(std::vector<T>{T{}});
        std::vector<T> d(c.size() - 1);
        for (std::size_t k = 1; k < c.size(); ++k) d[k - 1] = static_cast<double>(k) * c[k];
        return Poly(std::move(d));
    }

    Poly operator+(const Poly& o) const {
        std::vector<T> r(std::max(c.size(), o.c.size()), T{});
        for (std::size_t i = 0; i < c.size(); ++i) r[i] += c[i];
        for (std::size_t i = 0; i < o.c.size(); ++i) r[i] += o.c[i];
        return Poly(std::move(r));
    }

    Poly operator-(const Poly& o) const {
        std::vector<T> r(std::max(c.size(), o.c.size()), T{});
        for (std::size_t i = 0; i < c.size(); ++i) r[i] += c[i];
        for (std::size_t i = 0; i < o.c.size(); ++i) r[i] -= o.c[i];
        return Poly(std::move(r));
    }

    Poly operator*(const Poly& o) const {
        if (c.empty() || o.c.empty()) return Poly(std::vector<T>{T{}});
        std::vector<T> r(c.size() + o.c.size() - 1, T{});
        for (std::size_t i = 0; i < c.size(); ++i)
            for (std::size_t j = 0; j < o.c.size(); ++j) r[i + j] += c[i] * o.c[j];
        return Poly(std::move(r));
    }

    Poly operator*(T s) const {
        Poly r = *this;
        for (auto& v : r.c) v = v * s;
        return r;
    }
};

using RPoly = Poly<double>;
using CPoly = Poly<cplx>;

// Quotient/remainder of a by b (b.leading() must be nonzero).
template <class T>
struct DivModResult {
    Poly<T> quotient;
    Poly<T> remainder;
};

template <class T>
DivModResult<T> divmod(const Poly<T>& a, const Poly<T>& b) {
    if (b.empty() || std::abs(b.leading()) == 0.0)
        throw DenominatorVanishes("polynomial division by (numerically) zero divisor");
    std::vector<T> rem = a.c;
    const int db = b.degree();
    const int da = static_cast<int>(rem.size()) - 1;
    if (da < db) return {Poly<T>(std::vector<T>{T{}}), Poly<T>(rem)};
    std::vector<T> quot(static_cast<std::size_t>(da - db) + 1, T{});
    for (int k = da - db; k >= 0; --k) {
        T f = rem[static_cast<std::size_t>(k + db)] / b.c[static_cast<std::size_t>(db)];
        quot[static_cast<std::size_t>(k)] = f;
        for (int j = 0; j <= db; ++j)
            rem[static_cast<std::size_t>(k + j)] -= f * b.c[static_cast<std::size_t>(j)];
    }
    rem.resize(static_cast<std::size_t>(std::max(db, 1)));
    return {Poly<T>(std::move(quot)), Poly<T>(std::move(rem))};
}

// Monic product prod (u - roots[i]).
template <class T>
Poly<T> poly_from_roots(const std::vector<T>& roots) {
    Poly<T> p = Poly<T>::constant(T{1});
    for (const T& r : roots) p = p * Poly<T>(std::vector<T>{-r, T{1}});
    return p;
}

// p(scale*z + shift) as a polynomial in z.  Used to move Pell certificates
// between a normalized support and the coordinates a caller asked for.
template <class T>
Poly<T> poly_affine_compose(const Poly<T>& p, T scale, T shift) {
    Poly<T> result = Poly<T>::constant(T{});
    Poly<T> basis = Poly<T>::constant(T{1}); // (scale*z + shift)^k
    Poly<T> lin(std::vector<T>{shift, scale});
    for (std::size_t k = 0; k < p.c.size(); ++k) {
        result = result + basis * p.c[k];
        basis = basis * lin;
    }
    return result;
}

inline double poly_max_abs_coeff(const RPoly& p) {
    double m = 0.0;
    for (double v : p.c) m = std::max(m, std::abs(v));
    return m;
}

// --- Sturm sequences (real polynomials) -------------------------------------

// Number of distinct real roots of p in the half-open interval (a, b].
// Standard Sturm chain with remainders scaled away; adequate for the small,
// well-separated certificate polynomials this library produces.
inline int sturm_count(const RPoly& p_in, double a, double b) {
    RPoly p = p_in;
    p.trim(poly_max_abs_coeff(p) * 1e-13);
    if (p.degree() < 1) return 0;
    std::vector<RPoly> chain;
    chain.push_back(p);
    chain.push_back(p.derivative());
    while (chain.back().degree() >= 1) {
        auto dm = divmod(chain[chain.size() - 2], chain.back());
        RPoly r = dm.remainder * (-1.0);
        r.trim(std::max(poly_max_abs_coeff(chain[chain.size() - 2]),
                        poly_max_abs_coeff(chain.back())) *
               1e-12);
        if (r.degree() == 0 && std::abs(r.c[0]) == 0.0) break; // exact division
        chain.push_back(r);
    }
    auto sign_changes = [&chain](double t) {
        int changes = 0;
        int prev = 0;
        for (const RPoly& q : chain) {
            double v = q(t);
            int s = (v > 0.0) - (v < 0.0);
            if (s == 0) continue;
            if (prev != 0 && s != prev) ++changes;
            prev = s;
        }
        return changes;
    };
    return sign_changes(a) - sign_changes(b);
}

// --- polynomial square root --------------------------------------------------

// Y with Y^2 ~= S for S of even degree and positive leading coefficient.
// Newton iteration on coefficients: Y <- (Y + S div Y)/2, truncated to the
// target degree; the caller checks the residual S - Y^2 against its own
// tolerance.  Throws NotPerfectSquare on structurally impossible input.
inline RPoly poly_sqrt_newton(const RPoly& s_in, int max_iter = 64) {
    RPoly s = s_in;
    s.trim(poly_max_abs_coeff(s) * 1e-13);
    if (s.degree() % 2 != 0)
        throw NotPerfectSquare("polynomial square root of odd-degree input");
    if (s.leading() <= 0.0)
        throw NotPerfectSquare("polynomial square root needs a positive leading coefficient");
    const int d = s.degree() / 2;
    RPoly y(std::vector<double>(static_cast<std::size_t>(d) + 1, 0.0));
    y.c[static_cast<std::size_t>(d)] = std::sqrt(s.leading());
    if (d == 0) return y;
    double prev_change = std::numeric_limits<double>::max();
    for (int it = 0; it < max_iter; ++it) {
        auto dm = divmod(s, y);
        RPoly next = (y + dm.quotient) * 0.5;
        next.c.resize(static_cast<std::size_t>(d) + 1, 0.0);
        double change = 0.0;
        for (std::size_t k = 0; k < next.c.size(); ++k)
            change = std::max(change, std::abs(next.c[k] - y.c[k]));
        y = next;
        if (change == 0.0 || (change < 1e-14 * poly_max_abs_coeff(y) && change >= prev_change))
            break;
        prev_change = change;
    }
    return y;
}

// --- interpolation -----------------------------------------------------------

// Monomial coefficients of the unique degree-(n-1) interpolant through
// (nodes[i], values[i]).  Newton divided differences expanded to the monomial
// basis; nodes must be pairwise distinct.  Degrees stay small enough here
// that the conversion is well conditioned for Chebyshev-spaced nodes.
template <class T>
Poly<T> interpolate_polynomial(const std::vector<double>& nodes, const std::vector<T>& values) {
    if (nodes.size() != values.size() || nodes.empty())
        throw DimensionMismatch("interpolate_polynomial: node/value size mismatch");
    const std::size_t n = nodes.size();
    std::vector<T> dd = values; // divided-difference table, updated in place
    for (std::size_t level = 1; level < n; ++level) {
        for (std::size_t i = n - 1; i >= level; --i) {
            double denom = nodes[i] - nodes[i - level];
            if (denom == 0.0) throw CoincidentPoints("interpolate_polynomial: repeated node");
            dd[i] = (dd[i] - dd[i - 1]) / denom;
            if (i == level) break;
        }
    }
    // Horner-style expansion of the Newton form.
    Poly<T> result = Poly<T>::constant(dd[n - 1]);
    for (std::size_t i = n - 1; i-- > 0;) {
        Poly<T> lin(std::vector<T>{T{-nodes[i]}, T{1}});
        result = result * lin + Poly<T>::constant(dd[i]);
    }
    result.c.resize(n, T{});
    return result;
}

} // namespace todakit
