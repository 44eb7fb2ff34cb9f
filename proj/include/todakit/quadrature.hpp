#pragma once

// The two quadrature workhorses.
//
//  * chebyshev_singular_integral: \int_a^b f(u)/sqrt((u-a)(b-u)) du by the
//    Gauss-Chebyshev midpoint rule, doubling the node count until two
//    consecutive ladders agree.  This is the right tool for the band/gap
//    integrals, whose integrands are smooth after the endpoint square roots
//    are factored out.
//
//  * tanh_sinh_integral: double-exponential quadrature for integrands that
//    are smooth inside (a,b) but may have integrable singularities at the
//    endpoints of one-sided type, and for the semi-infinite tails after an
//    inversion substitution.
//
// Both are deterministic: node counts walk a fixed ladder, so a converged
// result is a pure function of the integrand and the control settings.

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "errors.hpp"

namespace todakit {

using cplx = std::complex<double>;

struct QuadratureControl {
    double abs_tol = 1e-10; // ladder stops when successive levels agree this well
    int min_nodes = 32;
    int max_nodes = 4096;
};

namespace detail {

template <class T>
double quad_abs(const T& v) { return std::abs(v); }

} // namespace detail

// \int_a^b f(u) / sqrt((u-a)(b-u)) du  with f smooth on [a,b].
// Substituting u = mid + r cos(theta) turns the weight into d(theta) exactly,
// so the midpoint rule in theta is Gauss-Chebyshev quadrature and converges
// geometrically for analytic f.
template <class F>
auto chebyshev_singular_integral(F&& f, double a, double b,
                                 const QuadratureControl& ctl = {})
    -> decltype(f(0.0)) {
    using R = decltype(f(0.0));
    if (!(b > a)) throw QuadratureNotConverged("chebyshev_singular_integral: empty interval");
    const double mid = 0.5 * (a + b), rad = 0.5 * (b - a);
    R prev{};
    bool have_prev = false;
    for (int n = ctl.min_nodes; n <= ctl.max_nodes; n *= 2) {
        R sum{};
        for (int k = 1; k <= n; ++k) {
            double theta = (2.0 * k - 1.0) * M_PI / (2.0 * n);
            sum += f(mid + rad * std::cos(theta));
        }
        R cur = sum * (M_PI / n);
        if (have_prev && detail::quad_abs(cur - prev) < ctl.abs_tol) return cur;
        prev = cur;
        have_prev = true;
    }
    throw QuadratureNotConverged("chebyshev_singular_integral: ladder exhausted");
}

// \int_a^b f(u) du by tanh-sinh (double-exponential) quadrature.  Levels
// halve the step; each level reuses nothing but stays cheap because the
// weights decay doubly exponentially.  f may blow up integrably at the ends.
//
// Nodes are formed from the *nearer* endpoint via the stable expression
// 1 -| tanh(y) | = 2 / (e^{2|y|} + 1); building them as mid + rad*tanh(y)
// instead would round the innermost offsets away and put a ~1e-8 floor on
// endpoint-singular integrands.
template <class F>
auto tanh_sinh_integral(F&& f, double a, double b,
                        const QuadratureControl& ctl = {})
    -> decltype(f(0.0)) {
    using R = decltype(f(0.0));
    if (!(b > a)) throw QuadratureNotConverged("tanh_sinh_integral: empty interval");
    const double rad = 0.5 * (b - a);
    const double tmax = 6.5; // offsets underflow entirely past this
    R prev{};
    bool have_prev = false;
    for (int level = 2; level <= 12; ++level) {
        const double h = tmax / std::ldexp(1.0, level - 1);
        R sum{};
        const int kmax = static_cast<int>(std::floor(tmax / h));
        for (int k = -kmax; k <= kmax; ++k) {
            double t = k * h;
            double y = 0.5 * M_PI * std::sinh(std::abs(t));
            double off = 2.0 / (std::exp(2.0 * y) + 1.0); // 1 - |tanh(y)|
            double w = 0.5 * M_PI * std::cosh(t) * off * (2.0 - off); // = .. * sech^2(y)
            double u = (t < 0.0) ? a + rad * off : b - rad * off;
            if (u <= a || u >= b) continue; // offset below representable spacing
            sum += f(u) * w;
        }
        R cur = sum * (rad * h);
        if (have_prev && detail::quad_abs(cur - prev) < ctl.abs_tol) return cur;
        prev = cur;
        have_prev = true;
    }
    throw QuadratureNotConverged("tanh_sinh_integral: level ladder exhausted");
}

} // namespace todakit
