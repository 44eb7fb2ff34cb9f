#pragma once

// Truncated Riemann theta series over the period lattice Z^g + B Z^g:
//
//     theta(z | B) = sum_{n in Z^g} exp(pi i n^T B n + 2 pi i n^T z),
//
// summed over the box |n_i| <= R.  The truncation radius is chosen from the
// smallest eigenvalue of Im B so the neglected tail is below 1e-12, and the
// summation order is fixed (lexicographic) so results are bit-reproducible.
// Real parts of the argument are reduced by their nearest integer first --
// the series has exact period 1 in each coordinate, and reducing keeps the
// phase arguments small.

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "errors.hpp"
#include "linalg.hpp"

namespace todakit {

inline double theta_tail_bound(double lambda_min, int radius, int g) {
    return std::exp(-M_PI * lambda_min * radius * radius) *
           std::pow(2.0 * radius + 1.0, g);
}

namespace detail {

inline double min_imag_eigenvalue(const CMat& riemann) {
    RMat Y(riemann.n, riemann.n);
    for (int i = 0; i < riemann.n; ++i)
        for (int j = 0; j < riemann.n; ++j) Y(i, j) = riemann(i, j).imag();
    return sym_eig_min(Y);
}

} // namespace detail

struct ThetaParams {
    CMat riemann; // period matrix B
    int radius = 0;

    void validate() const {
        if (riemann.n != riemann.m || riemann.n < 1)
            throw DimensionMismatch("theta: period matrix must be square");
        for (int i = 0; i < riemann.n; ++i)
            for (int j = i + 1; j < riemann.n; ++j)
                if (std::abs(riemann(i, j) - riemann(j, i)) > 1e-8)
                    throw SingularPeriodMatrix("theta: period matrix must be symmetric");
        double lam = detail::min_imag_eigenvalue(riemann);
        if (!(lam > 0.0))
            throw SingularPeriodMatrix("theta: Im B must be positive definite");
        if (radius < 1 || theta_tail_bound(lam, radius, riemann.n) >= 1e-12)
            throw Error("theta: truncation radius too small for the target accuracy");
    }
};

// Smallest radius whose tail bound clears 1e-12 for this period matrix.
inline ThetaParams theta_params_for(const CMat& riemann) {
    ThetaParams tp;
    tp.riemann = riemann;
    tp.radius = 1;
    while (theta_tail_bound(detail::min_imag_eigenvalue(riemann), tp.radius, riemann.n) >= 1e-12) {
        if (++tp.radius > 512)
            throw SingularPeriodMatrix("theta: period matrix too degenerate to truncate");
    }
    tp.validate();
    return tp;
}

namespace detail {

inline std::vector<cplx> theta_reduce(const std::vector<cplx>& z) {
    std::vector<cplx> r(z.size());
    for (std::size_t k = 0; k < z.size(); ++k)
        r[k] = cplx(z[k].real() - std::nearbyint(z[k].real()), z[k].imag());
    return r;
}

// Shared summation loop; `weight` multiplies each term (1 for the series
// itself, 2 pi i n.d for the directional derivative).
template <class Fn>
cplx theta_sum(const std::vector<cplx>& z, const ThetaParams& tp, Fn&& weight) {
    const int g = tp.riemann.n;
    if (static_cast<int>(z.size()) != g)
        throw DimensionMismatch("theta: argument dimension does not match the period matrix");
    const std::vector<cplx> zr = theta_reduce(z);
    std::vector<int> n(static_cast<std::size_t>(g), -tp.radius);
    cplx total{};
    for (;;) {
        cplx quad{}, lin{};
        for (int j = 0; j < g; ++j) {
            const double nj = n[static_cast<std::size_t>(j)];
            for (int k = 0; k < g; ++k)
                quad += nj * static_cast<double>(n[static_cast<std::size_t>(k)]) * tp.riemann(j, k);
            lin += nj * zr[static_cast<std::size_t>(j)];
        }
        total += weight(n) * std::exp(cplx(0.0, M_PI) * quad + cplx(0.0, 2.0 * M_PI) * lin);
        int j = g - 1;
        while (j >= 0 && n[static_cast<std::size_t>(j)] == tp.radius) {
            n[static_cast<std::size_t>(j)] = -tp.radius;
            --j;
        }
        if (j < 0) break;
        ++n[static_cast<std::size_t>(j)];
    }
    return total;
}

} // namespace detail

inline cplx riemann_theta(const std::vector<cplx>& z, const ThetaParams& tp) {
    return detail::theta_sum(z, tp, [](const std::vector<int>&) { return cplx(1.0, 0.0); });
}

// Directional derivative of the series along `dir`: each term picks up the
// factor 2 pi i n.dir.
inline cplx riemann_theta_deriv(const std::vector<cplx>& z, const std::vector<cplx>& dir,
                                const ThetaParams& tp) {
    if (dir.size() != z.size())
        throw DimensionMismatch("theta: direction dimension does not match the argument");
    return detail::theta_sum(z, tp, [&](const std::vector<int>& n) {
        cplx nd{};
        for (std::size_t k = 0; k < n.size(); ++k)
            nd += static_cast<double>(n[k]) * dir[k];
        return cplx(0.0, 2.0 * M_PI) * nd;
    });
}

} // namespace todakit
