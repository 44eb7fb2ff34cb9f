#pragma once

// Extremal (generalized Chebyshev) polynomials on the band system of a curve.
//
// A band system carries a degree-N extremal polynomial P exactly when every
// band mass is an integer multiple of 1/N; then there is a companion Q with
//     P(u)^2 - D(u) Q(u)^2 = 1,         deg Q = N - g - 1,
// |P| <= 1 on the bands and |P| > 1 elsewhere.  P is reconstructed from the
// weightless third-kind differential O_0: the function P + vQ has divisor
// N(inf+ - inf-), so along the real axis
//     P(z) = +-cosh(N * int_0^z O_0),
// where the antiderivative is real in gaps and outside the support, advances
// by i pi rho_l across band l, and full gaps contribute nothing.  Certificates
// record P, Q, D, a sup-norm residual of the identity on a verification grid,
// and the signature (interior critical points per band).
//
// The parity helpers move certificates between a symmetric support in z and
// its squared image in w = z^2, which is where deformations of symmetric
// band systems are actually computed.

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdlib>
#include <string>
#include <utility>
#include <vector>

#include "curve.hpp"
#include "equilibrium.hpp"
#include "errors.hpp"
#include "periods.hpp"
#include "polynomial.hpp"
#include "quadrature.hpp"

namespace todakit {

// A verified solution of P^2 - D Q^2 = 1 on the band system of one curve.
struct PellCertificate {
    int N = 0;                  // degree of P
    RPoly P;                    // positive leading coefficient
    RPoly Q;                    // degree N - g - 1
    RPoly delta;                // the monic band polynomial D
    double residual = 0.0;      // sup |P^2 - 1 - D Q^2| over the verification grid
    std::vector<int> signature; // interior critical points per band
};

// Default verification grid: 512 Chebyshev-spaced points per band (endpoints
// included, where the identity is tightest) plus every gap midpoint.
inline std::vector<double> pell_grid(const CurveSpec& curve) {
    std::vector<double> grid;
    for (const Interval& band : curve.bands()) {
        const double mid = 0.5 * (band.lo + band.hi), rad = 0.5 * (band.hi - band.lo);
        for (int i = 0; i < 512; ++i)
            grid.push_back(mid + rad * std::cos(M_PI * i / 511.0));
    }
    for (const Interval& gap : curve.gaps()) grid.push_back(0.5 * (gap.lo + gap.hi));
    return grid;
}

inline double pell_residual(const RPoly& P, const RPoly& Q, const RPoly& delta,
                            const std::vector<double>& grid) {
    double worst = 0.0;
    for (double t : grid) {
        double p = P(t), q = Q(t);
        worst = std::max(worst, std::abs(p * p - 1.0 - delta(t) * q * q));
    }
    return worst;
}

// Critical points of P strictly inside each band.  Band endpoints are zeros
// of D, where the identity pins P' away from zero whenever Q does not vanish,
// so the half-open Sturm count equals the open-interval count for
// certificate-grade input.
inline std::vector<int> signature_of(const RPoly& P, const CurveSpec& curve) {
    RPoly dp = P.derivative();
    std::vector<int> sig;
    for (const Interval& band : curve.bands())
        sig.push_back(sturm_count(dp, band.lo, band.hi));
    return sig;
}

namespace detail {

// i^{-c}: reciprocal phase of the top-sheet root on a segment with c branch
// points strictly to its right.
inline cplx inverse_quarter_turn(int c) {
    static const cplx inv[4] = {cplx(1, 0), cplx(0, -1), cplx(-1, 0), cplx(0, 1)};
    return inv[c % 4];
}

// Antiderivative z -> int_0^z of the weightless differential along the top
// edge of the real axis.  Values at branch points are cached once; a query
// adds at most one partial-segment integral.
class WeightlessAntiderivative {
  public:
    explicit WeightlessAntiderivative(const PeriodData& pd)
        : curve_(&pd.curve), quad_(pd.quad), p_(pd.q_gap * (-1.0)),
          pts_(pd.curve.branch_points()) {
        prefix_.assign(pts_.size(), cplx{});
        for (std::size_t i = 0; i + 1 < pts_.size(); ++i)
            prefix_[i + 1] = prefix_[i] + segment(pts_[i], pts_[i + 1]);
    }

    cplx operator()(double z) const {
        if (z <= pts_.front()) {
            if (z == pts_.front()) return prefix_.front();
            return -partial(z, pts_.front(), false);
        }
        std::size_t i = 0;
        while (i + 1 < pts_.size() && pts_[i + 1] <= z) ++i;
        if (z == pts_[i]) return prefix_[i];
        return prefix_[i] + partial(pts_[i], z, true);
    }

  private:
    const CurveSpec* curve_;
    QuadratureControl quad_;
    RPoly p_;
    std::vector<double> pts_;
    std::vector<cplx> prefix_;

    cplx phase(double lo, double hi) const {
        return inverse_quarter_turn(curve_->count_branch_points_above(0.5 * (lo + hi)));
    }

    cplx segment(double lo, double hi) const { // both endpoints branch points
        return phase(lo, hi) * edge_density_integral(*curve_, lo, hi, p_, quad_);
    }

    cplx partial(double lo, double hi, bool singular_at_lo) const {
        return phase(lo, hi) * one_sided_density_integral(*curve_, lo, hi, p_, singular_at_lo, quad_);
    }
};

} // namespace detail

// Build the degree-N extremal polynomial of a band system whose masses are
// k_j/N.  Samples cosh of N times the weightless antiderivative at N+1
// Chebyshev-spaced nodes on [-0.1, u_g + 0.1] (base point z = 0, where the
// value is +-1), interpolates, fixes the overall sign so the leading
// coefficient is positive, and extracts Q as the polynomial square root of
// (P^2-1)/D.  Throws NotRational when the masses are not k/N within 1e-8 and
// NotPerfectSquare when the square-root extraction leaves more than a 1e-8
// relative coefficient residue (the degree/multiplicity hypothesis is wrong).
inline PellCertificate chebyshev_from_curve(const CurveSpec& curve, int N,
                                            const std::vector<int>& k,
                                            QuadratureControl quad = {}) {
    const int g = curve.genus;
    if (static_cast<int>(k.size()) != g + 1)
        throw DimensionMismatch("chebyshev_from_curve: one multiplicity per band");

    PeriodData pd(curve, quad);
    MeasureVector masses{pd.band_weights};
    if (!rational_measure_detect(masses, N, 1e-8))
        throw NotRational("band masses share no denominator up to the requested degree");
    long long total = 0;
    for (std::size_t j = 0; j < k.size(); ++j) {
        if (k[j] < 1) throw NotRational("band multiplicities must be positive");
        total += k[j];
        if (std::abs(masses.rho[j] - static_cast<double>(k[j]) / N) >= 1e-8)
            throw NotRational("band " + std::to_string(j) + " mass is not k_j/N");
    }
    if (total != N) throw NotRational("band multiplicities must sum to the degree");

    detail::WeightlessAntiderivative accum(pd);
    const double lo = -0.1, hi = curve.u.back() + 0.1;
    const double mid = 0.5 * (lo + hi), rad = 0.5 * (hi - lo);
    std::vector<double> nodes(static_cast<std::size_t>(N) + 1);
    std::vector<double> values(static_cast<std::size_t>(N) + 1);
    for (int i = 0; i <= N; ++i) {
        double z = mid + rad * std::cos(M_PI * i / N);
        nodes[static_cast<std::size_t>(i)] = z;
        values[static_cast<std::size_t>(i)] =
            std::cosh(static_cast<double>(N) * accum(z)).real();
    }

    PellCertificate cert;
    cert.N = N;
    cert.P = interpolate_polynomial(nodes, values);
    if (cert.P.leading() < 0.0) cert.P = cert.P * (-1.0);
    cert.delta = curve.delta_poly();

    RPoly p2m1 = cert.P * cert.P - RPoly::constant(1.0);
    RPoly q2 = divmod(p2m1, cert.delta).quotient; // degree 2(N-g-1) by construction
    cert.Q = poly_sqrt_newton(q2);
    RPoly defect = q2 - cert.Q * cert.Q;
    if (poly_max_abs_coeff(defect) > 1e-8 * (1.0 + poly_max_abs_coeff(q2)))
        throw NotPerfectSquare("companion polynomial is not a near-perfect square");

    cert.residual = pell_residual(cert.P, cert.Q, cert.delta, pell_grid(curve));
    cert.signature = signature_of(cert.P, curve);
    return cert;
}

// --- parity reductions between z and w = z^2 ---------------------------------

// Even half: phat with P(z) = phat(z^2).  Odd-order coefficients must vanish
// to 1e-12 relative accuracy.
inline RPoly parity_reduce(const RPoly& P) {
    const double scale = poly_max_abs_coeff(P);
    std::vector<double> h((P.c.size() + 1) / 2, 0.0);
    for (std::size_t i = 0; i < P.c.size(); ++i) {
        if (i % 2 == 0) {
            h[i / 2] = P.c[i];
        } else if (std::abs(P.c[i]) > 1e-12 * scale) {
            throw ParityViolation("even reduction: odd coefficient " + std::to_string(i) +
                                  " does not vanish");
        }
    }
    return RPoly(std::move(h));
}

// Odd half: phat with P(z) = z * phat(z^2).
inline RPoly parity_reduce_odd(const RPoly& P) {
    const double scale = poly_max_abs_coeff(P);
    std::vector<double> h(P.c.size() / 2, 0.0);
    if (h.empty()) h.assign(1, 0.0);
    for (std::size_t i = 0; i < P.c.size(); ++i) {
        if (i % 2 == 1) {
            h[i / 2] = P.c[i];
        } else if (std::abs(P.c[i]) > 1e-12 * scale) {
            throw ParityViolation("odd reduction: even coefficient " + std::to_string(i) +
                                  " does not vanish");
        }
    }
    return RPoly(std::move(h));
}

// Reduction together with its w-coordinate verification data.
struct ParityReduction {
    RPoly phat;                   // P(z) = phat(z^2), or z*phat(z^2) in the odd case
    RPoly qhat;                   // cofactor extracted from the w-coordinate relation
    double residual = 0.0;        // sup-norm of that relation on the w grid
    RPoly ptilde;                 // odd case only: 2 w phat^2 - 1
    double ptilde_residual = 0.0; // odd case only: residual of the doubled relation
};

namespace detail {

// Chebyshev grid on [0, B] with B the Cauchy root bound of d; all squared
// supports live in the nonnegative axis, so this brackets every interval.
inline std::vector<double> w_domain_grid(const RPoly& d) {
    double bound = 0.0;
    for (std::size_t i = 0; i + 1 < d.c.size(); ++i)
        bound = std::max(bound, std::abs(d.c[i] / d.c.back()));
    const double hi = 1.0 + bound, mid = 0.5 * hi, rad = 0.5 * hi;
    std::vector<double> grid(512);
    for (int i = 0; i < 512; ++i) grid[static_cast<std::size_t>(i)] = mid + rad * std::cos(M_PI * i / 511.0);
    return grid;
}

// Solve A*phat^2 - 1 = delta_w * qhat^2 for qhat and report the sup-norm
// defect of the assembled relation.
inline void attach_cofactor(ParityReduction& out, const RPoly& weight, const RPoly& delta_w) {
    RPoly lhs = weight * out.phat * out.phat - RPoly::constant(1.0);
    RPoly q2 = divmod(lhs, delta_w).quotient;
    out.qhat = poly_sqrt_newton(q2);
    RPoly defect = q2 - out.qhat * out.qhat;
    if (poly_max_abs_coeff(defect) > 1e-8 * (1.0 + poly_max_abs_coeff(q2)))
        throw NotPerfectSquare("squared-coordinate cofactor is not a near-perfect square");
    RPoly full = lhs - delta_w * out.qhat * out.qhat;
    double worst = 0.0;
    for (double w : w_domain_grid(delta_w)) worst = std::max(worst, std::abs(full(w)));
    out.residual = worst;
}

} // namespace detail

// Even reduction verified against phat^2 - delta_w qhat^2 = 1.  When the
// squared support starts at zero, the caller folds the w factor into delta_w.
inline ParityReduction parity_reduce(const RPoly& P, const RPoly& delta_w) {
    ParityReduction out;
    out.phat = parity_reduce(P);
    detail::attach_cofactor(out, RPoly::constant(1.0), delta_w);
    return out;
}

// Odd reduction verified against w phat^2 - delta_w qhat^2 = 1, plus the
// doubled polynomial ptilde = 2 w phat^2 - 1 with its own identity
// ptilde^2 - 4 w delta_w phat^2 qhat^2 = 1.
inline ParityReduction parity_reduce_odd(const RPoly& P, const RPoly& delta_w) {
    ParityReduction out;
    out.phat = parity_reduce_odd(P);
    RPoly w({0.0, 1.0});
    detail::attach_cofactor(out, w, delta_w);
    RPoly wp2 = w * out.phat * out.phat;
    out.ptilde = wp2 * 2.0 - RPoly::constant(1.0);
    RPoly defect = out.ptilde * out.ptilde - RPoly::constant(1.0) -
                   (w * delta_w * out.phat * out.phat * out.qhat * out.qhat) * 4.0;
    double worst = 0.0;
    for (double t : detail::w_domain_grid(delta_w)) worst = std::max(worst, std::abs(defect(t)));
    out.ptilde_residual = worst;
    return out;
}

// --- symmetric supports and their squared images ------------------------------

// Nonnegative intervals in w together with their symmetric preimage in z.
struct SymmetricSupport {
    IntervalSystem half;                           // the w = z^2 intervals
    std::vector<std::pair<double, double>> lifted; // symmetric z intervals, ascending
};

// Lift a nonnegative interval system through w = z^2.  With includes_zero the
// leftmost interval [0, w_1] becomes the central band [-sqrt(w_1), sqrt(w_1)];
// otherwise every interval splits into a mirror pair.
inline SymmetricSupport symmetric_lift(const IntervalSystem& half, bool includes_zero) {
    if (half.bands.empty()) throw DimensionMismatch("symmetric_lift: empty interval system");
    double prev = -1.0;
    for (const auto& [lo, hi] : half.bands) {
        if (lo < 0.0 || hi < 0.0)
            throw NegativeEndpoint("symmetric_lift: squared coordinates cannot be negative");
        if (!(hi > lo) || !(lo > prev))
            throw OrderingViolation("symmetric_lift: intervals must be disjoint and ascending");
        prev = hi;
    }
    if (includes_zero != (half.bands.front().first == 0.0))
        throw InputParseError(
            "symmetric_lift: includes_zero must match a leftmost interval starting at 0");

    SymmetricSupport out;
    out.half = half;
    std::vector<std::pair<double, double>> roots;
    for (const auto& [lo, hi] : half.bands)
        roots.emplace_back(std::sqrt(lo), std::sqrt(hi));
    const std::size_t first = includes_zero ? 1 : 0;
    for (std::size_t i = roots.size(); i-- > first;)
        out.lifted.emplace_back(-roots[i].second, -roots[i].first);
    if (includes_zero) out.lifted.emplace_back(-roots[0].second, roots[0].second);
    for (std::size_t i = first; i < roots.size(); ++i) out.lifted.push_back(roots[i]);
    return out;
}

// Squared image of a symmetric z-interval list: the inverse of symmetric_lift.
// Verifies the mirror symmetry before discarding the negative half.
inline IntervalSystem square_lifted(const std::vector<std::pair<double, double>>& lifted) {
    if (lifted.empty()) throw DimensionMismatch("square_lifted: empty interval list");
    double span = 0.0;
    for (const auto& [lo, hi] : lifted) span = std::max({span, std::abs(lo), std::abs(hi)});
    const std::size_t n = lifted.size();
    for (std::size_t i = 0; i < n; ++i) {
        const auto& a = lifted[i];
        const auto& b = lifted[n - 1 - i];
        if (std::abs(a.first + b.second) > 1e-15 * span ||
            std::abs(a.second + b.first) > 1e-15 * span)
            throw InputParseError("square_lifted: intervals are not symmetric under z -> -z");
    }
    IntervalSystem out;
    if (n % 2 == 1) { // central band [-r, r] squares onto [0, r^2]
        double r = lifted[n / 2].second;
        out.bands.emplace_back(0.0, r * r);
    }
    for (std::size_t i = (n + 1) / 2; i < n; ++i)
        out.bands.emplace_back(lifted[i].first * lifted[i].first,
                               lifted[i].second * lifted[i].second);
    return out;
}

} // namespace todakit
