#pragma once

// Period data for the curve v^2 = D(u).
//
// Cycle conventions (fixed once, used verbatim everywhere):
//  * a_j winds counterclockwise around gap_j = [u_{j-1}, x_j];
//  * b_j is a clockwise rectangle enclosing the first j bands, crossing the
//    cuts so that a_j o b_j = +1.
// Collapsing those contours onto the real axis, with the top-sheet root
// i^c sqrt(|D|) from curve.hpp, gives for any polynomial differential p du/v
//     oint_{a_j} p du/v = -2 * cut(gap_j, p)
//     oint_{b_j} p du/v = +2 * sum_{k<j} cut(band_k, p)
// where cut(I, p) = int_I p(u)/sqrt_delta_signed(u) du along the top edge.
// With this orientation the a-periods are real, the b-periods purely
// imaginary, and Im(riemann matrix) is positive definite.

#include <cmath>
#include <complex>
#include <vector>

#include "curve.hpp"
#include "errors.hpp"
#include "linalg.hpp"
#include "polynomial.hpp"
#include "quadrature.hpp"

namespace todakit {

// Differential of the third kind with simple poles at the two points over
// infinity: p(u) du/v with p = -u^g + lower order, a-periods equal to -alpha.
struct ThirdKind {
    RPoly p;
    std::vector<double> alpha;
    std::vector<cplx> b_periods;
};

// Differential of the second kind with double poles over infinity:
// p(u) du/v with p = u^{g+1}/2 + ..., residue-free, vanishing a-periods.
// b_periods are purely imaginary; vhat = b_periods / (2 pi i) is real.
struct SecondKind {
    RPoly p;
    std::vector<cplx> b_periods;
    std::vector<double> vhat;
};

// Everything needed to evaluate the symmetric bidifferential W(., P_a) with
// its double pole pinned at the ramification point over a = branch_value(id).
// The bare differential du/((u-a)v) has its pole subtracted by an exact
// differential of h = v/(u-a), leaving the polynomial part R/D:
//   du/((u-a)v) + (2/D) dh = [R(u)/D] du/v,
//   R = [(u-a)(D + D'(u)) - 2 D(u)] / (u-a)^2   (exact division),  D = D'(a).
struct PoleFrame {
    BranchId id;
    double a = 0.0;
    double dprime = 0.0;        // D'(a)
    cplx phi;                   // frame value of du/v at the pole
    int sign = 1;               // alignment sign of the branch point
    RPoly R;                    // degree 2g polynomial from the subtraction
    std::vector<cplx> beta;     // a-periods of (R/D) du/v, divided by phi
};

class PeriodData {
  public:
    CurveSpec curve;
    QuadratureControl quad;

    RMat a_mono;                 // oint_{a_j} u^m du/v, m = 0..2g+2 (real)
    RMat omega_coeffs;           // column k: coefficients of c_k, omega_k = c_k du/v
    double cond_a = 0.0;         // condition number of the normalization solve
    CMat riemann;                // oint_{b_l} omega_k (purely imaginary, symmetric)
    std::vector<double> abel;    // 2 int_{u_g}^inf omega_k on the positive sheet
    RPoly q_gap;                 // monic, one root per gap; O_0 = -q_gap du/v
    std::vector<double> band_weights; // rho_0..rho_g, positive, summing to 1

    explicit PeriodData(CurveSpec c, QuadratureControl q = {}, double max_cond = 1e12)
        : curve(std::move(c)), quad(q) {
        const int g = curve.genus;
        const int mmax = 2 * g + 2;
        gap_plain_.assign(static_cast<std::size_t>(g), {});
        band_plain_.assign(static_cast<std::size_t>(g) + 1, {});
        auto fill = [&](const Interval& iv, std::vector<double>& out) {
            out.resize(static_cast<std::size_t>(mmax) + 1);
            for (int m = 0; m <= mmax; ++m) {
                auto f = [&](double t) {
                    return std::pow(t, m) /
                           std::sqrt(std::abs(curve.delta_excluding(t, iv.lo, iv.hi)));
                };
                out[static_cast<std::size_t>(m)] = chebyshev_singular_integral(f, iv.lo, iv.hi, quad);
            }
        };
        for (const Interval& gp : curve.gaps()) fill(gp, gap_plain_[static_cast<std::size_t>(gp.index - 1)]);
        for (const Interval& bd : curve.bands()) fill(bd, band_plain_[static_cast<std::size_t>(bd.index)]);

        a_mono = RMat(g, mmax + 1);
        for (int j = 1; j <= g; ++j)
            for (int m = 0; m <= mmax; ++m)
                a_mono(j - 1, m) = -2.0 * gap_sign(j) * gap_plain_[static_cast<std::size_t>(j - 1)][static_cast<std::size_t>(m)];

        // normalize the holomorphic basis: solve A C = I on the degree < g block
        RMat A(g, g);
        for (int j = 0; j < g; ++j)
            for (int m = 0; m < g; ++m) A(j, m) = a_mono(j, m);
        cond_a = cond_inf(A);
        if (!(cond_a < max_cond))
            throw SingularPeriodMatrix("a-period normalization is numerically singular");
        LU<double> lu(A);
        omega_coeffs = mat_inverse(A, lu);

        riemann = CMat(g, g);
        for (int l = 1; l <= g; ++l)
            for (int k = 1; k <= g; ++k) riemann(l - 1, k - 1) = b_period(holo(k), l);

        // distinguished third-kind differential: monic gap polynomial with
        // vanishing a-periods, O_0 = -q_gap du/v
        {
            std::vector<double> rhs(static_cast<std::size_t>(g));
            for (int j = 0; j < g; ++j) rhs[static_cast<std::size_t>(j)] = -a_mono(j, g);
            auto sol = lu.solve(rhs);
            sol.push_back(1.0);
            q_gap = RPoly(std::move(sol));
        }

        // band masses carried by O_0: oint_{b_j} O_0 = 2 pi i sum_{k<j} rho_k
        band_weights.resize(static_cast<std::size_t>(g) + 1);
        double total = 0.0;
        for (int k = 0; k <= g; ++k) {
            cplx cutv = cut_interval(curve.bands()[static_cast<std::size_t>(k)], q_gap * (-1.0));
            double rho = (cutv / (cplx(0.0, 1.0) * M_PI)).real();
            band_weights[static_cast<std::size_t>(k)] = rho;
            total += rho;
        }
        if (std::abs(total - 1.0) > 1e-7)
            throw QuadratureNotConverged("band masses failed to sum to one");

        abel.resize(static_cast<std::size_t>(g));
        for (int k = 1; k <= g; ++k)
            abel[static_cast<std::size_t>(k - 1)] = 2.0 * integral_to_infinity(holo(k));
    }

    int genus() const { return curve.genus; }

    // int_I p(u)/sqrt_delta_signed(u) du along the top edge of interval I.
    cplx cut_interval(const Interval& iv, const RPoly& p) const {
        double plain = plain_integral(iv, p);
        if (iv.type == Interval::Type::Gap)
            return cplx(gap_sign(iv.index) * plain, 0.0);
        return cplx(0.0, -band_sign(iv.index) * plain);
    }

    cplx a_period(const RPoly& p, int j) const {
        return -2.0 * cut_interval(curve.gaps()[static_cast<std::size_t>(j - 1)], p);
    }

    cplx b_period(const RPoly& p, int j) const {
        cplx acc = 0.0;
        auto bands = curve.bands();
        for (int k = 0; k < j; ++k) acc += cut_interval(bands[static_cast<std::size_t>(k)], p);
        return 2.0 * acc;
    }

    // coefficients of the k-th normalized holomorphic differential (k = 1..g)
    RPoly holo(int k) const {
        std::vector<double> c(static_cast<std::size_t>(curve.genus));
        for (int m = 0; m < curve.genus; ++m) c[static_cast<std::size_t>(m)] = omega_coeffs(m, k - 1);
        return RPoly(std::move(c));
    }

    // frame value of omega_k at a ramification point
    cplx omega_at_branch(int k, BranchId id) const {
        return holo(k)(curve.branch_value(id)) * curve.phi_at_branch(id);
    }

    ThirdKind third_kind(const std::vector<double>& alpha) const {
        const int g = curve.genus;
        if (static_cast<int>(alpha.size()) != g)
            throw DimensionMismatch("third_kind: alpha needs one entry per handle");
        RMat A(g, g);
        std::vector<double> rhs(static_cast<std::size_t>(g));
        for (int j = 0; j < g; ++j) {
            for (int m = 0; m < g; ++m) A(j, m) = a_mono(j, m);
            rhs[static_cast<std::size_t>(j)] = a_mono(j, g) - alpha[static_cast<std::size_t>(j)];
        }
        LU<double> lu(A);
        if (lu.singular) throw SingularPeriodMatrix("third_kind: normalization solve failed");
        auto beta = lu.solve(rhs);
        beta.push_back(-1.0);
        ThirdKind out;
        out.p = RPoly(std::move(beta));
        out.alpha = alpha;
        out.b_periods.resize(static_cast<std::size_t>(g));
        for (int k = 1; k <= g; ++k)
            out.b_periods[static_cast<std::size_t>(k - 1)] = b_period(out.p, k);
        return out;
    }

    SecondKind second_kind() const {
        const int g = curve.genus;
        double s1 = 0.0;
        for (double e : curve.branch_points()) s1 += e;
        RMat A(g, g);
        std::vector<double> rhs(static_cast<std::size_t>(g));
        for (int j = 0; j < g; ++j) {
            for (int m = 0; m < g; ++m) A(j, m) = a_mono(j, m);
            rhs[static_cast<std::size_t>(j)] = -(0.5 * a_mono(j, g + 1) - 0.25 * s1 * a_mono(j, g));
        }
        LU<double> lu(A);
        if (lu.singular) throw SingularPeriodMatrix("second_kind: normalization solve failed");
        auto gamma = lu.solve(rhs);
        gamma.push_back(-0.25 * s1);
        gamma.push_back(0.5);
        SecondKind out;
        out.p = RPoly(std::move(gamma));
        out.b_periods.resize(static_cast<std::size_t>(g));
        out.vhat.resize(static_cast<std::size_t>(g));
        for (int k = 1; k <= g; ++k) {
            cplx bp = b_period(out.p, k);
            out.b_periods[static_cast<std::size_t>(k - 1)] = bp;
            out.vhat[static_cast<std::size_t>(k - 1)] = bp.imag() / (2.0 * M_PI);
        }
        return out;
    }

    PoleFrame pole_frame(BranchId id) const {
        PoleFrame f;
        f.id = id;
        f.a = curve.branch_value(id);
        f.dprime = curve.delta_prime_at_branch(id);
        f.phi = curve.phi_at_branch(id);
        f.sign = curve.branch_sign(id);
        RPoly delta = curve.delta_poly();
        RPoly lin(std::vector<double>{-f.a, 1.0});
        RPoly N = lin * (delta.derivative() + RPoly::constant(f.dprime)) - delta * 2.0;
        double scale = poly_max_abs_coeff(N);
        auto d1 = divmod(N, lin);
        if (poly_max_abs_coeff(d1.remainder) > 1e-8 * scale)
            throw Error("pole subtraction lost exactness (first division)");
        auto d2 = divmod(d1.quotient, lin);
        if (poly_max_abs_coeff(d2.remainder) > 1e-8 * scale)
            throw Error("pole subtraction lost exactness (second division)");
        f.R = d2.quotient;
        f.beta.resize(static_cast<std::size_t>(curve.genus));
        for (int l = 1; l <= curve.genus; ++l)
            f.beta[static_cast<std::size_t>(l - 1)] = a_period(f.R, l) / (f.dprime * f.phi);
        return f;
    }

    // W(P_at, P_{f.id}): value of the normalized symmetric bidifferential in
    // the principal ramification frames at both points.
    cplx w_eval(const PoleFrame& f, BranchId at) const {
        double ak = curve.branch_value(at);
        if (ak == f.a) throw CoincidentPoints("w_eval: both points at the same branch point");
        cplx phik = curve.phi_at_branch(at);
        cplx val = (phik / f.phi) / (ak - f.a);
        for (int l = 1; l <= curve.genus; ++l)
            val -= f.beta[static_cast<std::size_t>(l - 1)] * holo(l)(ak) * phik;
        return val;
    }

    // oint_{b_l} W(., P_{f.id});  equals 2 pi i omega_l(P_{f.id}).
    cplx w_b_period(const PoleFrame& f, int l) const {
        cplx val = b_period(f.R, l) / (f.dprime * f.phi);
        for (int m = 1; m <= curve.genus; ++m)
            val -= f.beta[static_cast<std::size_t>(m - 1)] * riemann(l - 1, m - 1);
        return val;
    }

  private:
    std::vector<std::vector<double>> gap_plain_;  // [j-1][m] int u^m / sqrt(|D|)
    std::vector<std::vector<double>> band_plain_; // [k][m]

    int gap_sign(int j) const { return ((curve.genus - j + 1) % 2 == 0) ? 1 : -1; }
    int band_sign(int k) const { return ((curve.genus - k) % 2 == 0) ? 1 : -1; }

    double plain_integral(const Interval& iv, const RPoly& p) const {
        const auto& table = (iv.type == Interval::Type::Gap)
                                ? gap_plain_[static_cast<std::size_t>(iv.index - 1)]
                                : band_plain_[static_cast<std::size_t>(iv.index)];
        if (p.c.size() > table.size()) {
            auto f = [&](double t) {
                return p(t) / std::sqrt(std::abs(curve.delta_excluding(t, iv.lo, iv.hi)));
            };
            return chebyshev_singular_integral(f, iv.lo, iv.hi, quad);
        }
        double acc = 0.0;
        for (std::size_t m = 0; m < p.c.size(); ++m) acc += p.c[m] * table[m];
        return acc;
    }

    // int_{u_g}^inf p(u)/sqrt(D(u)) du on the sheet where the root is +sqrt;
    // split at 2 u_g, with u = u_g + s^2 on the near piece and u = 1/s on the
    // far piece so both integrands are smooth.
    double integral_to_infinity(const RPoly& p) const {
        const double ug = curve.u.back();
        const double B = 2.0 * ug;
        auto near = [&](double s) {
            double t = ug + s * s;
            return 2.0 * p(t) / std::sqrt(std::abs(curve.delta_excluding(t, ug, ug)));
        };
        double near_val = tanh_sinh_integral(near, 0.0, std::sqrt(B - ug), quad);
        const int g = curve.genus;
        auto far = [&](double s) {
            double num = 0.0; // p(1/s) s^{g-1} expanded; p has degree <= g-1
            for (std::size_t m = 0; m < p.c.size(); ++m)
                num += p.c[m] * std::pow(s, g - 1 - static_cast<int>(m));
            double prod = 1.0;
            for (double e : curve.branch_points()) prod *= (1.0 - e * s);
            return num / std::sqrt(prod);
        };
        double far_val = tanh_sinh_integral(far, 0.0, 1.0 / B, quad);
        return near_val + far_val;
    }
};

} // namespace todakit
