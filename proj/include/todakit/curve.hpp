#pragma once

// Real hyperelliptic curve data:  v^2 = D(u) = u (u - 1) prod_j (u - x_j)(u - u_j)
// with ordered real branch points 0 < 1 < x_1 < u_1 < ... < x_g < u_g.
//
// The spectrum alternates bands (D < 0 inside) and gaps (D > 0 inside):
//   band_0 = [0, 1],  gap_j = [u_{j-1}, x_j],  band_j = [x_j, u_j],  u_0 := 1.
//
// All single-valued work happens on the "top" sheet: the branch of sqrt(D)
// obtained by continuing the positive root from u > u_g through the upper
// half plane.  On the real axis that branch is i^c * sqrt(|D(u)|) where c
// counts the branch points strictly to the right of u.

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "errors.hpp"
#include "polynomial.hpp"

namespace todakit {

enum class BranchKind { Zero, One, X, U };

// Names one branch point: Zero/One are the fixed ends of band_0, X{j}/U{j}
// (1-based j) are the movable edges of band_j.
struct BranchId {
    BranchKind kind = BranchKind::Zero;
    int index = 0; // 1..g for X and U, ignored otherwise

    static BranchId zero() { return {BranchKind::Zero, 0}; }
    static BranchId one() { return {BranchKind::One, 0}; }
    static BranchId x(int j) { return {BranchKind::X, j}; }
    static BranchId u(int j) { return {BranchKind::U, j}; }
};

struct Interval {
    enum class Type { Band, Gap };
    Type type;
    int index; // band 0..g, gap 1..g
    double lo, hi;
};

class CurveSpec {
  public:
    int genus = 0;
    std::vector<double> x; // x_1..x_g
    std::vector<double> u; // u_1..u_g

    CurveSpec() = default;
    CurveSpec(int g, std::vector<double> xs, std::vector<double> us)
        : genus(g), x(std::move(xs)), u(std::move(us)) {
        validate();
    }

    static constexpr double kMinSeparation = 1e-9;

    void validate() const {
        if (genus < 1) throw OrderingViolation("curve genus must be >= 1");
        if (static_cast<int>(x.size()) != genus || static_cast<int>(u.size()) != genus)
            throw DimensionMismatch("curve needs exactly genus band-edge pairs");
        double prev = 1.0; // after the fixed band [0,1]
        for (int j = 0; j < genus; ++j) {
            if (!(x[static_cast<std::size_t>(j)] - prev > kMinSeparation))
                throw OrderingViolation("branch points out of order or too close near x_" +
                                        std::to_string(j + 1));
            if (!(u[static_cast<std::size_t>(j)] - x[static_cast<std::size_t>(j)] > kMinSeparation))
                throw OrderingViolation("band " + std::to_string(j + 1) +
                                        " collapsed: u_j must exceed x_j");
            prev = u[static_cast<std::size_t>(j)];
        }
    }

    // All 2g+2 branch points in ascending order: 0, 1, x_1, u_1, ..., x_g, u_g.
    std::vector<double> branch_points() const {
        std::vector<double> e;
        e.reserve(2 * static_cast<std::size_t>(genus) + 2);
        e.push_back(0.0);
        e.push_back(1.0);
        for (int j = 0; j < genus; ++j) {
            e.push_back(x[static_cast<std::size_t>(j)]);
            e.push_back(u[static_cast<std::size_t>(j)]);
        }
        return e;
    }

    double branch_value(BranchId id) const {
        switch (id.kind) {
            case BranchKind::Zero: return 0.0;
            case BranchKind::One: return 1.0;
            case BranchKind::X: return x.at(static_cast<std::size_t>(id.index - 1));
            case BranchKind::U: return u.at(static_cast<std::size_t>(id.index - 1));
        }
        throw DimensionMismatch("branch_value: bad id");
    }

    // Position of the branch point in the ascending list, 1-based.
    int branch_rank(BranchId id) const {
        switch (id.kind) {
            case BranchKind::Zero: return 1;
            case BranchKind::One: return 2;
            case BranchKind::X: return 2 * id.index + 1;
            case BranchKind::U: return 2 * id.index + 2;
        }
        throw DimensionMismatch("branch_rank: bad id");
    }

    // Alternating alignment sign attached to the m-th ascending branch point
    // (m 1-based): +1 on the outermost band's edges, flipping every second
    // point moving inward.  This is the sign that makes the ramification
    // frames below consistent across the whole curve.
    int branch_sign(BranchId id) const {
        int m = branch_rank(id);
        int k = (2 * genus + 2 - m) / 2;
        return (k % 2 == 0) ? 1 : -1;
    }

    std::vector<Interval> bands() const {
        std::vector<Interval> b;
        b.push_back({Interval::Type::Band, 0, 0.0, 1.0});
        for (int j = 1; j <= genus; ++j)
            b.push_back({Interval::Type::Band, j, x[static_cast<std::size_t>(j - 1)],
                         u[static_cast<std::size_t>(j - 1)]});
        return b;
    }

    std::vector<Interval> gaps() const {
        std::vector<Interval> gp;
        double prev = 1.0;
        for (int j = 1; j <= genus; ++j) {
            gp.push_back({Interval::Type::Gap, j, prev, x[static_cast<std::size_t>(j - 1)]});
            prev = u[static_cast<std::size_t>(j - 1)];
        }
        return gp;
    }

    // D(u) as an expanded polynomial (degree 2g+2, monic).
    RPoly delta_poly() const { return poly_from_roots(branch_points()); }

    double delta(double t) const {
        double p = 1.0;
        for (double e : branch_points()) p *= (t - e);
        return p;
    }

    // prod (t - e) over branch points other than `skip1`/`skip2` (compare by
    // value; pass NaN to skip nothing).  Factoring the singular endpoints out
    // of quadrature integrands this way avoids catastrophic cancellation near
    // the ends of short bands.
    double delta_excluding(double t, double skip1, double skip2) const {
        double p = 1.0;
        for (double e : branch_points()) {
            if (e == skip1 || e == skip2) continue;
            p *= (t - e);
        }
        return p;
    }

    // D'(e) at a branch point, as the exact product over the others.
    double delta_prime_at_branch(BranchId id) const {
        const double a = branch_value(id);
        double p = 1.0;
        for (double e : branch_points())
            if (e != a) p *= (a - e);
        return p;
    }

    int count_branch_points_above(double t) const {
        int c = 0;
        for (double e : branch_points())
            if (e > t) ++c;
        return c;
    }

    // Top-sheet root of D at a real point off the branch locus:
    // i^c * sqrt(|D(t)|) with c branch points strictly to the right.
    cplx sqrt_delta_signed(double t) const {
        double d = delta(t);
        if (std::abs(d) < 1e-18)
            throw BranchPointHit("sqrt_delta_signed evaluated at a branch point");
        static const cplx ipow[4] = {cplx(1, 0), cplx(0, 1), cplx(-1, 0), cplx(0, -1)};
        return ipow[count_branch_points_above(t) % 4] * std::sqrt(std::abs(d));
    }

    // Value of the normalized square-root frame at a ramification point:
    //   w(P_a) = 2 / sqrt(prod_{e != a} (a - e)),  principal complex root.
    // Purely real at u-type points (D' > 0 there), purely imaginary at the
    // others; the alternation is exactly branch_sign's job to track.
    cplx phi_at_branch(BranchId id) const {
        cplx prod = delta_prime_at_branch(id);
        return 2.0 / std::sqrt(prod);
    }

    // Holomorphic-frame evaluation helper: the value at ramification point a
    // of the basis differential normalized to equal 1 at u_k, built from the
    // same principal-branch frame as phi_at_branch:
    //   v_k(P_a) = [phi(P_a) prod_{b != k}(a - u_b)] / [phi(P_{u_k}) prod_{b != k}(u_k - u_b)].
    cplx v_basis_at_branch(int k, BranchId id) const {
        const double a = branch_value(id);
        const double uk = u.at(static_cast<std::size_t>(k - 1));
        cplx num = phi_at_branch(id);
        cplx den = phi_at_branch(BranchId::u(k));
        for (int b = 1; b <= genus; ++b) {
            if (b == k) continue;
            num *= (a - u[static_cast<std::size_t>(b - 1)]);
            den *= (uk - u[static_cast<std::size_t>(b - 1)]);
        }
        return num / den;
    }
};

} // namespace todakit
