#pragma once

// Deformations of the curve that keep the periods of a third-kind
// differential fixed.  Pinning the a-periods to -alpha and freezing the
// b-periods at their initial values makes the right band edges u_m implicit
// functions of the left edges x_i; this header provides
//  * the first-order flow matrix du_m/dx_i,
//  * the fully rational second-order system those functions satisfy,
//  * an RK4 path integrator with period-drift monitoring,
//  * a Newton corrector that re-solves the period constraints directly and
//    serves as an independent oracle for the integrator,
//  * validators for the residue/rational identities and for the variational
//    (finite-difference) formulas behind all of the above.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "curve.hpp"
#include "errors.hpp"
#include "linalg.hpp"
#include "periods.hpp"
#include "polynomial.hpp"
#include "quadrature.hpp"

namespace todakit {

// Frame value of the third-kind differential p du/v at a ramification point.
inline cplx third_kind_at_branch(const PeriodData& pd, const ThirdKind& om, BranchId id) {
    return om.p(pd.curve.branch_value(id)) * pd.curve.phi_at_branch(id);
}

// The flow's defining data.  target_b is frozen when the state is created;
// every trajectory sample reports the deviation from it.
struct FlowState {
    CurveSpec curve;
    std::vector<double> alpha;
    std::vector<cplx> target_b;
};

inline FlowState make_flow_state(CurveSpec c, std::vector<double> alpha,
                                 QuadratureControl quad = {}) {
    PeriodData pd(c, quad);
    ThirdKind tk = pd.third_kind(alpha);
    return FlowState{std::move(c), std::move(alpha), std::move(tk.b_periods)};
}

struct FlowSample {
    std::vector<double> x;
    std::vector<double> u;
    std::vector<cplx> drift; // current b-periods minus the frozen target
    double step = 0.0;
};

struct FlowTrajectory {
    std::vector<FlowSample> samples;
    std::string abort_reason; // empty when the whole path was integrated
    bool completed() const { return abort_reason.empty(); }
};

// First-order flow matrix, entry (m,i) = du_m/dx_i along the isoperiodic
// deformation:
//     du_m/dx_i = -Omega(P_{x_i}) v_m(P_{x_i}) / Omega(P_{u_m}).
// The result depends on the differential only through the ratio of its frame
// values at the two points, so rescaling om.p by a constant cancels exactly.
inline CMat first_order_rhs(const PeriodData& pd, const ThirdKind& om,
                            double denominator_floor = 1e-9) {
    const int g = pd.genus();
    std::vector<cplx> omu(static_cast<std::size_t>(g));
    for (int m = 1; m <= g; ++m) {
        cplx val = third_kind_at_branch(pd, om, BranchId::u(m));
        if (std::abs(val) < denominator_floor)
            throw DenominatorVanishes("flow undefined: differential vanishes at band edge u_" +
                                      std::to_string(m));
        omu[static_cast<std::size_t>(m - 1)] = val;
    }
    CMat out(g, g);
    for (int i = 1; i <= g; ++i) {
        cplx omx = third_kind_at_branch(pd, om, BranchId::x(i));
        for (int m = 1; m <= g; ++m)
            out(m - 1, i - 1) = -(omx / omu[static_cast<std::size_t>(m - 1)]) *
                                pd.curve.v_basis_at_branch(m, BranchId::x(i));
    }
    return out;
}

inline CMat first_order_rhs(const FlowState& state, QuadratureControl quad = {},
                            double denominator_floor = 1e-9) {
    PeriodData pd(state.curve, quad);
    return first_order_rhs(pd, pd.third_kind(state.alpha), denominator_floor);
}

namespace detail {

// All denominators of the rational second-order system are differences of
// points in {0, 1, x_1..x_g, u_1..u_g}; reject the whole evaluation if any
// pair is closer than the floor.
inline void require_distinct(const std::vector<double>& x, const std::vector<double>& u,
                             double floor) {
    std::vector<double> pts{0.0, 1.0};
    pts.insert(pts.end(), x.begin(), x.end());
    pts.insert(pts.end(), u.begin(), u.end());
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j)
            if (std::abs(pts[i] - pts[j]) < floor)
                throw PoleHit("rational flow system: two marked points nearly coincide");
}

} // namespace detail

// Second derivatives of the dependent edges, evaluated from the rational
// right-hand sides of the deformation system; no quadrature involved.
// mixed[m-1](k-1, n-1) holds d2 u_m / dx_k dx_n for k != n (diagonal left 0),
// pure(m-1, k-1) holds d2 u_m / dx_k^2.  du(m-1, i-1) = du_m/dx_i on input.
struct SecondOrderTables {
    std::vector<RMat> mixed;
    RMat pure;
};

inline SecondOrderTables second_order_rhs(const std::vector<double>& x,
                                          const std::vector<double>& u, const RMat& du,
                                          double floor = 1e-9) {
    const int g = static_cast<int>(x.size());
    if (static_cast<int>(u.size()) != g || du.n != g || du.m != g)
        throw DimensionMismatch("second_order_rhs: x, u, du sizes disagree");
    detail::require_distinct(x, u, floor);
    auto X = [&](int i) { return x[static_cast<std::size_t>(i - 1)]; };
    auto U = [&](int j) { return u[static_cast<std::size_t>(j - 1)]; };
    auto D = [&](int m, int i) { return du(m - 1, i - 1); };

    // pieces shared between the mixed and the pure tables, per row m
    auto band_product = [&](int m) { // prod_{b != m} (u_m - u_b)
        double p = 1.0;
        for (int b = 1; b <= g; ++b)
            if (b != m) p *= U(m) - U(b);
        return p;
    };
    auto cross_product = [&](int j) { // prod_a (x_j - u_a)
        double p = 1.0;
        for (int a = 1; a <= g; ++a) p *= X(j) - U(a);
        return p;
    };
    auto gap_sum = [&](int m) { // sum_{j != m} 1/(u_m - u_j)
        double s = 0.0;
        for (int j = 1; j <= g; ++j)
            if (j != m) s += 1.0 / (U(m) - U(j));
        return s;
    };
    // the three trailing sums common to both tables, already summed over i
    auto normalization_tail = [&](int m) {
        double dsum = 0.0, xdsum = 0.0;
        for (int i = 1; i <= g; ++i) {
            dsum += D(m, i);
            xdsum += X(i) * D(m, i);
        }
        double tail = -0.5 * dsum * (gap_sum(m) + 1.0 / U(m));
        tail -= xdsum / (2.0 * U(m) * (U(m) - 1.0));
        double bp = band_product(m);
        for (int j = 1; j <= g; ++j) tail -= 0.5 * D(m, j) / cross_product(j) * bp;
        for (int j = 1; j <= g; ++j) {
            if (j == m) continue;
            double uprod = 1.0;
            for (int a = 1; a <= g; ++a)
                if (a != j) uprod *= U(j) - U(a);
            for (int i = 1; i <= g; ++i)
                tail -= 0.5 * D(m, i) * (1.0 / (U(m) - U(j)) - 1.0 / (X(i) - U(j))) / uprod * bp;
        }
        return tail;
    };

    SecondOrderTables out;
    out.mixed.assign(static_cast<std::size_t>(g), RMat(g, g));
    out.pure = RMat(g, g);

    for (int m = 1; m <= g; ++m) {
        const double tail = normalization_tail(m);
        for (int k = 1; k <= g; ++k) {
            for (int n = k + 1; n <= g; ++n) {
                double acc = 0.0;
                acc += 0.5 * (1.0 / (X(k) - X(n)) - 1.0 / (U(m) - X(n))) * D(m, k);
                acc += 0.5 * (1.0 / (X(n) - X(k)) - 1.0 / (U(m) - X(k))) * D(m, n);
                double mid = 2.0 / U(m) + 2.0 / (U(m) - 1.0) - gap_sum(m);
                for (int j = 1; j <= g; ++j)
                    if (j != k && j != n) mid += 1.0 / (U(m) - X(j));
                acc += 0.5 * mid * D(m, n) * D(m, k);
                for (int a = 1; a <= g; ++a) {
                    if (a == m) continue;
                    acc += 0.25 * D(m, k) * (1.0 / (U(m) - U(a)) - 1.0 / (X(k) - U(a))) * D(a, n);
                    acc += 0.25 * D(m, n) * (1.0 / (U(m) - U(a)) - 1.0 / (X(n) - U(a))) * D(a, k);
                }
                acc += D(m, k) * D(m, n) * tail;
                out.mixed[static_cast<std::size_t>(m - 1)](k - 1, n - 1) = acc;
                out.mixed[static_cast<std::size_t>(m - 1)](n - 1, k - 1) = acc;
            }

            double acc = 0.5 * (U(m) / (X(k) - 1.0) - (U(m) - 1.0) / X(k) - 1.0 / (X(k) - U(m)));
            for (int j = 1; j <= g; ++j)
                if (j != k)
                    acc -= 0.5 * (1.0 / (X(k) - U(m)) - 1.0 / (X(k) - X(j))) * D(m, j);
            {
                double row = 2.0 / X(k) + 2.0 / (X(k) - 1.0) - 1.0 / (X(k) - U(m));
                for (int a = 1; a <= g; ++a) {
                    if (a != k) row += 1.0 / (X(k) - X(a));
                    if (a != m) row -= 1.0 / (X(k) - U(a));
                }
                acc -= 0.5 * D(m, k) * row;
            }
            {
                double xdsum = 0.0, dsum = 0.0;
                for (int i = 1; i <= g; ++i) {
                    if (i == k) continue;
                    xdsum += X(i) * D(m, i);
                    dsum += D(m, i);
                }
                acc += 0.5 * (1.0 / X(k) - 1.0 / (X(k) - 1.0)) * xdsum;
                acc += 0.5 * (1.0 / (X(k) - U(m)) - 1.0 / X(k)) * dsum;
            }
            {
                double row = 2.0 / U(m) + 2.0 / (U(m) - 1.0) - gap_sum(m) + 1.0 / (X(k) - U(m));
                for (int a = 1; a <= g; ++a)
                    if (a != k) row += 1.0 / (U(m) - X(a));
                acc += 0.5 * D(m, k) * D(m, k) * row;
            }
            for (int a = 1; a <= g; ++a)
                if (a != m)
                    acc += 0.5 * D(m, k) * (1.0 / (U(m) - U(a)) - 1.0 / (X(k) - U(a))) * D(a, k);
            acc += D(m, k) * D(m, k) * tail;
            out.pure(m - 1, k - 1) = acc;
        }
    }
    return out;
}

// One-band case of the pure second derivative, directly as a function of the
// scalar data (x, u, u').
inline double genus1_ode_rhs(double x, double u, double up, double floor = 1e-9) {
    detail::require_distinct({x}, {u}, floor);
    double acc = 0.5 * (u / (x - 1.0) - (u - 1.0) / x + 1.0 / (u - x));
    acc -= 0.5 * up * (2.0 / x + 2.0 / (x - 1.0) + 1.0 / (u - x));
    acc += 0.5 * up * up * (2.0 / u + 2.0 / (u - 1.0) + 1.0 / (x - u));
    acc -= 0.5 * up * up * up * (x / (u - 1.0) - (x - 1.0) / u + 1.0 / (x - u));
    return acc;
}

struct FlowOptions {
    QuadratureControl quad{};
    double drift_tol = 1e-6;        // allowed drift growth per unit of path length
    int max_halvings = 12;
    double denominator_floor = 1e-9;
};

// Integrate the dependent edges u along a piecewise-linear path of the
// independent edges x, classical RK4 on the first-order flow matrix, each
// stage recomputing the period data of the stage curve.  On a collision
// (ordering lost or the flow denominator vanishing) the trajectory is
// returned truncated at the last valid sample with abort_reason set.
inline FlowTrajectory integrate_flow(const FlowState& state,
                                     const std::vector<std::vector<double>>& path, double step,
                                     FlowOptions opt = {}) {
    const int g = state.curve.genus;
    if (!(step > 0.0)) throw DimensionMismatch("integrate_flow: step must be positive");
    for (const auto& wp : path)
        if (static_cast<int>(wp.size()) != g)
            throw DimensionMismatch("integrate_flow: waypoint dimension mismatch");

    auto b_periods = [&](const std::vector<double>& xv, const std::vector<double>& uv) {
        PeriodData pd(CurveSpec(g, xv, uv), opt.quad);
        return pd.third_kind(state.alpha).b_periods;
    };
    auto rhs = [&](const std::vector<double>& xv, const std::vector<double>& uv,
                   const std::vector<double>& dir) {
        PeriodData pd(CurveSpec(g, xv, uv), opt.quad);
        CMat M = first_order_rhs(pd, pd.third_kind(state.alpha), opt.denominator_floor);
        std::vector<double> k(static_cast<std::size_t>(g), 0.0);
        for (int m = 0; m < g; ++m)
            for (int i = 0; i < g; ++i)
                k[static_cast<std::size_t>(m)] += M(m, i).real() * dir[static_cast<std::size_t>(i)];
        return k;
    };
    auto drift_of = [&](const std::vector<cplx>& bp) {
        std::vector<cplx> d(bp.size());
        for (std::size_t k = 0; k < bp.size(); ++k) d[k] = bp[k] - state.target_b[k];
        return d;
    };

    FlowTrajectory traj;
    std::vector<double> xc = state.curve.x;
    std::vector<double> uc = state.curve.u;
    std::vector<cplx> drift = drift_of(b_periods(xc, uc));
    traj.samples.push_back({xc, uc, drift, 0.0});

    double h = step;
    int halvings = 0;
    for (const auto& target : path) {
        double seg = 0.0;
        for (int i = 0; i < g; ++i) {
            double d = target[static_cast<std::size_t>(i)] - xc[static_cast<std::size_t>(i)];
            seg += d * d;
        }
        seg = std::sqrt(seg);
        if (seg < 1e-15) continue;
        std::vector<double> dir(static_cast<std::size_t>(g));
        for (int i = 0; i < g; ++i)
            dir[static_cast<std::size_t>(i)] =
                (target[static_cast<std::size_t>(i)] - xc[static_cast<std::size_t>(i)]) / seg;

        double travelled = 0.0;
        while (travelled < seg - 1e-14) {
            double hs = std::min(h, seg - travelled);
            std::vector<double> xn(static_cast<std::size_t>(g)), uh(static_cast<std::size_t>(g));
            // a step that cannot be evaluated (collision, vanishing
            // denominator, or quadrature wall near a degeneration) is retried
            // at half the size until the halving budget runs out
            auto retry = [&](const char* why) {
                if (halvings < opt.max_halvings) {
                    h = hs / 2.0;
                    ++halvings;
                    return true;
                }
                traj.abort_reason = why;
                return false;
            };
            try {
                auto axpy = [&](const std::vector<double>& base, const std::vector<double>& k,
                                double c) {
                    std::vector<double> r(base.size());
                    for (std::size_t j = 0; j < base.size(); ++j) r[j] = base[j] + c * k[j];
                    return r;
                };
                std::vector<double> xh(static_cast<std::size_t>(g));
                for (int i = 0; i < g; ++i)
                    xh[static_cast<std::size_t>(i)] =
                        xc[static_cast<std::size_t>(i)] + 0.5 * hs * dir[static_cast<std::size_t>(i)];
                for (int i = 0; i < g; ++i)
                    xn[static_cast<std::size_t>(i)] =
                        xc[static_cast<std::size_t>(i)] + hs * dir[static_cast<std::size_t>(i)];

                auto k1 = rhs(xc, uc, dir);
                auto k2 = rhs(xh, axpy(uc, k1, 0.5 * hs), dir);
                auto k3 = rhs(xh, axpy(uc, k2, 0.5 * hs), dir);
                auto k4 = rhs(xn, axpy(uc, k3, hs), dir);
                for (int m = 0; m < g; ++m)
                    uh[static_cast<std::size_t>(m)] =
                        uc[static_cast<std::size_t>(m)] +
                        hs / 6.0 *
                            (k1[static_cast<std::size_t>(m)] + 2.0 * k2[static_cast<std::size_t>(m)] +
                             2.0 * k3[static_cast<std::size_t>(m)] + k4[static_cast<std::size_t>(m)]);

                std::vector<cplx> bp = b_periods(xn, uh);
                std::vector<cplx> dn = drift_of(bp);
                double growth = 0.0;
                for (std::size_t k = 0; k < dn.size(); ++k)
                    growth = std::max(growth, std::abs(dn[k] - drift[k]));
                if (growth > opt.drift_tol * hs && halvings < opt.max_halvings) {
                    h = hs / 2.0;
                    ++halvings;
                    continue;
                }
                xc = xn;
                uc = uh;
                drift = dn;
                travelled += hs;
                traj.samples.push_back({xc, uc, drift, hs});
            } catch (const OrderingViolation& e) {
                if (retry(e.what())) continue;
                return traj;
            } catch (const DenominatorVanishes& e) {
                if (retry(e.what())) continue;
                return traj;
            } catch (const QuadratureNotConverged& e) {
                if (retry(e.what())) continue;
                return traj;
            }
        }
    }
    return traj;
}

// Re-solve the frozen period constraints at a new x by Newton iteration with
// the analytic Jacobian d(b-period_k)/du_j = pi i Omega(P_{u_j}) omega_k(P_{u_j}).
// Independent of the integrator's derivative formula, hence usable as an
// oracle for it.
inline std::vector<double> newton_period_corrector(const CurveSpec& curve,
                                                   const std::vector<double>& alpha,
                                                   const std::vector<cplx>& target_b,
                                                   const std::vector<double>& x_new,
                                                   QuadratureControl quad = {},
                                                   double tol = 1e-10, int max_iter = 50) {
    const int g = curve.genus;
    if (static_cast<int>(x_new.size()) != g || static_cast<int>(target_b.size()) != g)
        throw DimensionMismatch("newton_period_corrector: dimension mismatch");
    std::vector<double> u = curve.u;
    for (int iter = 0; iter < max_iter; ++iter) {
        PeriodData pd = [&]() {
            try {
                return PeriodData(CurveSpec(g, x_new, u), quad);
            } catch (const OrderingViolation& e) {
                throw NewtonDiverged(std::string("corrector left the ordered domain: ") + e.what());
            }
        }();
        ThirdKind tk = pd.third_kind(alpha);
        double resmax = 0.0;
        for (int k = 0; k < g; ++k)
            resmax = std::max(resmax,
                              std::abs(tk.b_periods[static_cast<std::size_t>(k)] -
                                       target_b[static_cast<std::size_t>(k)]));
        if (resmax < tol) return u;

        // purely imaginary system: J(k,j) = pi i * [real product]; solve for
        // the real update with the imaginary parts
        RMat J(g, g);
        std::vector<double> rhs(static_cast<std::size_t>(g));
        for (int k = 1; k <= g; ++k) {
            for (int j = 1; j <= g; ++j) {
                cplx prod = third_kind_at_branch(pd, tk, BranchId::u(j)) *
                            pd.omega_at_branch(k, BranchId::u(j));
                J(k - 1, j - 1) = M_PI * prod.real();
            }
            rhs[static_cast<std::size_t>(k - 1)] =
                -(tk.b_periods[static_cast<std::size_t>(k - 1)] -
                  target_b[static_cast<std::size_t>(k - 1)])
                     .imag();
        }
        LU<double> lu(J);
        if (lu.singular)
            throw SingularJacobian("period corrector: Jacobian numerically singular");
        auto delta = lu.solve(rhs);
        for (int j = 0; j < g; ++j) u[static_cast<std::size_t>(j)] += delta[static_cast<std::size_t>(j)];
    }
    throw NewtonDiverged("period corrector: no convergence within the iteration cap");
}

// Maximum absolute discrepancies of the pointwise identities every valid
// curve must satisfy: two partial-fraction identities and the vanishing
// residue sums of four meromorphic differentials, plus the closed rational
// form of the double-pole residue expressed through the flow derivatives.
struct IdentityReport {
    double partial_fractions = 0.0;
    double partial_fractions_pair = 0.0;
    double residue_frame = 0.0;
    double residue_bidifferential = 0.0;
    double residue_basis = 0.0;
    double residue_basis_weighted = 0.0;
    double residue_rational = 0.0;
};

inline IdentityReport validate_identities(const CurveSpec& curve,
                                          const std::vector<double>& alpha,
                                          QuadratureControl quad = {}) {
    const int g = curve.genus;
    IdentityReport rep;
    std::mt19937 rng(20214u);
    std::uniform_real_distribution<double> unif(-2.0, curve.u.back() + 2.0);

    // partial fractions against the gap-edge set u_1..u_g
    auto lag = [&](double t, int skip) { // prod_{a != skip} (t - u_a)
        double p = 1.0;
        for (int a = 1; a <= g; ++a)
            if (a != skip) p *= t - curve.u[static_cast<std::size_t>(a - 1)];
        return p;
    };
    for (int trial = 0; trial < 8; ++trial) {
        double t = unif(rng);
        bool clash = false;
        // keep the sample point far enough from the poles that the absolute
        // comparison below retains the full tolerance: within ~1e-3 of an
        // edge the partial-fraction terms grow to where double rounding
        // alone exceeds 1e-12
        for (double e : curve.u)
            if (std::abs(t - e) < 5e-2) clash = true;
        if (clash) continue;
        double lhs = 0.0;
        for (int k = 1; k <= g; ++k)
            lhs += 1.0 / ((t - curve.u[static_cast<std::size_t>(k - 1)]) * lag(curve.u[static_cast<std::size_t>(k - 1)], k));
        rep.partial_fractions = std::max(rep.partial_fractions, std::abs(lhs - 1.0 / lag(t, 0)));

        for (int m = 1; m <= g; ++m) {
            double um = curve.u[static_cast<std::size_t>(m - 1)];
            double lhs2 = 0.0;
            for (int k = 1; k <= g; ++k) {
                if (k == m) continue;
                double uk = curve.u[static_cast<std::size_t>(k - 1)];
                lhs2 += 1.0 / ((uk - t) * (uk - um) * lag(uk, k));
            }
            double gsum = 0.0;
            for (int a = 1; a <= g; ++a)
                if (a != m) gsum += 1.0 / (um - curve.u[static_cast<std::size_t>(a - 1)]);
            double rhs = gsum / ((um - t) * lag(um, m)) + 1.0 / ((um - t) * lag(t, 0)) +
                         1.0 / ((um - t) * (um - t) * lag(um, m));
            rep.partial_fractions_pair = std::max(rep.partial_fractions_pair, std::abs(lhs2 - rhs));
        }
    }

    PeriodData pd(curve, quad);
    ThirdKind tk = pd.third_kind(alpha);
    RPoly dd = curve.delta_poly().derivative().derivative();
    std::vector<BranchId> all{BranchId::zero(), BranchId::one()};
    for (int j = 1; j <= g; ++j) {
        all.push_back(BranchId::x(j));
        all.push_back(BranchId::u(j));
    }
    CMat dureal = first_order_rhs(pd, tk);
    RMat du(g, g);
    for (int m = 0; m < g; ++m)
        for (int i = 0; i < g; ++i) du(m, i) = dureal(m, i).real();

    for (int m = 1; m <= g; ++m) {
        BranchId um = BranchId::u(m);
        const double umv = curve.branch_value(um);
        const double dp = curve.delta_prime_at_branch(um);
        const double pm = tk.p(umv);
        // local data of the double pole: with F = 2 p / (D/(u - u_m)), the
        // residue of Omega phi / ((u - u_m) du) is F'(u_m)
        const double fprime = 2.0 * tk.p.derivative()(umv) / dp - pm * dd(umv) / (dp * dp);

        cplx acc = fprime;
        for (BranchId id : all) {
            if (id.kind == um.kind && id.index == um.index) continue;
            cplx ophi = third_kind_at_branch(pd, tk, id) * curve.phi_at_branch(id);
            acc += 0.5 * ophi / (curve.branch_value(id) - umv);
        }
        rep.residue_frame = std::max(rep.residue_frame, std::abs(acc));

        PoleFrame fm = pd.pole_frame(um);
        cplx basis_at_um = 0.0;
        for (int l = 1; l <= g; ++l)
            basis_at_um += fm.beta[static_cast<std::size_t>(l - 1)] * pd.holo(l)(umv);
        cplx wres = fprime / fm.phi - 2.0 * pm * basis_at_um / dp;
        for (BranchId id : all) {
            if (id.kind == um.kind && id.index == um.index) continue;
            wres += 0.5 * third_kind_at_branch(pd, tk, id) * pd.w_eval(fm, id);
        }
        rep.residue_bidifferential = std::max(rep.residue_bidifferential, std::abs(wres));

        cplx bsum = 0.0, bwsum = 0.0;
        for (BranchId id : all) {
            cplx term = third_kind_at_branch(pd, tk, id) * curve.v_basis_at_branch(m, id);
            bsum += term;
            bwsum += curve.branch_value(id) * term;
        }
        rep.residue_basis = std::max(rep.residue_basis, std::abs(bsum));
        rep.residue_basis_weighted = std::max(rep.residue_basis_weighted, std::abs(bwsum));

        // closed rational form of the same residue through the flow derivatives
        double lhs = tk.p.derivative()(umv) / (2.0 * pm) - dd(umv) / (4.0 * dp);
        double dsum = 0.0, xdsum = 0.0;
        for (int i = 1; i <= g; ++i) {
            dsum += du(m - 1, i - 1);
            xdsum += curve.x[static_cast<std::size_t>(i - 1)] * du(m - 1, i - 1);
        }
        double bprod = 1.0;
        for (int b = 1; b <= g; ++b)
            if (b != m) bprod *= umv - curve.u[static_cast<std::size_t>(b - 1)];
        double gsum = 0.0;
        for (int a = 1; a <= g; ++a)
            if (a != m) gsum += 1.0 / (umv - curve.u[static_cast<std::size_t>(a - 1)]);
        double rhs = 0.5 * (dsum - 1.0) * gsum + (dsum - 1.0) / (2.0 * umv) +
                     (xdsum / umv - 1.0) / (2.0 * (umv - 1.0));
        for (int j = 1; j <= g; ++j) {
            double cp = 1.0;
            for (int a = 1; a <= g; ++a)
                cp *= curve.x[static_cast<std::size_t>(j - 1)] - curve.u[static_cast<std::size_t>(a - 1)];
            rhs += 0.5 * du(m - 1, j - 1) / cp * bprod;
        }
        for (int j = 1; j <= g; ++j) {
            if (j == m) continue;
            double uj = curve.u[static_cast<std::size_t>(j - 1)];
            double uprod = 1.0;
            for (int a = 1; a <= g; ++a)
                if (a != j) uprod *= uj - curve.u[static_cast<std::size_t>(a - 1)];
            for (int i = 1; i <= g; ++i)
                rhs += 0.5 * du(m - 1, i - 1) *
                       (1.0 / (umv - uj) - 1.0 / (curve.x[static_cast<std::size_t>(i - 1)] - uj)) /
                       uprod * bprod;
        }
        rep.residue_rational = std::max(rep.residue_rational, std::abs(lhs - rhs));
    }
    return rep;
}

// Relative errors of the analytic derivative formulas against centered finite
// differences.  rauch_* entries perturb one branch point freely; flow_*
// entries move x_i and carry u along with the period corrector so the frozen
// periods stay put.  All entries are expected O(h^2).
struct VariationalReport {
    double rauch_riemann = 0.0;       // dB_ij/da_k = pi i w_j(P_a) w_i(P_a)
    double rauch_third_kind = 0.0;    // dOmega(P_b)/da = Omega(P_a) W(P_b, P_a)/2
    double self_derivative = 0.0;     // dOmega(P_a)/da = -sum_b Omega(P_b) W(P_a, P_b)/2
    double flow_fixed_point = 0.0;    // dOmega(P_c)/dx_i, c not moving
    double flow_movable_point = 0.0;  // dOmega(P_{u_m})/dx_i
    double flow_active_point = 0.0;   // dOmega(P_{x_k})/dx_k
    double flow_frame = 0.0;          // dphi(P_c)/dx_i
    double flow_basis = 0.0;          // dv_m(P_{x_i})/dx_i
};

inline VariationalReport validate_variational(const CurveSpec& curve,
                                              const std::vector<double>& alpha, double h = 1e-4,
                                              QuadratureControl quad = {}) {
    const int g = curve.genus;
    VariationalReport rep;
    auto rel = [](cplx analytic, cplx fd) {
        return std::abs(analytic - fd) / (1.0 + std::abs(analytic));
    };

    PeriodData pd(curve, quad);
    ThirdKind tk = pd.third_kind(alpha);
    CMat duc = first_order_rhs(pd, tk);
    RMat du(g, g);
    for (int m = 0; m < g; ++m)
        for (int i = 0; i < g; ++i) du(m, i) = duc(m, i).real();

    std::vector<BranchId> movable;
    for (int j = 1; j <= g; ++j) {
        movable.push_back(BranchId::x(j));
        movable.push_back(BranchId::u(j));
    }
    std::vector<BranchId> all{BranchId::zero(), BranchId::one()};
    all.insert(all.end(), movable.begin(), movable.end());

    auto shifted = [&](BranchId id, double dh) {
        std::vector<double> xs = curve.x, us = curve.u;
        if (id.kind == BranchKind::X)
            xs[static_cast<std::size_t>(id.index - 1)] += dh;
        else
            us[static_cast<std::size_t>(id.index - 1)] += dh;
        return CurveSpec(g, xs, us);
    };

    // free (Rauch) perturbations of each movable branch point
    for (BranchId mk : movable) {
        PeriodData pp(shifted(mk, h), quad);
        PeriodData pm(shifted(mk, -h), quad);
        for (int i = 1; i <= g; ++i)
            for (int j = 1; j <= g; ++j) {
                cplx fd = (pp.riemann(i - 1, j - 1) - pm.riemann(i - 1, j - 1)) / (2.0 * h);
                cplx an = cplx(0.0, M_PI) * pd.omega_at_branch(j, mk) * pd.omega_at_branch(i, mk);
                rep.rauch_riemann = std::max(rep.rauch_riemann, rel(an, fd));
            }
        ThirdKind tp = pp.third_kind(alpha);
        ThirdKind tm = pm.third_kind(alpha);
        PoleFrame fk = pd.pole_frame(mk);
        for (BranchId bj : all) {
            if (bj.kind == mk.kind && bj.index == mk.index) continue;
            cplx fd = (third_kind_at_branch(pp, tp, bj) - third_kind_at_branch(pm, tm, bj)) /
                      (2.0 * h);
            cplx an = 0.5 * third_kind_at_branch(pd, tk, mk) * pd.w_eval(fk, bj);
            rep.rauch_third_kind = std::max(rep.rauch_third_kind, rel(an, fd));
        }
        // the missing diagonal: moving the evaluation point itself
        cplx fd = (third_kind_at_branch(pp, tp, mk) - third_kind_at_branch(pm, tm, mk)) / (2.0 * h);
        cplx an = 0.0;
        for (BranchId bj : all) {
            if (bj.kind == mk.kind && bj.index == mk.index) continue;
            PoleFrame fb = pd.pole_frame(bj);
            an -= 0.5 * third_kind_at_branch(pd, tk, bj) * pd.w_eval(fb, mk);
        }
        rep.self_derivative = std::max(rep.self_derivative, rel(an, fd));
    }

    // deformation derivatives: move x_i, drag u with the period corrector
    for (int i = 1; i <= g; ++i) {
        auto corrected = [&](double dh) {
            std::vector<double> xs = curve.x;
            xs[static_cast<std::size_t>(i - 1)] += dh;
            std::vector<double> us =
                newton_period_corrector(curve, alpha, tk.b_periods, xs, quad, 1e-12);
            return CurveSpec(g, xs, us);
        };
        PeriodData pp(corrected(h), quad);
        PeriodData pm(corrected(-h), quad);
        ThirdKind tp = pp.third_kind(alpha);
        ThirdKind tm = pm.third_kind(alpha);
        const double xi = curve.x[static_cast<std::size_t>(i - 1)];
        cplx omxi = third_kind_at_branch(pd, tk, BranchId::x(i));
        cplx phixi = curve.phi_at_branch(BranchId::x(i));

        for (BranchId c : all) {
            bool moves = (c.kind == BranchKind::U) || (c.kind == BranchKind::X && c.index == i);
            const double a = curve.branch_value(c);
            if (!moves) {
                cplx fd_phi = (pp.curve.phi_at_branch(c) - pm.curve.phi_at_branch(c)) / (2.0 * h);
                // fixed ramification point: third-kind value and frame value
                cplx fd = (third_kind_at_branch(pp, tp, c) - third_kind_at_branch(pm, tm, c)) /
                          (2.0 * h);
                cplx ratio = 1.0;
                for (int b = 1; b <= g; ++b)
                    ratio *= (xi - curve.u[static_cast<std::size_t>(b - 1)]) /
                             (a - curve.u[static_cast<std::size_t>(b - 1)]);
                cplx an = omxi * phixi / (2.0 * (xi - a) * curve.phi_at_branch(c)) * ratio;
                rep.flow_fixed_point = std::max(rep.flow_fixed_point, rel(an, fd));

                cplx fsum = 1.0 / (a - xi);
                for (int b = 1; b <= g; ++b)
                    fsum += du(b - 1, i - 1) / (a - curve.u[static_cast<std::size_t>(b - 1)]);
                cplx an_phi = 0.5 * curve.phi_at_branch(c) * fsum;
                rep.flow_frame = std::max(rep.flow_frame, rel(an_phi, fd_phi));
            } else if (c.kind == BranchKind::U) {
                const int m = c.index;
                cplx fd = (third_kind_at_branch(pp, tp, c) - third_kind_at_branch(pm, tm, c)) /
                          (2.0 * h);
                cplx inner = -1.0 / (xi - a);
                for (int b = 1; b <= g; ++b)
                    if (b != m) inner += 1.0 / (a - curve.u[static_cast<std::size_t>(b - 1)]);
                cplx frame_m = third_kind_at_branch(pd, tk, c) * curve.phi_at_branch(c);
                cplx ssum = 0.0;
                for (BranchId bj : all) {
                    if (bj.kind == c.kind && bj.index == c.index) continue;
                    ssum += third_kind_at_branch(pd, tk, bj) * curve.phi_at_branch(bj) /
                            (curve.branch_value(bj) - a);
                }
                cplx an = 0.5 * third_kind_at_branch(pd, tk, c) * (inner - ssum / frame_m) *
                          du(m - 1, i - 1);
                rep.flow_movable_point = std::max(rep.flow_movable_point, rel(an, fd));

                // frame derivative at the dependent edge
                cplx fd_phi = (pp.curve.phi_at_branch(c) - pm.curve.phi_at_branch(c)) / (2.0 * h);
                cplx self = 0.0;
                for (BranchId bj : all) {
                    if (bj.kind == c.kind && bj.index == c.index) continue;
                    self += 1.0 / (a - curve.branch_value(bj));
                }
                cplx an_phi = 1.0 / (a - xi) - du(m - 1, i - 1) * self;
                for (int b = 1; b <= g; ++b)
                    if (b != m)
                        an_phi += du(b - 1, i - 1) / (a - curve.u[static_cast<std::size_t>(b - 1)]);
                an_phi *= 0.5 * curve.phi_at_branch(c);
                rep.flow_frame = std::max(rep.flow_frame, rel(an_phi, fd_phi));
            } else {
                // the active point x_i itself
                cplx fd = (third_kind_at_branch(pp, tp, c) - third_kind_at_branch(pm, tm, c)) /
                          (2.0 * h);
                cplx s1 = 0.0;
                for (int a2 = 1; a2 <= g; ++a2) {
                    double ua = curve.u[static_cast<std::size_t>(a2 - 1)];
                    double pr = 1.0;
                    for (int b = 1; b <= g; ++b)
                        if (b != a2)
                            pr *= (xi - curve.u[static_cast<std::size_t>(b - 1)]) /
                                  (ua - curve.u[static_cast<std::size_t>(b - 1)]);
                    s1 += pr / (ua - xi);
                }
                cplx frame_x = omxi * phixi;
                cplx s2 = 0.0;
                for (BranchId bj : all) {
                    if (bj.kind == c.kind && bj.index == c.index) continue;
                    s2 += third_kind_at_branch(pd, tk, bj) * curve.phi_at_branch(bj) /
                          ((curve.branch_value(bj) - xi) * frame_x);
                }
                cplx an = -0.5 * omxi * (s1 + s2);
                rep.flow_active_point = std::max(rep.flow_active_point, rel(an, fd));

                // normalized basis derivative at the active point, for each row
                for (int m = 1; m <= g; ++m) {
                    cplx vp = pp.curve.v_basis_at_branch(m, c);
                    cplx vm_ = pm.curve.v_basis_at_branch(m, c);
                    cplx v0 = curve.v_basis_at_branch(m, c);
                    cplx fdv = (vp - vm_) / (2.0 * h) / v0;
                    double umv = curve.u[static_cast<std::size_t>(m - 1)];
                    cplx an_v = -0.5 * (1.0 / xi + 1.0 / (xi - 1.0));
                    for (int a2 = 1; a2 <= g; ++a2)
                        if (a2 != i)
                            an_v -= 0.5 / (xi - curve.x[static_cast<std::size_t>(a2 - 1)]);
                    for (int a2 = 1; a2 <= g; ++a2)
                        if (a2 != m)
                            an_v += 0.5 * (1.0 - du(a2 - 1, i - 1)) /
                                    (xi - curve.u[static_cast<std::size_t>(a2 - 1)]);
                    cplx dsum = 1.0 / umv + 1.0 / (umv - 1.0);
                    for (int a2 = 1; a2 <= g; ++a2)
                        if (a2 != i) dsum += 1.0 / (umv - curve.x[static_cast<std::size_t>(a2 - 1)]);
                    an_v += 0.5 * dsum * du(m - 1, i - 1);
                    for (int a2 = 1; a2 <= g; ++a2)
                        if (a2 != m)
                            an_v -= 0.5 *
                                    (du(m - 1, i - 1) - du(a2 - 1, i - 1)) /
                                    (umv - curve.u[static_cast<std::size_t>(a2 - 1)]);
                    rep.flow_basis = std::max(rep.flow_basis, rel(an_v, fdv));
                }
            }
        }
    }
    return rep;
}

} // namespace todakit
