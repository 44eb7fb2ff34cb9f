#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "todakit/isoflow.hpp"

using namespace todakit;
using Catch::Approx;

namespace {
const CurveSpec sym1{1, {2.0}, {3.0}};   // one band, symmetric about 1.5
const CurveSpec asym1{1, {2.0}, {4.0}};  // one band, no symmetry
const CurveSpec asym2{2, {2.0, 3.5}, {2.8, 4.5}};

// derivative of the (m,k) flow entry in the x_n direction, moving along the
// family that the Newton corrector defines
double flow_entry_along_family(const CurveSpec& base, const std::vector<double>& alpha,
                               const std::vector<cplx>& target, int m, int k, int n, double t) {
    std::vector<double> xs = base.x;
    xs[static_cast<std::size_t>(n - 1)] = t;
    std::vector<double> us = newton_period_corrector(base, alpha, target, xs, {}, 1e-12);
    PeriodData pd(CurveSpec(base.genus, xs, us));
    CMat M = first_order_rhs(pd, pd.third_kind(alpha));
    return M(m - 1, k - 1).real();
}
} // namespace

TEST_CASE("first-order flow on the symmetric one-band curve is the unit shift", "[isoflow]") {
    for (double x0 : {2.0, 2.5}) {
        CurveSpec c(1, {x0}, {x0 + 1.0});
        PeriodData pd(c);
        ThirdKind tk = pd.third_kind({0.0});
        CMat M = first_order_rhs(pd, tk);
        CHECK(M(0, 0).real() == Approx(1.0).epsilon(1e-8));
        CHECK(std::abs(M(0, 0).imag()) < 1e-9);
    }

    // frame values of the centered weight on the reference curve
    PeriodData pd(sym1);
    ThirdKind tk = pd.third_kind({0.0});
    cplx om0 = third_kind_at_branch(pd, tk, BranchId::zero());
    cplx omu = third_kind_at_branch(pd, tk, BranchId::u(1));
    CHECK(std::abs(om0 - cplx(0.0, -3.0 / std::sqrt(6.0))) < 1e-10);
    CHECK(std::abs(omu - cplx(-std::sqrt(1.5), 0.0)) < 1e-10);

    // derivative of the frame value at the fixed ramification point 0 along
    // the flow, closed form evaluated on the same data
    cplx omx = third_kind_at_branch(pd, tk, BranchId::x(1));
    cplx grad = omx * sym1.phi_at_branch(BranchId::x(1)) /
                (2.0 * 2.0 * sym1.phi_at_branch(BranchId::zero())) * ((2.0 - 3.0) / (0.0 - 3.0));
    CHECK(std::abs(grad - cplx(0.0, std::sqrt(6.0) / 24.0)) < 1e-12);
}

TEST_CASE("third-kind weights can suppress or break the flow", "[isoflow]") {
    PeriodData pd(sym1);

    // weight vector whose differential vanishes at the moving edge x_1: the
    // deformation leaves u_1 stationary
    double astar = -pd.a_period(RPoly({2.0, -1.0}), 1).real();
    ThirdKind tk = pd.third_kind({astar});
    CHECK(std::abs(tk.p(2.0)) < 1e-10);
    CMat M = first_order_rhs(pd, tk);
    CHECK(std::abs(M(0, 0)) < 1e-9);

    // weight vector whose differential vanishes at the dependent edge u_1:
    // the flow is undefined there
    double abad = -pd.a_period(RPoly({3.0, -1.0}), 1).real();
    ThirdKind bad = pd.third_kind({abad});
    CHECK_THROWS_AS(first_order_rhs(pd, bad), DenominatorVanishes);
}

TEST_CASE("flow matrix is exactly homogeneous in the differential", "[isoflow]") {
    PeriodData pd(asym2);
    ThirdKind tk = pd.third_kind({0.4, -0.7});
    CMat base = first_order_rhs(pd, tk);
    for (double s : {2.0, -0.5, 64.0}) {
        ThirdKind scaled = tk;
        for (double& coef : scaled.p.c) coef *= s;
        CMat M = first_order_rhs(pd, scaled);
        for (int m = 0; m < 2; ++m)
            for (int i = 0; i < 2; ++i) {
                CHECK(M(m, i).real() == base(m, i).real());
                CHECK(M(m, i).imag() == base(m, i).imag());
            }
    }
}

TEST_CASE("second derivative tables agree with the one-band equation", "[isoflow]") {
    RMat unit(1, 1);
    unit(0, 0) = 1.0;
    SecondOrderTables t = second_order_rhs({2.0}, {3.0}, unit);
    CHECK(std::abs(t.pure(0, 0)) < 1e-12);

    CHECK(std::abs(genus1_ode_rhs(2.0, 3.0, 1.0)) < 1e-14);
    CHECK(std::abs(genus1_ode_rhs(5.0, 6.0, 1.0)) < 1e-14);

    std::mt19937 rng(7101u);
    std::uniform_real_distribution<double> xd(1.3, 4.0), wd(0.4, 2.0), ud(-1.5, 1.5);
    for (int trial = 0; trial < 50; ++trial) {
        double x = xd(rng), u = x + wd(rng), up = ud(rng);
        RMat d(1, 1);
        d(0, 0) = up;
        SecondOrderTables s = second_order_rhs({x}, {u}, d);
        double ode = genus1_ode_rhs(x, u, up);
        CHECK(std::abs(s.pure(0, 0) - ode) < 1e-12 * (1.0 + std::abs(ode)));
    }

    RMat close(1, 1);
    close(0, 0) = 1.0;
    CHECK_THROWS_AS(second_order_rhs({2.0}, {2.0 + 1e-12}, close), PoleHit);
}

TEST_CASE("second derivative tables match the differentiated flow", "[isoflow]") {
    // one band, no symmetry
    {
        FlowState st = make_flow_state(asym1, {0.0});
        PeriodData pd(asym1);
        CMat M = first_order_rhs(pd, pd.third_kind(st.alpha));
        RMat du(1, 1);
        du(0, 0) = M(0, 0).real();
        SecondOrderTables t = second_order_rhs(asym1.x, asym1.u, du);
        auto f = [&](double xv) {
            return flow_entry_along_family(asym1, st.alpha, st.target_b, 1, 1, 1, xv);
        };
        CHECK(oracles::fd_matches(f, 2.0, t.pure(0, 0)));
    }

    // two bands: every mixed and pure entry against the corrector family
    {
        FlowState st = make_flow_state(asym2, {0.0, 0.0});
        PeriodData pd(asym2);
        CMat M = first_order_rhs(pd, pd.third_kind(st.alpha));
        RMat du(2, 2);
        for (int m = 0; m < 2; ++m)
            for (int i = 0; i < 2; ++i) du(m, i) = M(m, i).real();
        SecondOrderTables t = second_order_rhs(asym2.x, asym2.u, du);
        for (int m = 1; m <= 2; ++m)
            for (int k = 1; k <= 2; ++k)
                for (int n = 1; n <= 2; ++n) {
                    double claimed = (k == n) ? t.pure(m - 1, k - 1)
                                              : t.mixed[static_cast<std::size_t>(m - 1)](k - 1, n - 1);
                    auto f = [&](double xv) {
                        return flow_entry_along_family(asym2, st.alpha, st.target_b, m, k, n, xv);
                    };
                    INFO("m=" << m << " k=" << k << " n=" << n);
                    CHECK(oracles::fd_matches(f, asym2.x[static_cast<std::size_t>(n - 1)], claimed));
                }
    }
}

TEST_CASE("flow integration tracks the symmetric family and its drift", "[isoflow]") {
    FlowState st = make_flow_state(sym1, {0.0});
    FlowTrajectory traj = integrate_flow(st, {{2.5}}, 0.01);
    REQUIRE(traj.completed());
    REQUIRE(traj.samples.size() > 2);
    const FlowSample& last = traj.samples.back();
    CHECK(last.x[0] == Approx(2.5).margin(1e-12));
    CHECK(last.u[0] == Approx(3.5).margin(1e-6));
    for (const FlowSample& s : traj.samples) {
        CHECK(s.u[0] == Approx(s.x[0] + 1.0).margin(1e-6));
        CHECK(std::abs(s.drift[0]) < 1e-6);
    }

    // an empty path records the initial point and nothing else
    FlowTrajectory still = integrate_flow(st, {}, 0.01);
    CHECK(still.completed());
    CHECK(still.samples.size() == 1);
    CHECK(still.samples[0].step == 0.0);

    // pushing x_1 into the fixed branch point at 1 must truncate, not throw
    FlowTrajectory hit = integrate_flow(st, {{0.9}}, 0.05);
    CHECK_FALSE(hit.completed());
    CHECK(!hit.abort_reason.empty());
    CHECK(hit.samples.back().x[0] > 1.0);
    CHECK(hit.samples.back().x[0] < 1.1);
}

TEST_CASE("integration error decays at fourth order in the step", "[isoflow]") {
    FlowState st = make_flow_state(asym1, {0.0});
    std::vector<double> gold =
        newton_period_corrector(asym1, st.alpha, st.target_b, {2.8}, {}, 1e-12);

    FlowOptions loose;
    loose.drift_tol = 1e-3; // keep the halving logic out of the measurement
    std::vector<double> errs;
    for (double h : {0.1, 0.05, 0.025}) {
        FlowTrajectory traj = integrate_flow(st, {{2.8}}, h, loose);
        REQUIRE(traj.completed());
        errs.push_back(std::abs(traj.samples.back().u[0] - gold[0]));
    }
    CHECK(errs[2] < 5e-8);
    if (errs[0] > 1e-8) {
        CHECK(errs[0] / errs[1] > 8.0);
        CHECK(errs[0] / errs[2] > 50.0);
    }
}

TEST_CASE("integrated flow agrees with the period corrector along the way", "[isoflow]") {
    FlowState st = make_flow_state(asym1, {0.0});
    FlowTrajectory traj = integrate_flow(st, {{2.2}}, 0.02);
    REQUIRE(traj.completed());
    for (const FlowSample& s : traj.samples) {
        std::vector<double> uc =
            newton_period_corrector(asym1, st.alpha, st.target_b, s.x, {}, 1e-12);
        CHECK(s.u[0] == Approx(uc[0]).margin(1e-6));
    }
}

TEST_CASE("period corrector recovers the isoperiodic family", "[isoflow]") {
    FlowState st = make_flow_state(sym1, {0.0});
    // the symmetric family halves both band masses, so the first handle's
    // period is the half turn
    CHECK(std::abs(st.target_b[0] - cplx(0.0, M_PI)) < 1e-9);

    std::vector<double> u = newton_period_corrector(sym1, st.alpha, st.target_b, {2.1});
    CHECK(u[0] == Approx(3.1).margin(1e-8));

    // a target already satisfied returns the starting edges untouched
    std::vector<double> fixed = newton_period_corrector(sym1, st.alpha, st.target_b, {2.0});
    CHECK(fixed[0] == 3.0);

    CHECK_THROWS_AS(
        newton_period_corrector(sym1, st.alpha, st.target_b, {2.5}, {}, 1e-14, 1),
        NewtonDiverged);

    // two-band comparison: integrate and re-solve must land together
    FlowState st2 = make_flow_state(asym2, {0.0, 0.0});
    FlowTrajectory traj = integrate_flow(st2, {{2.1, 3.6}}, 0.02);
    REQUIRE(traj.completed());
    std::vector<double> uc =
        newton_period_corrector(asym2, st2.alpha, st2.target_b, {2.1, 3.6}, {}, 1e-12);
    CHECK(traj.samples.back().u[0] == Approx(uc[0]).margin(1e-6));
    CHECK(traj.samples.back().u[1] == Approx(uc[1]).margin(1e-6));
}

TEST_CASE("pointwise identity scan stays at solver precision", "[isoflow]") {
    IdentityReport r1 = validate_identities(asym1, {0.0});
    CHECK(r1.partial_fractions < 1e-12);
    CHECK(r1.partial_fractions_pair < 1e-12);
    CHECK(r1.residue_frame < 1e-7);
    CHECK(r1.residue_bidifferential < 1e-7);
    CHECK(r1.residue_basis < 1e-7);
    CHECK(r1.residue_basis_weighted < 1e-7);
    CHECK(r1.residue_rational < 1e-8);

    IdentityReport r2 = validate_identities(asym2, {0.3, -0.2});
    CHECK(r2.partial_fractions < 1e-12);
    CHECK(r2.partial_fractions_pair < 1e-12);
    CHECK(r2.residue_frame < 1e-7);
    CHECK(r2.residue_bidifferential < 1e-7);
    CHECK(r2.residue_basis < 1e-7);
    CHECK(r2.residue_basis_weighted < 1e-7);
    CHECK(r2.residue_rational < 1e-8);
}

TEST_CASE("variational formulas match finite differences", "[isoflow]") {
    struct Case {
        CurveSpec curve;
        std::vector<double> alpha;
    };
    std::vector<Case> cases{{asym1, {0.0}}, {asym2, {0.25, -0.1}}};
    for (const Case& cs : cases) {
        VariationalReport r4 = validate_variational(cs.curve, cs.alpha, 1e-4);
        VariationalReport r3 = validate_variational(cs.curve, cs.alpha, 1e-3);
        auto gate = [](double e4, double e3) {
            INFO("err(1e-4)=" << e4 << " err(1e-3)=" << e3);
            CHECK(e4 < 1e-5);
            CHECK((e3 / std::max(e4, 1e-300) > 10.0 || e4 < 1e-7));
        };
        gate(r4.rauch_riemann, r3.rauch_riemann);
        gate(r4.rauch_third_kind, r3.rauch_third_kind);
        gate(r4.self_derivative, r3.self_derivative);
        gate(r4.flow_fixed_point, r3.flow_fixed_point);
        gate(r4.flow_movable_point, r3.flow_movable_point);
        gate(r4.flow_active_point, r3.flow_active_point);
        gate(r4.flow_frame, r3.flow_frame);
        gate(r4.flow_basis, r3.flow_basis);
    }
}
