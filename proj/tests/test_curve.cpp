#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "todakit/curve.hpp"

using namespace todakit;
using Catch::Approx;

namespace {
const CurveSpec g1{1, {2.0}, {3.0}};
const CurveSpec g2{2, {2.0, 5.0}, {3.0, 6.0}};
} // namespace

TEST_CASE("ordering is validated", "[curve]") {
    CHECK_THROWS_AS(CurveSpec(1, {0.5}, {3.0}), OrderingViolation);   // x_1 < 1
    CHECK_THROWS_AS(CurveSpec(1, {3.0}, {2.0}), OrderingViolation);   // band reversed
    CHECK_THROWS_AS(CurveSpec(2, {2.0, 2.5}, {3.0, 4.0}), OrderingViolation); // x_2 < u_1
    CHECK_THROWS_AS(CurveSpec(1, {2.0}, {2.0 + 1e-12}), OrderingViolation);   // degenerate
    CHECK_THROWS_AS(CurveSpec(2, {2.0}, {3.0}), DimensionMismatch);
    CHECK_NOTHROW(CurveSpec(3, {2.0, 4.0, 6.0}, {3.0, 5.0, 7.0}));
}

TEST_CASE("interval layout", "[curve]") {
    auto bands = g2.bands();
    auto gaps = g2.gaps();
    REQUIRE(bands.size() == 3);
    REQUIRE(gaps.size() == 2);
    CHECK(bands[0].lo == 0.0);
    CHECK(bands[0].hi == 1.0);
    CHECK(bands[2].lo == 5.0);
    CHECK(bands[2].hi == 6.0);
    CHECK(gaps[0].lo == 1.0);
    CHECK(gaps[0].hi == 2.0);
    CHECK(gaps[1].lo == 3.0);
    CHECK(gaps[1].hi == 5.0);
    // polynomial expansion agrees with the product evaluation
    RPoly d = g2.delta_poly();
    for (double t : {-0.7, 0.3, 1.7, 2.5, 4.1, 5.5, 6.9})
        CHECK(d(t) == Approx(g2.delta(t)).epsilon(1e-13));
}

TEST_CASE("signed square root follows the top sheet", "[curve]") {
    CHECK(g1.delta(0.5) == Approx(-0.9375));
    CHECK(g1.delta(4.0) == Approx(24.0));

    cplx inside_band = g1.sqrt_delta_signed(0.5);
    CHECK(inside_band.real() == Approx(0.0).margin(1e-15));
    CHECK(inside_band.imag() == Approx(-std::sqrt(0.9375)).epsilon(1e-14));

    cplx inside_gap = g1.sqrt_delta_signed(1.5);
    CHECK(inside_gap.real() == Approx(-0.75).epsilon(1e-14));
    CHECK(inside_gap.imag() == Approx(0.0).margin(1e-15));

    CHECK(g1.sqrt_delta_signed(4.0).real() == Approx(std::sqrt(24.0)).epsilon(1e-14));
    CHECK_THROWS_AS(g1.sqrt_delta_signed(2.0), BranchPointHit);
}

TEST_CASE("signed square root matches path continuation", "[curve]") {
    std::mt19937 rng(20260814u);
    for (int trial = 0; trial < 6; ++trial) {
        int genus = 1 + static_cast<int>(rng() % 3u);
        CurveSpec c = oracles::random_curve(rng, genus);
        auto points = c.branch_points();
        // probe the midpoint of every band and gap and a point left of zero
        std::vector<double> probes{-0.4};
        for (std::size_t i = 0; i + 1 < points.size(); ++i)
            probes.push_back(0.5 * (points[i] + points[i + 1]));
        probes.push_back(points.back() + 0.8);
        for (double t : probes) {
            cplx lib = c.sqrt_delta_signed(t);
            cplx oracle = oracles::continued_sqrt_delta(c, t);
            CHECK(std::abs(lib - oracle) < 1e-4 * (1.0 + std::abs(lib)));
        }
    }
}

TEST_CASE("ramification frame values", "[curve]") {
    // frozen values on the genus-1 curve (2, 3)
    cplx phi0 = g1.phi_at_branch(BranchId::zero());
    CHECK(phi0.real() == Approx(0.0).margin(1e-15));
    CHECK(phi0.imag() == Approx(-2.0 / std::sqrt(6.0)).epsilon(1e-14));

    cplx phix = g1.phi_at_branch(BranchId::x(1));
    CHECK(phix.real() == Approx(0.0).margin(1e-15));
    CHECK(phix.imag() == Approx(-std::sqrt(2.0)).epsilon(1e-14));

    cplx phi1 = g1.phi_at_branch(BranchId::one());
    CHECK(phi1.real() == Approx(std::sqrt(2.0)).epsilon(1e-14));
    CHECK(phi1.imag() == Approx(0.0).margin(1e-15));

    // phi^2 * D'(a) = 4 holds at every branch point of random curves
    std::mt19937 rng(7u);
    for (int trial = 0; trial < 4; ++trial) {
        CurveSpec c = oracles::random_curve(rng, 1 + static_cast<int>(rng() % 3u));
        std::vector<BranchId> ids{BranchId::zero(), BranchId::one()};
        for (int j = 1; j <= c.genus; ++j) {
            ids.push_back(BranchId::x(j));
            ids.push_back(BranchId::u(j));
        }
        for (BranchId id : ids) {
            cplx phi = c.phi_at_branch(id);
            cplx val = phi * phi * c.delta_prime_at_branch(id);
            CHECK(val.real() == Approx(4.0).epsilon(1e-12));
            CHECK(val.imag() == Approx(0.0).margin(1e-12));
        }
    }
}

TEST_CASE("normalized frame ratios at band edges", "[curve]") {
    cplx v = g1.v_basis_at_branch(1, BranchId::x(1));
    CHECK(v.real() == Approx(0.0).margin(1e-14));
    CHECK(v.imag() == Approx(-std::sqrt(3.0)).epsilon(1e-13));
    // self-normalization is exact by construction
    cplx self = g2.v_basis_at_branch(2, BranchId::u(2));
    CHECK(self.real() == Approx(1.0));
    CHECK(self.imag() == Approx(0.0).margin(1e-15));
}

TEST_CASE("alignment signs alternate in pairs from the right", "[curve]") {
    CHECK(g1.branch_sign(BranchId::zero()) == -1);
    CHECK(g1.branch_sign(BranchId::one()) == -1);
    CHECK(g1.branch_sign(BranchId::x(1)) == 1);
    CHECK(g1.branch_sign(BranchId::u(1)) == 1);

    CHECK(g2.branch_sign(BranchId::u(2)) == 1);
    CHECK(g2.branch_sign(BranchId::x(2)) == 1);
    CHECK(g2.branch_sign(BranchId::u(1)) == -1);
    CHECK(g2.branch_sign(BranchId::x(1)) == -1);
    CHECK(g2.branch_sign(BranchId::one()) == 1);
    CHECK(g2.branch_sign(BranchId::zero()) == 1);
}
