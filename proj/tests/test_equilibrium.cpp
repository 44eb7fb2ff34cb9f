#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "todakit/equilibrium.hpp"

using namespace todakit;
using Catch::Approx;

namespace {
const CurveSpec sym1{1, {2.0}, {3.0}};
const CurveSpec asym1{1, {2.0}, {4.0}};
const CurveSpec asym2{2, {2.0, 3.5}, {2.8, 4.5}};
} // namespace

TEST_CASE("gap polynomial centers symmetric systems and matches the weightless kernel",
          "[equilibrium]") {
    RPoly q = gap_vanishing_polynomial(sym1);
    REQUIRE(q.c.size() == 2);
    CHECK(q.c[1] == 1.0);
    CHECK(q.c[0] == Approx(-1.5).margin(1e-10));

    for (const CurveSpec* c : {&sym1, &asym1, &asym2}) {
        RPoly qq = gap_vanishing_polynomial(*c);
        PeriodData pd(*c);
        ThirdKind tk = pd.third_kind(std::vector<double>(static_cast<std::size_t>(c->genus), 0.0));
        REQUIRE(qq.c.size() == tk.p.c.size());
        for (std::size_t i = 0; i < qq.c.size(); ++i)
            CHECK(qq.c[i] == Approx(-tk.p.c[i]).margin(1e-9));
        // one sign change per gap, constant sign across each band
        for (const Interval& gap : c->gaps()) CHECK(qq(gap.lo) * qq(gap.hi) < 0.0);
        for (const Interval& band : c->bands()) CHECK(qq(band.lo) * qq(band.hi) > 0.0);
    }
}

TEST_CASE("equilibrium measures of reference systems", "[equilibrium]") {
    MeasureVector m1 = equilibrium_measures(sym1);
    REQUIRE(m1.rho.size() == 2);
    CHECK(m1.rho[0] == Approx(0.5).margin(1e-9));
    CHECK(m1.rho[1] == Approx(0.5).margin(1e-9));

    // the symmetric quartic support (two bands placed symmetrically about
    // zero) maps affinely onto this system; its mirror symmetry forces equal
    // masses
    double r2 = std::sqrt(2.0);
    MeasureVector quart = equilibrium_measures(CurveSpec(1, {3.0 + 2.0 * r2}, {4.0 + 2.0 * r2}));
    CHECK(quart.rho[0] == Approx(0.5).margin(1e-9));
    CHECK(quart.rho[1] == Approx(0.5).margin(1e-9));

    std::mt19937 rng(90210u);
    for (int trial = 0; trial < 12; ++trial) {
        CurveSpec c = oracles::random_curve(rng, 1 + trial % 3);
        MeasureVector m = equilibrium_measures(c);
        double total = 0.0;
        for (double r : m.rho) {
            CHECK(r > 0.0);
            total += r;
        }
        CHECK(total == Approx(1.0).margin(1e-9));
    }
}

TEST_CASE("measure dictionary round trips and matches handle periods", "[equilibrium]") {
    std::vector<cplx> b1 = measures_to_bperiods(MeasureVector{{0.5, 0.5}});
    REQUIRE(b1.size() == 1);
    CHECK(std::abs(b1[0] - cplx(0.0, M_PI)) < 1e-15);

    std::vector<cplx> b2 = measures_to_bperiods(MeasureVector{{1.0 / 3, 1.0 / 3, 1.0 / 3}});
    REQUIRE(b2.size() == 2);
    CHECK(std::abs(b2[0] - cplx(0.0, 2.0 * M_PI / 3.0)) < 1e-12);
    CHECK(std::abs(b2[1] - cplx(0.0, 4.0 * M_PI / 3.0)) < 1e-12);

    MeasureVector back = bperiods_to_measures(b2);
    REQUIRE(back.rho.size() == 3);
    for (double r : back.rho) CHECK(r == Approx(1.0 / 3).margin(1e-12));

    // independent route: partial sums of band masses against the normalized
    // periods computed through the integrals out to infinity
    for (const CurveSpec* c : {&asym1, &asym2}) {
        MeasureVector m = equilibrium_measures(*c);
        std::vector<cplx> via_rho = measures_to_bperiods(m);
        PeriodData pd(*c);
        ThirdKind tk = pd.third_kind(std::vector<double>(static_cast<std::size_t>(c->genus), 0.0));
        for (std::size_t k = 0; k < via_rho.size(); ++k)
            CHECK(std::abs(via_rho[k] - tk.b_periods[k]) < 1e-7);
    }
}

TEST_CASE("rational measure detection respects the shared denominator", "[equilibrium]") {
    auto hit = rational_measure_detect(MeasureVector{{0.5, 0.5}}, 8);
    REQUIRE(hit.has_value());
    CHECK(hit->N == 2);
    CHECK(hit->k == std::vector<int>{1, 1});

    // smallest denominator wins even when multiples also fit
    auto small = rational_measure_detect(MeasureVector{{0.5, 0.5}}, 4);
    REQUIRE(small.has_value());
    CHECK(small->N == 2);

    auto thirds = rational_measure_detect(MeasureVector{{1.0 / 3, 1.0 / 3, 1.0 / 3}}, 64);
    REQUIRE(thirds.has_value());
    CHECK(thirds->N == 3);
    CHECK(thirds->k == std::vector<int>{1, 1, 1});

    auto lopsided = rational_measure_detect(MeasureVector{{0.75, 0.25}}, 64);
    REQUIRE(lopsided.has_value());
    CHECK(lopsided->N == 4);
    CHECK(lopsided->k == std::vector<int>{3, 1});

    // a perturbation bigger than the tolerance must not certify
    CHECK_FALSE(rational_measure_detect(MeasureVector{{0.501, 0.499}}, 64, 1e-9).has_value());
    CHECK_FALSE(rational_measure_detect(MeasureVector{{0.501, 0.499}}, 64).has_value());

    CHECK_THROWS_AS(rational_measure_detect(MeasureVector{{0.5, 0.5}}, 1), DimensionMismatch);
}

TEST_CASE("isoequilibrium flow preserves every band mass", "[equilibrium]") {
    EquilibriumTrajectory tr = isoequilibrium_flow(sym1, {{3.0}}, 0.05);
    REQUIRE(tr.flow.completed());
    CHECK(tr.flow.samples.back().u[0] == Approx(4.0).margin(1e-6));
    REQUIRE(tr.measures.size() == tr.flow.samples.size());
    for (const MeasureVector& m : tr.measures) {
        CHECK(m.rho[0] == Approx(0.5).margin(1e-6));
        CHECK(m.rho[1] == Approx(0.5).margin(1e-6));
    }
    for (double d : tr.measure_drift) CHECK(d < 1e-6);

    // the rational certificate survives the whole deformation
    for (const MeasureVector& m : tr.measures) {
        auto cert = rational_measure_detect(m, 8, 1e-5);
        REQUIRE(cert.has_value());
        CHECK(cert->N == 2);
    }

    EquilibriumTrajectory still = isoequilibrium_flow(sym1, {}, 0.05);
    CHECK(still.flow.samples.size() == 1);
    for (double d : still.measure_drift) CHECK(d == 0.0);

    EquilibriumTrajectory two = isoequilibrium_flow(asym2, {{2.1, 3.6}}, 0.02);
    REQUIRE(two.flow.completed());
    for (double d : two.measure_drift) CHECK(d < 1e-6);
}

TEST_CASE("interval systems convert to curves and back", "[equilibrium]") {
    IntervalSystem s = IntervalSystem::from_curve(asym2);
    REQUIRE(s.bands.size() == 3);
    CHECK(s.bands[0] == std::make_pair(0.0, 1.0));
    CHECK(s.bands[2] == std::make_pair(3.5, 4.5));
    CurveSpec round = s.to_curve();
    CHECK(round.genus == 2);
    CHECK(round.x == asym2.x);
    CHECK(round.u == asym2.u);

    IntervalSystem bad;
    bad.bands = {{0.0, 1.5}, {2.0, 3.0}};
    CHECK_THROWS_AS(bad.to_curve(), OrderingViolation);

    IntervalSystem overlap;
    overlap.bands = {{0.0, 1.0}, {0.5, 3.0}};
    CHECK_THROWS_AS(overlap.to_curve(), OrderingViolation);
}

TEST_CASE("measure vectors police their invariants", "[equilibrium]") {
    CHECK_THROWS_AS((MeasureVector{{}}.validate()), DimensionMismatch);
    CHECK_THROWS_AS((MeasureVector{{0.5, 0.6}}.validate()), InputParseError);
    CHECK_THROWS_AS((MeasureVector{{1.2, -0.2}}.validate()), InputParseError);
    CHECK_NOTHROW((MeasureVector{{1.0}}.validate()));
    CHECK_NOTHROW((MeasureVector{{0.25, 0.75}}.validate()));
}
