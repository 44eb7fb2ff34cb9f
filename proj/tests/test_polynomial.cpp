#include <catch2/catch_amalgamated.hpp>

#include "todakit/polynomial.hpp"

using namespace todakit;
using Catch::Approx;

TEST_CASE("evaluation and derivative", "[polynomial]") {
    RPoly p(std::vector<double>{1.0, -3.0, 0.0, 2.0}); // 1 - 3u + 2u^3
    CHECK(p(0.0) == Approx(1.0));
    CHECK(p(2.0) == Approx(1.0 - 6.0 + 16.0));
    RPoly d = p.derivative();
    REQUIRE(d.degree() == 2);
    CHECK(d(2.0) == Approx(-3.0 + 24.0));
    CHECK(p.derivative().derivative()(1.5) == Approx(18.0));
}

TEST_CASE("product and divmod round trip", "[polynomial]") {
    RPoly a(std::vector<double>{2.0, 0.0, 1.0});        // u^2 + 2
    RPoly b(std::vector<double>{-1.0, 1.0, 0.0, 3.0});  // 3u^3 + u - 1
    RPoly prod = a * b;
    REQUIRE(prod.degree() == 5);
    auto dm = divmod(prod, a);
    REQUIRE(dm.quotient.degree() == 3);
    for (int k = 0; k <= 3; ++k)
        CHECK(dm.quotient.c[static_cast<std::size_t>(k)] ==
              Approx(b.c[static_cast<std::size_t>(k)]).margin(1e-12));
    for (double r : dm.remainder.c) CHECK(std::abs(r) < 1e-12);

    // a nontrivial remainder
    RPoly n(std::vector<double>{5.0, -2.0, 0.0, 0.0, 1.0}); // u^4 - 2u + 5
    auto dm2 = divmod(n, a);
    RPoly back = dm2.quotient * a + dm2.remainder;
    for (int k = 0; k <= 4; ++k)
        CHECK(back.c[static_cast<std::size_t>(k)] ==
              Approx(n.c[static_cast<std::size_t>(k)]).margin(1e-12));
}

TEST_CASE("monic expansion from roots", "[polynomial]") {
    RPoly p = poly_from_roots<double>({0.0, 1.0, 2.0, 3.0});
    // u(u-1)(u-2)(u-3) = u^4 - 6u^3 + 11u^2 - 6u
    REQUIRE(p.degree() == 4);
    CHECK(p.c[0] == Approx(0.0).margin(1e-14));
    CHECK(p.c[1] == Approx(-6.0));
    CHECK(p.c[2] == Approx(11.0));
    CHECK(p.c[3] == Approx(-6.0));
    CHECK(p.c[4] == Approx(1.0));
}

TEST_CASE("affine composition", "[polynomial]") {
    RPoly p(std::vector<double>{1.0, 0.0, 1.0}); // u^2 + 1
    RPoly q = poly_affine_compose(p, 2.0, -3.0); // (2z-3)^2 + 1 = 4z^2 -12z + 10
    REQUIRE(q.degree() == 2);
    CHECK(q.c[0] == Approx(10.0));
    CHECK(q.c[1] == Approx(-12.0));
    CHECK(q.c[2] == Approx(4.0));
    for (double z : {-1.3, 0.4, 2.2}) CHECK(q(z) == Approx(p(2.0 * z - 3.0)));
}

TEST_CASE("sturm root counting", "[polynomial]") {
    RPoly p = poly_from_roots<double>({1.0, 2.0, 3.0});
    CHECK(sturm_count(p, 0.0, 4.0) == 3);
    CHECK(sturm_count(p, 0.5, 2.5) == 2);
    CHECK(sturm_count(p, 1.5, 1.9) == 0);
    CHECK(sturm_count(p, 2.5, 3.5) == 1);
    // double root: counted once (distinct roots)
    RPoly q = poly_from_roots<double>({2.0, 2.0, 5.0});
    CHECK(sturm_count(q, 1.0, 3.0) == 1);
    CHECK(sturm_count(q, 0.0, 6.0) == 2);
}

TEST_CASE("coefficient square root", "[polynomial]") {
    RPoly y(std::vector<double>{-1.0, 2.0, 0.5, 4.0});
    RPoly s = y * y;
    RPoly r = poly_sqrt_newton(s);
    REQUIRE(r.degree() == 3);
    // root is normalized to positive leading coefficient
    for (int k = 0; k <= 3; ++k)
        CHECK(r.c[static_cast<std::size_t>(k)] ==
              Approx(y.c[static_cast<std::size_t>(k)]).margin(1e-11));
    RPoly resid = s - r * r;
    CHECK(poly_max_abs_coeff(resid) < 1e-10 * poly_max_abs_coeff(s));

    CHECK_THROWS_AS(poly_sqrt_newton(RPoly(std::vector<double>{0.0, 1.0})), NotPerfectSquare);
    CHECK_THROWS_AS(poly_sqrt_newton(RPoly(std::vector<double>{1.0, 0.0, -1.0})),
                    NotPerfectSquare);
}

TEST_CASE("interpolation reproduces coefficients", "[polynomial]") {
    RPoly p(std::vector<double>{0.25, -1.0, 0.0, 3.0, -0.5});
    std::vector<double> nodes;
    std::vector<double> vals;
    for (int k = 0; k <= 4; ++k) {
        double t = std::cos((2.0 * k + 1.0) * M_PI / 10.0) * 2.0; // Chebyshev-ish
        nodes.push_back(t);
        vals.push_back(p(t));
    }
    RPoly q = interpolate_polynomial(nodes, vals);
    for (int k = 0; k <= 4; ++k)
        CHECK(q.c[static_cast<std::size_t>(k)] ==
              Approx(p.c[static_cast<std::size_t>(k)]).margin(1e-10));
    CHECK_THROWS_AS(interpolate_polynomial({1.0, 1.0}, std::vector<double>{1.0, 2.0}),
                    CoincidentPoints);
}
