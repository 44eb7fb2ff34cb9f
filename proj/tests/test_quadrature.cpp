#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "todakit/quadrature.hpp"

using namespace todakit;
using Catch::Approx;

TEST_CASE("endpoint-weighted rule hits arcsine moments", "[quadrature]") {
    // \int_0^1 du / sqrt(u(1-u)) = pi, and the first moment is pi/2.
    auto one = [](double) { return 1.0; };
    CHECK(chebyshev_singular_integral(one, 0.0, 1.0) == Approx(M_PI).epsilon(1e-12));
    auto lin = [](double t) { return t; };
    CHECK(chebyshev_singular_integral(lin, 0.0, 1.0) == Approx(M_PI / 2).epsilon(1e-12));
    // shifted interval, analytic integrand; reference through the smooth
    // theta substitution u = mid + rad cos(theta) handled by the other rule
    auto f = [](double t) { return std::exp(-t) * (t * t + 1.0); };
    QuadratureControl tight;
    tight.abs_tol = 1e-12;
    auto smooth = [&f](double th) { return f(3.5 + 1.5 * std::cos(th)); };
    double ref = tanh_sinh_integral(smooth, 0.0, M_PI, tight);
    CHECK(chebyshev_singular_integral(f, 2.0, 5.0) == Approx(ref).margin(1e-11));
}

TEST_CASE("endpoint-weighted rule works for complex integrands", "[quadrature]") {
    auto f = [](double t) { return cplx(t, -2.0 * t); };
    cplx got = chebyshev_singular_integral(f, 0.0, 1.0);
    CHECK(got.real() == Approx(M_PI / 2).epsilon(1e-12));
    CHECK(got.imag() == Approx(-M_PI).epsilon(1e-12));
}

TEST_CASE("double-exponential rule", "[quadrature]") {
    auto cube = [](double t) { return t * t * t; };
    CHECK(tanh_sinh_integral(cube, 0.0, 1.0) == Approx(0.25).epsilon(1e-12));
    auto inv_sqrt = [](double t) { return 1.0 / std::sqrt(t); };
    CHECK(tanh_sinh_integral(inv_sqrt, 0.0, 1.0) == Approx(2.0).epsilon(1e-10));
    auto semicircle = [](double t) { return std::sqrt(1.0 - t * t); };
    CHECK(tanh_sinh_integral(semicircle, -1.0, 1.0) == Approx(M_PI / 2).epsilon(1e-11));
    auto logsing = [](double t) { return std::log(1.0 / t); };
    CHECK(tanh_sinh_integral(logsing, 0.0, 1.0) == Approx(1.0).epsilon(1e-10));
}

TEST_CASE("non-integrable input raises instead of returning junk", "[quadrature]") {
    auto pole = [](double t) { return 1.0 / t; };
    CHECK_THROWS_AS(tanh_sinh_integral(pole, 0.0, 1.0), QuadratureNotConverged);
    CHECK_THROWS_AS(tanh_sinh_integral(pole, 1.0, 0.5), QuadratureNotConverged);
    auto ok = [](double) { return 1.0; };
    CHECK_THROWS_AS(chebyshev_singular_integral(ok, 1.0, 1.0), QuadratureNotConverged);
}
