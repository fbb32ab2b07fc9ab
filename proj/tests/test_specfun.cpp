#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "specfun.hpp"

using namespace lnsum;

TEST_CASE("gauss_hermite basic rules") {
    auto r2 = gauss_hermite(2);
    REQUIRE(r2.nodes.size() == 2);
    CHECK(r2.nodes[0] == doctest::Approx(-1.0 / std::sqrt(2.0)).epsilon(1e-14));
    CHECK(r2.nodes[1] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
    CHECK(r2.weights[0] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(r2.weights[1] == doctest::Approx(0.5).epsilon(1e-14));

    for (int n : {1, 5, 20, 64}) {
        auto r = gauss_hermite(n);
        double wsum = 0.0, m2 = 0.0;
        for (int i = 0; i < n; ++i) {
            wsum += r.weights[i];
            m2 += r.weights[i] * 2.0 * r.nodes[i] * r.nodes[i];  // E[Z^2], Z = sqrt2 x
        }
        CHECK(wsum == doctest::Approx(1.0).epsilon(1e-13));
        if (n >= 2) CHECK(m2 == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK_THROWS_AS(gauss_hermite(0), config_error);
}

TEST_CASE("lambert w real") {
    CHECK(lambert_w_real(1.0) == doctest::Approx(0.5671432904097838).epsilon(1e-13));
    CHECK(lambert_w_real(0.0) == doctest::Approx(0.0));
    CHECK(lambert_w_real(std::exp(1.0)) == doctest::Approx(1.0).epsilon(1e-13));

    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-0.999 / std::exp(1.0), 1e3);
    for (int i = 0; i < 1000; ++i) {
        double y = u(rng);
        double w = lambert_w_real(y);
        double res = std::fabs(w * std::exp(w) - y);
        CHECK(res <= 1e-12 * std::max(1.0, std::fabs(y)));
    }
}

TEST_CASE("lambert w0 complex residual") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (int i = 0; i < 1000; ++i) {
        cplx z(u(rng), u(rng));
        cplx w = lambert_w0(z);
        CHECK(std::abs(w * std::exp(w) - z) <= 1e-12 * std::max(1.0, std::abs(z)));
    }
}

TEST_CASE("lambert saddle branch") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(1e-3, 50.0);
    for (int i = 0; i < 200; ++i) {
        double om = u(rng);
        cplx zeta(0.0, om);
        cplx z = lambert_saddle(zeta);
        // second quadrant for zeta on the positive imaginary axis
        CHECK(z.real() <= 1e-12);
        CHECK(z.imag() >= 0.0);
        CHECK(std::abs(z * std::exp(-z) - zeta) <= 1e-10 * std::max(1.0, std::abs(zeta)));
        // conjugate symmetry
        cplx zc = lambert_saddle(std::conj(zeta));
        CHECK(std::abs(zc - std::conj(z)) <= 1e-12 * std::max(1.0, std::abs(z)));
    }
}

TEST_CASE("exponential integrals") {
    CHECK(expint_e1(cplx(1.0, 0.0)).real() ==
          doctest::Approx(0.21938393439552026).epsilon(1e-12));
    CHECK(std::fabs(expint_e1(cplx(1.0, 0.0)).imag()) <= 1e-15);

    cplx v = expint_e1(cplx(1.0, 1.0));
    CHECK(v.real() == doctest::Approx(0.00028162445198141833).epsilon(1e-8));
    CHECK(v.imag() == doctest::Approx(-0.17932453503935661).epsilon(1e-10));

    // Ein(z) = gamma + log z + E1(z); entire, Ein(0) = 0
    const double gamma = 0.5772156649015329;
    for (cplx z : {cplx(0.5, 0.0), cplx(2.0, 3.0), cplx(0.1, -0.4)}) {
        cplx lhs = expint_ein(z);
        cplx rhs = gamma + std::log(z) + expint_e1(z);
        CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(lhs)));
    }
    CHECK(std::abs(expint_ein(cplx(0.0, 0.0))) <= 1e-15);
    CHECK_THROWS_AS(expint_e1(cplx(0.0, 0.0)), domain_error);
}

TEST_CASE("log gamma") {
    CHECK(log_gamma(cplx(5.0, 0.0)).real() ==
          doctest::Approx(std::log(24.0)).epsilon(1e-13));
    CHECK(log_gamma(cplx(1.0, 0.0)).real() == doctest::Approx(0.0).epsilon(1e-13));
    // recurrence log G(z+1) = log G(z) + log z
    cplx z(2.3, 1.7);
    CHECK(std::abs(log_gamma(z + 1.0) - (log_gamma(z) + std::log(z))) <= 1e-12);
}

TEST_CASE("faddeeva w") {
    cplx w1 = faddeeva_w(cplx(1.0, 0.0));
    CHECK(w1.real() == doctest::Approx(std::exp(-1.0)).epsilon(1e-9));
    CHECK(w1.imag() == doctest::Approx(0.6071577058413937).epsilon(1e-9));
    cplx wi = faddeeva_w(cplx(0.0, 1.0));
    CHECK(wi.real() == doctest::Approx(0.42758357615580700).epsilon(1e-9));
    CHECK(std::fabs(wi.imag()) <= 1e-12);
    CHECK(std::abs(faddeeva_w(cplx(0.0, 0.0)) - cplx(1.0, 0.0)) <= 1e-12);
}

TEST_CASE("integration") {
    double s = integrate([](double x) { return std::sin(x); }, 0.0,
                         std::acos(-1.0));
    CHECK(s == doctest::Approx(2.0).epsilon(1e-11));
    double p = integrate_panel([](double x) { return x * x; }, 0.0, 1.0);
    CHECK(p == doctest::Approx(1.0 / 3.0).epsilon(1e-13));
}
