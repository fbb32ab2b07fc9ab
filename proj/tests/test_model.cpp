#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "model.hpp"

using namespace lnsum;

TEST_CASE("validation") {
    CHECK_NOTHROW(validate(LognormalComponent{0.0, 1.0}));
    CHECK_THROWS_AS(validate(LognormalComponent{0.0, 0.0}), config_error);
    CHECK_THROWS_AS(validate(LognormalComponent{0.0, -1.0}), config_error);
    CHECK_THROWS_AS(validate(SumModel{}), config_error);
}

TEST_CASE("single component pdf/cdf") {
    LognormalComponent c{0.3, 0.8};
    CHECK(cdf(std::exp(0.3), c) == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(cdf(1e-12, c) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(cdf(1e12, c) == doctest::Approx(1.0).epsilon(1e-12));
    // pdf integrates the cdf: central difference check
    double x = 1.7, h = 1e-5;
    double fd = (cdf(x + h, c) - cdf(x - h, c)) / (2.0 * h);
    CHECK(pdf(x, c) == doctest::Approx(fd).epsilon(1e-8));
}

TEST_CASE("model file round trip") {
    std::istringstream in(
        "# comment line\n"
        "mu=0.0 sigma=0.5\n"
        "\n"
        "mu=-0.2 sigma=1.5  # trailing note\n");
    SumModel m = parse_model(in);
    REQUIRE(m.components.size() == 2);
    CHECK(m.components[1].mu == doctest::Approx(-0.2));
    CHECK(m.components[1].sigma == doctest::Approx(1.5));

    std::istringstream back(format_model(m));
    SumModel m2 = parse_model(back);
    REQUIRE(m2.components.size() == 2);
    CHECK(m2.components[0].sigma == doctest::Approx(0.5));
}

TEST_CASE("model file errors") {
    std::istringstream bad("mu=0.0 sigma=abc\n");
    CHECK_THROWS_AS(parse_model(bad), config_error);
    std::istringstream negative("mu=0.0 sigma=-1\n");
    CHECK_THROWS(parse_model(negative));
    CHECK_THROWS_AS(parse_model_file("/nonexistent/path/model.txt"), io_error);
}

TEST_CASE("sampler determinism and moments") {
    SumModel m{{{0.0, 0.5}, {0.3, 1.0}}};
    auto s1 = sample_sum(m, 1000, 42);
    auto s2 = sample_sum(m, 1000, 42);
    auto s3 = sample_sum(m, 1000, 43);
    CHECK(s1 == s2);
    CHECK(s1 != s3);

    auto big = sample_sum(m, 400000, 5);
    double mean = std::accumulate(big.begin(), big.end(), 0.0) / big.size();
    double expect = std::exp(0.0 + 0.125) + std::exp(0.3 + 0.5);
    CHECK(mean == doctest::Approx(expect).epsilon(0.01));
    for (double v : big) REQUIRE(v > 0.0);
}

TEST_CASE("moment-matched equivalent") {
    // one component: exact fixed point
    SumModel one{{{0.4, 0.9}}};
    auto eq1 = fw_equivalent(one);
    CHECK(eq1.mu == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(eq1.sigma == doctest::Approx(0.9).epsilon(1e-12));

    // several components: first two moments of the sum are preserved
    SumModel m{{{0.0, 0.5}, {0.3, 1.0}, {-0.2, 1.5}}};
    auto eq = fw_equivalent(m);
    double mean = 0.0, second = 0.0;
    for (const auto& c : m.components)
        mean += std::exp(c.mu + 0.5 * c.sigma * c.sigma);
    for (const auto& ci : m.components)
        for (const auto& cj : m.components) {
            double mi = std::exp(ci.mu + 0.5 * ci.sigma * ci.sigma);
            double mj = std::exp(cj.mu + 0.5 * cj.sigma * cj.sigma);
            second += (&ci == &cj)
                          ? mi * mi * std::exp(ci.sigma * ci.sigma)
                          : mi * mj;
        }
    double eq_mean = std::exp(eq.mu + 0.5 * eq.sigma * eq.sigma);
    double eq_second = eq_mean * eq_mean * std::exp(eq.sigma * eq.sigma);
    CHECK(eq_mean == doctest::Approx(mean).epsilon(1e-10));
    CHECK(eq_second == doctest::Approx(second).epsilon(1e-10));
}

TEST_CASE("lognormality residual") {
    LognormalComponent c{0.1, 0.7};
    std::vector<double> xs, ps;
    for (int i = 1; i <= 40; ++i) {
        double x = 0.1 * i;
        xs.push_back(x);
        ps.push_back(pdf(x, c));
    }
    CHECK(lognormality_residual(xs, ps) <= 1e-10);

    // exponential density is not lognormal-shaped
    std::vector<double> pe;
    for (double x : xs) pe.push_back(std::exp(-x));
    CHECK(lognormality_residual(xs, pe) > 1e-3);
}
