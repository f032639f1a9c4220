#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "shearlab/error.hpp"
#include "shearlab/quadrature.hpp"

using namespace shearlab;
using namespace shearlab::quad;

TEST_CASE("1-D rules integrate smooth functions") {
    const std::vector<Interval> unit{{0.0, 1.0}};
    CHECK(integrate_1d<double>([](double x) { return x * x * x * x; }, unit, {}).value ==
          doctest::Approx(0.2).epsilon(1e-14));
    const std::vector<Interval> halfpi{{0.0, M_PI / 2}};
    CHECK(integrate_1d<double>([](double x) { return std::sin(x); }, halfpi, {}).value ==
          doctest::Approx(1.0).epsilon(1e-13));
    const auto w = split_window(0.0, 40.0, 4);
    CHECK(integrate_1d<double>([](double x) { return std::exp(-x * x); }, w, {}).value ==
          doctest::Approx(std::sqrt(M_PI)).epsilon(1e-12));
}

TEST_CASE("1-D complex integrand") {
    const std::vector<Interval> p{{0.0, 2.0 * M_PI}};
    const auto r = integrate_1d<std::complex<double>>(
        [](double x) { return std::exp(std::complex<double>(0.0, 3.0 * x)) * x; }, p, {});
    // integral of x e^{3ix} over [0, 2 pi] = 2 pi / (3 i)
    CHECK(r.value.real() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(r.value.imag() == doctest::Approx(-2.0 * M_PI / 3.0).epsilon(1e-12));
}

TEST_CASE("adaptive refinement handles a kink") {
    const std::vector<Interval> p{{-1.0, 2.0}};
    CHECK(integrate_1d<double>([](double x) { return std::abs(x - 0.3141); }, p, {}).value ==
          doctest::Approx((1.3141 * 1.3141 + 1.6859 * 1.6859) / 2.0).epsilon(1e-10));
}

TEST_CASE("non-convergence is reported") {
    const std::vector<Interval> p{{0.0, 1.0}};
    Tolerance tight{1e-15, 1e-15, 5};
    CHECK_THROWS_AS(integrate_1d<double>([](double x) { return 1.0 / std::sqrt(x + 1e-300); }, p, tight),
                    QuadratureError);
}

TEST_CASE("2-D Gaussian and polynomial") {
    const auto xs = split_window(0.0, 12.0, 4);
    const auto ys = split_window(1.0, 12.0, 4);
    const auto boxes = tensor_boxes(xs, ys);
    CHECK(boxes.size() == 16);
    const auto r = integrate_2d([](double x, double y) { return std::exp(-x * x / 2.0 - (y - 1.0) * (y - 1.0)); },
                                boxes, {1e-14, 1e-12, 100000});
    CHECK(r.value == doctest::Approx(std::sqrt(2.0 * M_PI) * std::sqrt(M_PI)).epsilon(1e-10));
    const std::vector<Rect> sq{{{0.0, 1.0}, {0.0, 2.0}}};
    CHECK(integrate_2d([](double x, double y) { return x * x * y; }, sq, {}).value ==
          doctest::Approx(2.0 / 3.0).epsilon(1e-13));
}

TEST_CASE("split window") {
    const auto w = split_window(2.0, 3.0, 3);
    REQUIRE(w.size() == 3);
    CHECK(w.front().lo == doctest::Approx(-1.0));
    CHECK(w[1].lo == doctest::Approx(1.0));
    CHECK(w.back().hi == doctest::Approx(5.0));
}
