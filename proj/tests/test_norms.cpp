#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "shearlab/error.hpp"
#include "shearlab/norms.hpp"

using namespace shearlab;

namespace {

const double kPi = 3.14159265358979323846;
const std::vector<double> kP{1.0, 10.0 / 9.0, 4.0 / 3.0, 5.0 / 3.0, 2.0};

// Gaussian integral of G^p done by hand: each factor exp(-a s^2) raised to p integrates to sqrt(pi / (p a)).
double closed_form_oracle(double nu, double tau, double p) {
    const double kappa = tau * tau / (12.0 * nu * nu);
    const double amp = 1.0 / (4.0 * kPi * tau * std::sqrt(1.0 + kappa));
    const double ix = std::sqrt(kPi * 4.0 * tau * (1.0 + kappa) / p);
    const double iy = std::sqrt(kPi * 4.0 * tau / p);
    return std::pow(std::pow(amp, p) * ix * iy, 1.0 / p);
}

}  // namespace

TEST_CASE("closed form values") {
    for (double nu : {1e-2, 1.0, 30.0}) {
        for (double tau : {1e-3, 0.5, 40.0}) {
            const KernelParams kp(nu, tau);
            CHECK(kernel_lp_closed_form(kp, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
            for (double p : kP) {
                CHECK(kernel_lp_closed_form(kp, p) == doctest::Approx(closed_form_oracle(nu, tau, p)).epsilon(1e-13));
            }
        }
    }
    const double expect = std::pow(2.0, -0.5) * std::pow(4.0 * kPi, -0.5) * std::pow(13.0 / 12.0, -0.25);
    CHECK(kernel_lp_closed_form(KernelParams(1.0, 1.0), 2.0) == doctest::Approx(expect).epsilon(1e-15));
    CHECK(expect == doctest::Approx(0.195522).epsilon(1e-5));
    CHECK_THROWS_AS(kernel_lp_closed_form(KernelParams(1.0, 1.0), 0.5), InvalidArgument);
}

TEST_CASE("quadrature matches the closed form on both slices") {
    for (double nu : {1e-2, 1.0}) {
        for (double ratio : {1e-2, 1.0, 1e2}) {
            const KernelParams kp(nu, nu * ratio);
            for (double p : kP) {
                for (Slice s : {Slice::source, Slice::target}) {
                    const double q = kernel_lp_quadrature({kp, p, s, Derivative::none, 0.3, -0.7});
                    CHECK(q == doctest::Approx(closed_form_oracle(nu, nu * ratio, p)).epsilon(1e-6));
                }
            }
        }
    }
}

TEST_CASE("quadrature rejects p below one") {
    CHECK_THROWS_AS(kernel_lp_quadrature({KernelParams(1.0, 1.0), 0.9, Slice::source, Derivative::none, 0.0, 0.0}),
                    InvalidArgument);
}

TEST_CASE("closed form over envelope is a constant") {
    for (double p : kP) {
        const double c = std::pow(p, -1.0 / p) * std::pow(4.0 * kPi, -(1.0 - 1.0 / p));
        for (double nu : {1e-3, 1.0}) {
            for (double ratio : {1e-3, 1.0, 1e3}) {
                const KernelParams kp(nu, nu * ratio);
                CHECK(kernel_lp_closed_form(kp, p) / lemma_envelope(Lemma::kernel, kp, p) ==
                      doctest::Approx(c).epsilon(1e-13));
            }
        }
    }
}

TEST_CASE("envelope slopes against numerical differentiation") {
    for (Lemma l : {Lemma::kernel, Lemma::x_derivative, Lemma::y_derivative}) {
        for (double p : kP) {
            const double nu = 1e-2;
            auto slope = [&](double tau) {
                const double h = 1e-3;
                return (std::log(lemma_envelope(l, KernelParams(nu, tau * std::exp(h)), p)) -
                        std::log(lemma_envelope(l, KernelParams(nu, tau * std::exp(-h)), p))) /
                       (2.0 * h);
            };
            CHECK(slope(nu * 1e6) == doctest::Approx(envelope_asymptotic_slope(l, p, true)).epsilon(1e-6));
            CHECK(slope(nu * 1e-6) == doctest::Approx(envelope_asymptotic_slope(l, p, false)).epsilon(1e-6));
        }
    }
    const double e = 1.0 - 1.0 / 2.0;
    CHECK(envelope_asymptotic_slope(Lemma::kernel, 2.0, true) == doctest::Approx(-2.0 * e));
    CHECK(envelope_asymptotic_slope(Lemma::x_derivative, 2.0, true) == doctest::Approx(-2.0 * e - 1.5));
    CHECK(envelope_asymptotic_slope(Lemma::y_derivative, 2.0, true) == doctest::Approx(-2.0 * e - 0.5));
}

TEST_CASE("lemma 3.1 report: constant ratio, no flags") {
    std::vector<std::pair<double, double>> grid;
    for (double nu : {1e-2, 1.0}) {
        for (int k = -4; k <= 4; ++k) grid.emplace_back(nu, nu * std::pow(10.0, k / 2.0));
    }
    const NormReport r = verify_lemma_bounds(Lemma::kernel, grid, kP);
    CHECK(r.ok());
    for (double p : kP) {
        double lo = 1e300, hi = 0.0;
        for (const auto& row : r.rows) {
            if (row.p != p) continue;
            lo = std::min(lo, row.ratio);
            hi = std::max(hi, row.ratio);
            if (p == 1.0) CHECK(row.ratio == doctest::Approx(1.0).epsilon(1e-9));
        }
        CHECK((hi - lo) / lo <= 1e-6);
    }
}

TEST_CASE("derivative slopes: x decays one power faster than y") {
    std::vector<std::pair<double, double>> grid;
    const double nu = 1e-2;
    for (int k = 4; k <= 8; ++k) grid.emplace_back(nu, nu * std::pow(10.0, k / 2.0));
    const std::vector<double> ps{4.0 / 3.0, 2.0};
    VerifyOptions opt;
    opt.slices = {Slice::source};
    const NormReport rx = verify_lemma_bounds(Lemma::x_derivative, grid, ps, opt);
    const NormReport ry = verify_lemma_bounds(Lemma::y_derivative, grid, ps, opt);
    CHECK(rx.ok());
    CHECK(ry.ok());
    for (double p : ps) {
        double sx = 0.0, sy = 0.0;
        for (const auto& f : rx.fits) {
            if (f.p == p && f.large_tau && f.derivative == Derivative::x) sx = f.measured_slope;
        }
        for (const auto& f : ry.fits) {
            if (f.p == p && f.large_tau && f.derivative == Derivative::y) sy = f.measured_slope;
        }
        CHECK(sx == doctest::Approx(envelope_asymptotic_slope(Lemma::x_derivative, p, true)).epsilon(0.05 / 3.0));
        CHECK(sy == doctest::Approx(envelope_asymptotic_slope(Lemma::y_derivative, p, true)).epsilon(0.05 / 2.0));
        CHECK(std::abs((sy - sx) - 1.0) <= 0.1);
    }
}

TEST_CASE("wrong envelope exponent is flagged") {
    std::vector<std::pair<double, double>> grid;
    for (int k = -4; k <= 8; ++k) grid.emplace_back(1e-2, 1e-2 * std::pow(10.0, k / 2.0));
    VerifyOptions opt;
    opt.slices = {Slice::source};
    opt.tau_shift = 0.25;
    const NormReport r = verify_lemma_bounds(Lemma::kernel, grid, {2.0}, opt);
    CHECK_FALSE(r.ok());
}

TEST_CASE("least squares slope") {
    CHECK(least_squares_slope({0.0, 1.0, 2.0, 3.0}, {1.0, 3.0, 5.0, 7.0}) == doctest::Approx(2.0));
}

TEST_CASE("young: spike kernel") {
    const std::size_t n = 16;
    const double w = 0.25, s = 3.0;
    std::vector<double> k(n * n, 0.0), f(n);
    for (std::size_t i = 0; i < n; ++i) {
        k[i * n + i] = s / w;
        f[i] = std::sin(1.0 + i);
    }
    const auto r = young_check(k, f, w, 3.0, 1.0, 3.0);
    double fp = 0.0;
    for (double v : f) fp += std::pow(std::abs(v), 3.0) * w;
    fp = std::cbrt(fp);
    CHECK(r.lhs == doctest::Approx(s * fp).epsilon(1e-12));
    CHECK(r.lhs <= r.bound_fine * (1.0 + 1e-12));
}

TEST_CASE("young: named triples on a 64x64 grid") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const std::size_t n = 64 * 64;
    std::vector<double> k(n * n), f(n);
    for (auto& v : k) v = u(rng);
    for (auto& v : f) v = u(rng) - 0.5;
    for (auto [p, q] : std::vector<std::pair<double, double>>{{2.0, 1.0}, {5.0 / 3.0, 10.0 / 9.0}}) {
        const double r = 1.0 / (1.0 / q + 1.0 / p - 1.0);
        const auto y = young_check(k, f, 1.0 / n, p, q, r);
        CHECK(y.lhs <= y.bound_fine * (1.0 + 1e-12));
        CHECK(y.bound_fine <= y.bound_coarse * (1.0 + 1e-12));
    }
}

TEST_CASE("young: ten thousand random instances") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> size(1, 12);
    int checked = 0;
    while (checked < 10000) {
        const std::size_t n = static_cast<std::size_t>(size(rng));
        // 1/p + 1/q - 1 = 1/r in [0.05, 1].
        const double ip = 0.05 + 0.95 * u(rng), iq = 0.05 + 0.95 * u(rng);
        if (ip + iq - 1.0 < 0.05) continue;
        const double p = 1.0 / ip, q = 1.0 / iq, r = 1.0 / (ip + iq - 1.0);
        std::vector<double> k(n * n), f(n);
        for (auto& v : k) v = u(rng) < 0.3 ? 0.0 : u(rng);
        for (auto& v : f) v = 2.0 * u(rng) - 1.0;
        const auto y = young_check(k, f, 0.1 + u(rng), p, q, r);
        CHECK(y.lhs <= y.bound_fine * (1.0 + 1e-10));
        CHECK(y.bound_fine <= y.bound_coarse * (1.0 + 1e-12));
        ++checked;
    }
}

TEST_CASE("young: rejected exponents") {
    const std::vector<double> k{1.0}, f{1.0};
    CHECK_THROWS_AS(young_check(k, f, 1.0, 2.0, 2.0, 2.0), InvalidArgument);
    CHECK_THROWS_AS(young_check(k, f, 1.0, 0.5, 1.0, 0.5), InvalidArgument);
}
