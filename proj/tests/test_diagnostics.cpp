#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "shearlab/diagnostics.hpp"
#include "shearlab/error.hpp"

using namespace shearlab;

namespace {

const double kPi = 3.14159265358979323846;

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1);
    return v;
}

// Integral of |cos x|^q over one period.
double cos_power_integral(double q) {
    return 2.0 * std::sqrt(kPi) * std::tgamma((q + 1.0) / 2.0) / std::tgamma(q / 2.0 + 1.0);
}

SpectralVelocity velocity_of(const ScalarField& w) { return biot_savart_spectral(transform_forward(w)); }

ScalarField blob(const GridSpec& g, double width) {
    ScalarField f(g);
    for (int j = 0; j < g.ny(); ++j) {
        for (int i = 0; i < g.nx(); ++i) {
            const double x = g.x(i) / width, y = g.y(j) / width;
            f.at(i, j) = (1.0 + 0.5 * x - 0.3 * y * y) * std::exp(-(x * x + 2.0 * y * y) / 2.0);
        }
    }
    return f;
}

}  // namespace

TEST_CASE("decay fit recovers synthetic exponents") {
    const auto t = linspace(0.0, 60.0, 121);
    for (double alpha : {1.0, 0.5, 1.75}) {
        std::vector<double> v;
        for (double s : t) v.push_back(3.0 * std::pow(1.0 + s, -alpha));
        const DecayFit f = decay_fit(t, v, 5.0, 50.0);
        CHECK(f.alpha == doctest::Approx(alpha).epsilon(1e-6));
        CHECK(f.amplitude == doctest::Approx(3.0).epsilon(1e-6));
        CHECK(f.residual <= 1e-10);
        CHECK(f.samples == 91);
    }
    const double nu = 1e-2;
    std::vector<double> v;
    for (double s : t) v.push_back(std::pow(1.0 + nu * s, -0.5));
    CHECK(decay_fit(t, v, 5.0, 50.0, nu).alpha == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("decay fit errors") {
    const auto t = linspace(0.0, 10.0, 11);
    std::vector<double> v(t.size(), 1.0);
    CHECK_THROWS_AS(decay_fit(t, v, 2.0, 8.0), InvalidArgument);
    const auto t2 = linspace(0.0, 10.0, 101);
    std::vector<double> v2(t2.size(), 1.0);
    v2[50] = 0.0;
    CHECK_THROWS_AS(decay_fit(t2, v2, 1.0, 9.0), InvalidArgument);
    CHECK_THROWS_AS(decay_fit(t2, std::vector<double>(3, 1.0), 1.0, 9.0), InvalidArgument);
}

TEST_CASE("bootstrap: degenerate and boundary trajectories") {
    const auto t = linspace(0.0, 50.0, 501);
    const double eps = 0.2, delta = 3.0;
    const BootstrapReport zero = bootstrap_audit(t, std::vector<double>(t.size(), 0.0), eps, delta);
    CHECK(zero.hypothesis_ok);
    CHECK(zero.conclusion_ok);
    CHECK(zero.conclusion_margin == 0.0);
    CHECK_FALSE(zero.first_violation.has_value());

    std::vector<double> edge;
    for (double s : t) edge.push_back(delta * eps / (1.0 + s));
    const BootstrapReport b = bootstrap_audit(t, edge, eps, delta);
    CHECK(b.hypothesis_ok);
    CHECK_FALSE(b.conclusion_ok);
    CHECK(b.conclusion_margin == doctest::Approx(2.0).epsilon(1e-14));

    std::vector<double> over = edge;
    over[200] *= 1.01;
    const BootstrapReport o = bootstrap_audit(t, over, eps, delta);
    CHECK_FALSE(o.hypothesis_ok);
    REQUIRE(o.first_violation.has_value());
    CHECK(*o.first_violation == doctest::Approx(t[200]));

    CHECK_THROWS_AS(bootstrap_audit(t, edge, 0.0, delta), InvalidArgument);
    CHECK_THROWS_AS(bootstrap_audit(t, edge, eps, -1.0), InvalidArgument);
}

TEST_CASE("bootstrap: scaling up never repairs the hypothesis") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const auto t = linspace(0.0, 20.0, 41);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> v;
        for (double s : t) v.push_back(u(rng) * 2.0 / (1.0 + s));
        bool prev = true;
        for (double scale : {0.25, 0.5, 1.0, 1.5, 2.0, 4.0}) {
            std::vector<double> w = v;
            for (double& x : w) x *= scale;
            const bool ok = bootstrap_audit(t, w, 1.0, 1.5).hypothesis_ok;
            CHECK((prev || !ok));
            prev = ok;
        }
    }
}

TEST_CASE("gn: admissible pairs") {
    for (const auto& pr : paper_gn_pairs()) CHECK(gn_admissible(pr));
    CHECK_FALSE(gn_admissible({10.0, 0.9}));
    CHECK_FALSE(gn_admissible({1.5, 0.5 + 1.0 / 1.5}));
    const GridSpec g = GridSpec::square(32, kPi);
    const auto u = velocity_of(blob(g, 0.5));
    CHECK_THROWS_AS(gn_check(u, {{10.0, 0.9}}), InvalidArgument);
}

TEST_CASE("gn: single cosine mode in closed form") {
    // w = sin x gives u = (0, cos x) on [-pi, pi]^2.
    const GridSpec g = GridSpec::square(256, kPi);
    ScalarField w(g);
    for (int j = 0; j < g.ny(); ++j) {
        for (int i = 0; i < g.nx(); ++i) w.at(i, j) = std::sin(g.x(i));
    }
    const auto u = velocity_of(w);
    const double l2 = kPi * std::sqrt(2.0);
    CHECK(hessian_l2(u) == doctest::Approx(l2).epsilon(1e-12));
    for (const auto& r : gn_check(u, paper_gn_pairs())) {
        REQUIRE(r.ratio.has_value());
        const double lq = std::pow(2.0 * kPi * cos_power_integral(r.q), 1.0 / r.q);
        const double expect = lq / (std::pow(l2, r.a) * std::pow(l2, 1.0 - r.a));
        const bool even = std::abs(r.q - std::round(r.q)) < 1e-12 && static_cast<int>(std::round(r.q)) % 2 == 0;
        CHECK(*r.ratio == doctest::Approx(expect).epsilon(even ? 1e-12 : 1e-6));
    }
}

TEST_CASE("gn: zero field is undefined") {
    const GridSpec g = GridSpec::square(32, kPi);
    const auto u = velocity_of(ScalarField(g));
    for (const auto& r : gn_check(u, paper_gn_pairs())) CHECK_FALSE(r.ratio.has_value());
}

TEST_CASE("gn: ratios are scale invariant") {
    // Same samples on a box half the size: u(x) -> u(2x) / 2 up to the amplitude.
    const GridSpec a = GridSpec::square(64, 8.0), b = GridSpec::square(64, 4.0);
    const ScalarField wa = blob(a, 1.0);
    const ScalarField wb(b, wa.values());
    const auto ra = gn_check(velocity_of(wa), paper_gn_pairs());
    auto ua = velocity_of(wa);
    for (auto& c : ua.u1.mutable_modes()) c *= 7.0;
    for (auto& c : ua.u2.mutable_modes()) c *= 7.0;
    const auto rs = gn_check(ua, paper_gn_pairs());
    const auto rb = gn_check(velocity_of(wb), paper_gn_pairs());
    for (std::size_t k = 0; k < ra.size(); ++k) {
        CHECK(*rb[k].ratio == doctest::Approx(*ra[k].ratio).epsilon(1e-12));
        CHECK(*rs[k].ratio == doctest::Approx(*ra[k].ratio).epsilon(1e-12));
    }
}

TEST_CASE("gn: ratios along a nonlinear run are refinement stable") {
    auto run = [](int n) {
        SimConfig c;
        c.nu = 2e-2;
        c.grid = GridSpec::square(n, 10.0);
        c.t_end = 2.0;
        c.dt = 0.05;
        c.eps = 3.0;
        c.field_stride = 1;
        c.snapshot_stride = 10;
        const Trajectory tr = simulate(c);
        std::vector<double> most(paper_gn_pairs().size(), 0.0);
        for (const auto& f : tr.fields) {
            const auto r = gn_check(velocity_of(f.field), paper_gn_pairs());
            for (std::size_t k = 0; k < r.size(); ++k) most[k] = std::max(most[k], *r[k].ratio);
        }
        return most;
    };
    const auto coarse = run(64), fine = run(128);
    for (std::size_t k = 0; k < coarse.size(); ++k) {
        CHECK(std::isfinite(coarse[k]));
        CHECK(coarse[k] == doctest::Approx(fine[k]).epsilon(1e-2));
    }
}
