// Acceptance run: one PASS/FAIL line per criterion, details underneath.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "shearlab/cli.hpp"
#include "shearlab/csv.hpp"
#include "shearlab/diagnostics.hpp"
#include "shearlab/kernel.hpp"
#include "shearlab/norms.hpp"
#include "shearlab/quadrature.hpp"
#include "shearlab/scan.hpp"
#include "shearlab/solver.hpp"

using namespace shearlab;
namespace fs = std::filesystem;

namespace {

struct Verdict {
    bool pass = true;
    std::vector<std::string> notes;

    void require(bool ok, const std::string& what) {
        if (!ok) pass = false;
        notes.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
    }
    void note(const std::string& what) { notes.push_back("     " + what); }
};

template <typename... T>
std::string str(const T&... parts) {
    std::ostringstream os;
    os << std::setprecision(6);
    (os << ... << parts);
    return os.str();
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

// Runs a subcommand with its console output swallowed.
int quiet_execute(const RunConfig& cfg, const fs::path& out) {
    std::ostringstream sink;
    auto* o = std::cout.rdbuf(sink.rdbuf());
    auto* e = std::cerr.rdbuf(sink.rdbuf());
    int code = cli::kRunFailed;
    try {
        code = cli::execute(cfg, out);
    } catch (...) {
        std::cout.rdbuf(o);
        std::cerr.rdbuf(e);
        throw;
    }
    std::cout.rdbuf(o);
    std::cerr.rdbuf(e);
    return code;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const std::vector<double> kP{1.0, 10.0 / 9.0, 4.0 / 3.0, 5.0 / 3.0, 2.0};

// ---------------------------------------------------------------- 1: mass

Verdict kernel_mass() {
    Verdict v;
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0;
    for (double nu : {1e-2, 1e-1, 1.0, 10.0, 100.0}) {
        for (double ratio : {1e-2, 1e-1, 1.0, 10.0, 100.0}) {
            const KernelParams kp(nu, nu * ratio);
            const double yp = 0.3;
            // (z, y) with x = z + drift (y + y') has unit Jacobian.
            const auto zs = quad::split_window(0.0, 12.0 * std::sqrt(kp.x_spread() / 2.0), 8);
            const auto ys = quad::split_window(yp, 12.0 * std::sqrt(kp.y_spread() / 2.0), 8);
            const auto boxes = quad::tensor_boxes(zs, ys);
            const auto r = quad::integrate_2d(
                [&](double z, double y) { return eval_green(kp, {z + kp.drift() * (y + yp), y, yp}); }, boxes,
                {1e-14, 1e-12, 200000});
            worst = std::max(worst, std::abs(r.value - 1.0));
        }
    }
    const double secs = seconds_since(t0);
    v.require(worst <= 1e-8, str("max |mass - 1| = ", worst, " over 5 x 5 (nu, tau/nu) points"));
    v.require(secs < 60.0, str("runtime ", secs, " s"));
    return v;
}

// ---------------------------------------------------- 2: closed-form norms

Verdict closed_form_norms() {
    Verdict v;
    const NormReport r = verify_lemma_bounds(Lemma::kernel, default_norm_grid(), kP);
    double worst = 0.0;
    std::map<double, std::pair<double, double>> spread;
    for (const auto& row : r.rows) {
        const double cf = kernel_lp_closed_form(KernelParams(row.nu, row.tau), row.p);
        worst = std::max(worst, std::abs(row.measured / cf - 1.0));
        auto [it, fresh] = spread.try_emplace(row.p, row.ratio, row.ratio);
        if (!fresh) {
            it->second.first = std::min(it->second.first, row.ratio);
            it->second.second = std::max(it->second.second, row.ratio);
        }
    }
    v.require(worst <= 1e-6, str("max relative quadrature error ", worst, " over ", r.rows.size(), " rows"));
    for (const auto& [p, mm] : spread) {
        const double s = (mm.second - mm.first) / mm.first;
        v.require(s <= 1e-6, str("p = ", p, ": normalized ratio ", mm.first, ", spread ", s));
    }
    return v;
}

// ------------------------------------------------- 3: derivative envelopes

Verdict derivative_slopes() {
    Verdict v;
    const auto grid = default_norm_grid();
    const NormReport rx = verify_lemma_bounds(Lemma::x_derivative, grid, kP);
    const NormReport ry = verify_lemma_bounds(Lemma::y_derivative, grid, kP);
    double worst = 0.0;
    int fits = 0;
    for (const auto* rep : {&rx, &ry}) {
        for (const auto& f : rep->fits) {
            if (!f.large_tau) continue;
            worst = std::max(worst, std::abs(f.measured_slope - f.envelope_slope));
            ++fits;
        }
    }
    v.require(fits > 0 && worst <= 0.05, str("max |fitted - envelope| slope over ", fits, " large-tau fits: ", worst));

    // Pair x with y and x' with y' at the same (p, nu, slice).
    auto key = [](const SlopeFit& f) {
        const bool primed = f.derivative == Derivative::x_prime || f.derivative == Derivative::y_prime;
        return std::make_tuple(f.p, f.nu, static_cast<int>(f.slice), primed);
    };
    std::map<std::tuple<double, double, int, bool>, double> sx;
    for (const auto& f : rx.fits) {
        if (f.large_tau) sx[key(f)] = f.measured_slope;
    }
    double lo = 1e300, hi = -1e300;
    int pairs = 0;
    for (const auto& f : ry.fits) {
        if (!f.large_tau) continue;
        const auto it = sx.find(key(f));
        if (it == sx.end()) continue;
        const double gap = f.measured_slope - it->second;
        lo = std::min(lo, gap);
        hi = std::max(hi, gap);
        ++pairs;
    }
    v.require(pairs > 0 && lo >= 0.9 && hi <= 1.1, str("x/y slope gap in [", lo, ", ", hi, "] over ", pairs, " pairs"));
    return v;
}

// -------------------------------------------------- 4: oracle equivalence

Verdict oracle_equivalence() {
    Verdict v;
    const auto t0 = std::chrono::steady_clock::now();
    const GridSpec g = GridSpec::square(128, 12.0);
    const ScalarField w0 = sample_profile(g, DataShape::gaussian, 1.0, 0);
    const SpectralField w0_hat = transform_forward(w0);
    for (double nu : {1e-1, 1e-2, 1e-3}) {
        for (double t : {0.1, 1.0, 10.0}) {
            const ScalarField a = duhamel_linear_apply(w0, t, nu);
            const ScalarField b = transform_backward(linear_exact_fourier(w0_hat, t, nu));
            const double e = relative_l2_error(a, b);
            v.require(e <= 1e-5, str("nu = ", nu, ", t = ", t, ": relative L2 ", e));
        }
    }
    const double secs = seconds_since(t0);
    v.require(secs < 300.0, str("runtime ", secs, " s"));
    v.note("both sides are x-periodic with the box period, so sheared images agree term by term");
    return v;
}

// ------------------------------------------------ 5: enhanced dissipation

Verdict enhanced_dissipation(const fs::path& out) {
    Verdict v;
    const fs::path dir = out / "linear-demo";
    RunConfig cfg = default_run_config(Subcommand::linear_demo);
    const int code = quiet_execute(cfg, dir);
    v.require(code == cli::kOk, str("linear-demo exit code ", code));
    if (code != cli::kOk) return v;

    const double young = std::pow(12.0, 0.25) / std::sqrt(8.0 * M_PI);
    const csv::Table fits = csv::read_table(dir / "decay_fits.csv");
    for (const auto& row : fits.rows()) {
        const double alpha = std::stod(row[3]);
        const double target = row[1] == "couette" ? 1.0 : 0.5;
        v.require(std::abs(alpha - target) <= 0.1,
                  str(row[1], " nu = ", row[0], " window ", row[2], ": alpha = ", alpha, " (target ", target, ")"));
    }
    for (const auto& flow : {"couette", "heat"}) {
        const auto s = csv::read_table(dir / ("nu_" + csv::format(cfg.linear_demo.nu.front())) / flow / "summary.csv");
        v.note(str(flow, ": max tail ratio ", s.rows().at(0)[3], ", max boundary ratio ", s.rows().at(0)[4]));
    }

    // One constant C for ||w(t)||_2 <= C nu^(1/2) tau^(-1) ||w0||_1 over the demo and a nu sweep.
    double c_all = 0.0;
    const csv::Table bound = csv::read_table(dir / "bound.csv");
    for (const auto& row : bound.rows()) {
        c_all = std::max(c_all, std::stod(row[1]));
        v.note(str("point-like data, nu = ", row[0], ": C = ", row[1]));
    }
    // Unit-width Gaussians on the scan grids.
    for (SimConfig c : default_run_config(Subcommand::threshold_scan).threshold_scan.runs) {
        c.eps = 1.0;
        c.nonlinear = false;
        c.dealias = false;
        const SpectralField w0 = initial_vorticity(c);
        const double l1 = lp_norm_field(transform_backward(w0), 1.0);
        double cmax = 0.0;
        for (double t = 1.0; t <= 50.0; t += 1.0) {
            const SpectralField w = linear_exact_fourier(w0, t, c.nu);
            cmax = std::max(cmax, spectral_l2(w) * c.nu * t / (std::sqrt(c.nu) * l1));
        }
        c_all = std::max(c_all, cmax);
        v.note(str("unit Gaussian, nu = ", c.nu, ": C = ", cmax));
    }
    v.require(c_all <= young, str("single C = ", c_all, " <= kernel L2 constant 12^(1/4)/sqrt(8 pi) = ", young));
    return v;
}

// ------------------------------------------------------ 6: stability shadow

Verdict stability_shadow(const fs::path& out) {
    Verdict v;
    const RunConfig defaults = default_run_config(Subcommand::threshold_scan);
    const auto& tc = defaults.threshold_scan;

    SimConfig coarsest = tc.runs.front();
    for (const auto& r : tc.runs) {
        if (r.nu > coarsest.nu) coarsest = r;
    }
    coarsest.t_end = tc.horizon;
    const double delta = calibrate_delta(coarsest);
    v.note(str("delta = ", delta, " from the linear run at nu = ", coarsest.nu));

    ScanOptions o;
    o.configs = tc.runs;
    o.c_list = tc.c_list;
    o.delta = delta;
    o.horizon = tc.horizon;
    o.bisect_ratio = tc.bisect_ratio;
    o.bootstrap_samples = tc.bootstrap_samples;
    o.seed = defaults.seed;
    o.cache_dir = out / "scan_cells";
    const auto t0 = std::chrono::steady_clock::now();
    const ThresholdScanResult scan = threshold_scan(o);
    v.note(str("scan took ", seconds_since(t0), " s (cached cells are reused)"));
    const auto c0 = calibrate_c0(scan);
    v.require(c0.has_value(), "c0 calibrated from the scan");
    if (!c0) return v;
    v.note(str("c0 = ", *c0));
    if (scan.gamma_fit) {
        v.note(str("gamma fit ", *scan.gamma_fit, " [", scan.gamma_lo.value_or(NAN), ", ", scan.gamma_hi.value_or(NAN),
                   "]", scan.gamma_censored ? " (censored: brackets hit the grid edge or the resolution limit)" : ""));
    }
    for (const auto& n : scan.per_nu) {
        const double eps = *c0 * std::pow(n.nu, 0.75);
        std::string upper = n.unstable ? csv::format(*n.unstable) : "none";
        v.require(n.eps_star && eps <= n.stable,
                  str("nu = ", n.nu, ": c0 nu^(3/4) = ", eps, " inside stable bracket (0, ", n.stable, "], next ",
                      upper, n.resolution_limited ? " (unresolved)" : ""));
    }

    for (const auto& base : tc.runs) {
        SimConfig c = base;
        c.eps = *c0 * std::pow(c.nu, 0.75);
        c.t_end = tc.horizon;
        const auto t1 = std::chrono::steady_clock::now();
        const Trajectory tr = simulate(c);
        const double secs = seconds_since(t1);
        const BootstrapReport b = bootstrap_audit(tr, c.eps, delta);
        v.require(tr.resolved() && !tr.failure && b.sup_envelope <= delta * c.eps,
                  str("nu = ", c.nu, ", eps = ", c.eps, ": sup (1+t)||w|| / (delta eps) = ",
                      b.sup_envelope / (delta * c.eps), ", resolved ", tr.resolved() ? "yes" : "no", ", ", secs,
                      " s"));
        v.note(str("   conclusion margin sup / (delta eps / 2) = ", b.conclusion_margin));
        v.require(secs < 1800.0, "   run under 30 min");
    }

    // Negative control: 100x the calibrated amplitude at the coarsest viscosity.
    SimConfig neg = coarsest;
    neg.eps = 100.0 * *c0 * std::pow(neg.nu, 0.75);
    neg.t_end = tc.horizon;
    neg.stop_envelope = delta * neg.eps;
    const auto t1 = std::chrono::steady_clock::now();
    const Trajectory tr = simulate(neg);
    const BootstrapReport b = bootstrap_audit(tr, neg.eps, delta);
    const bool violated = !b.hypothesis_ok && b.first_violation;
    const bool resolved_violation = violated && (!tr.unresolved_time || *tr.unresolved_time > *b.first_violation);
    v.note(str("negative control nu = ", neg.nu, ", eps = ", neg.eps, ": stop ", tr.stop_reason,
               ", sup (1+t)||w|| / (delta eps) = ", b.sup_envelope / (delta * neg.eps), ", violation at ",
               violated ? csv::format(*b.first_violation) : "none", ", unresolved from ",
               tr.unresolved_time ? csv::format(*tr.unresolved_time) : "never", ", ", seconds_since(t1), " s"));
    v.require(resolved_violation, "negative control at 100 c0 violates the envelope while still resolved");
    return v;
}

// ------------------------------------------------------------ 7: invariants

Verdict invariants() {
    Verdict v;
    std::mt19937_64 rng(31);
    std::normal_distribution<double> n01;
    std::uniform_real_distribution<double> u01(0.0, 1.0);

    const GridSpec g(64, 32, 8.0, 6.0);
    double div = 0.0, parseval = 0.0, trip = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        ScalarField f(g);
        for (double& x : f.mutable_values()) x = n01(rng);
        SpectralField w = transform_forward(f);
        trip = std::max(trip, relative_l2_error(transform_backward(w), f));
        double e = 0.0;
        for (double x : f.values()) e += x * x;
        e *= g.dx() * g.dy();
        parseval = std::max(parseval, std::abs(std::pow(spectral_l2(w), 2) / e - 1.0));
        if (trial % 2) w.set_frame_time(0.25 * trial);
        const SpectralVelocity u = biot_savart_spectral(w);
        div = std::max(div, spectral_l2(divergence_spectral(u)) / spectral_l2(w));
    }
    v.require(div <= 1e-10, str("Biot-Savart divergence / ||w|| max ", div));
    v.require(trip <= 1e-12 && parseval <= 1e-12, str("round trip ", trip, ", Parseval ", parseval));

    const auto mask = dealias_mask(g);
    double neutral = 0.0;
    for (double t : {0.0, 0.75, 2.0}) {
        ScalarField f(g);
        for (int j = 0; j < g.ny(); ++j) {
            for (int i = 0; i < g.nx(); ++i) {
                const double x = g.x(i), y = g.y(j);
                f.at(i, j) = std::exp(-(x * x + y * y) / 2.0) * (1.0 + 0.3 * n01(rng));
            }
        }
        SpectralField w = apply_mask(transform_forward(f), mask);
        w.set_frame_time(t);
        const SpectralField nl = nonlinear_rhs(w, t, 1e-2);
        double dot = 0.0;
        for (std::size_t k = 0; k < w.modes().size(); ++k) dot += std::real(std::conj(w.modes()[k]) * nl.modes()[k]);
        neutral = std::max(neutral, std::abs(dot) / (spectral_l2(w) * spectral_l2(nl)));
    }
    v.require(neutral <= 1e-8, str("enstrophy neutrality of the nonlinear term, relative ", neutral));

    SimConfig c;
    c.nu = 2e-2;
    c.grid = GridSpec(128, 128, 12.0, 8.0);
    c.t_end = 2.0;
    c.dt = 0.02;
    c.eps = 5.0;
    const Trajectory tr = simulate(c);
    double flux = 0.0;
    for (std::size_t k = 0; k + 1 < tr.times.size(); ++k) {
        const double d = 0.5 * (tr.dissipation[k] + tr.dissipation[k + 1]);
        flux = std::max(flux, std::abs(tr.enstrophy_flux[k] + d) / d);
    }
    v.require(tr.resolved() && flux <= 0.01, str("per-step enstrophy balance, relative ", flux));

    SimConfig r = c;
    r.grid = GridSpec::square(64, 10.0);
    r.eps = 20.0;
    r.shape = DataShape::random_localized;
    r.seed = 4;
    const SpectralField w0 = initial_vorticity(r);
    const double dt = 0.2;
    SpectralField ref = w0;
    for (int k = 0; k < 64; ++k) ref = step(ref, k * dt / 64, dt / 64, r);
    const SpectralField one = step(w0, 0.0, dt, r);
    const SpectralField two = step(step(w0, 0.0, dt / 2, r), dt / 2, dt / 2, r);
    auto dist = [](const SpectralField& a, const SpectralField& b) {
        double s = 0.0;
        for (std::size_t k = 0; k < a.modes().size(); ++k) s += std::norm(a.modes()[k] - b.modes()[k]);
        return std::sqrt(s);
    };
    // Halving the step cuts the two-step error by 2^order.
    const double order = std::log2(dist(one, ref) / dist(two, ref));
    v.require(std::abs(order - 4.0) <= 0.4, str("Richardson order ", order));

    int checked = 0, violated = 0;
    while (checked < 10000) {
        const std::size_t n = 1 + static_cast<std::size_t>(u01(rng) * 12);
        const double ip = 0.05 + 0.95 * u01(rng), iq = 0.05 + 0.95 * u01(rng);
        if (ip + iq - 1.0 < 0.05) continue;
        std::vector<double> k(n * n), f(n);
        for (auto& x : k) x = u01(rng) < 0.3 ? 0.0 : u01(rng);
        for (auto& x : f) x = 2.0 * u01(rng) - 1.0;
        const auto y = young_check(k, f, 0.1 + u01(rng), 1.0 / ip, 1.0 / iq, 1.0 / (ip + iq - 1.0));
        if (!(y.lhs <= y.bound_fine * (1.0 + 1e-10))) ++violated;
        ++checked;
    }
    v.require(violated == 0, str("Young bound on ", checked, " random instances, ", violated, " violations"));
    return v;
}

// ----------------------------------------------------------- 8: determinism

Verdict determinism(const fs::path& out) {
    Verdict v;
    auto run_pair = [&](const std::string& name, RunConfig cfg) {
        const fs::path a = out / "determinism" / (name + "_a"), b = out / "determinism" / (name + "_b");
        fs::remove_all(a);
        fs::remove_all(b);
        const int ca = quiet_execute(cfg, a);
        cfg.jobs = 2;
        const int cb = quiet_execute(cfg, b);
        int files = 0, same = 0;
        for (const auto& e : fs::recursive_directory_iterator(a)) {
            if (!e.is_regular_file()) continue;
            const fs::path rel = fs::relative(e.path(), a);
            if (rel == "config.json") continue;  // records the job count
            ++files;
            if (slurp(e.path()) == slurp(b / rel)) ++same;
        }
        v.require(ca == cli::kOk && cb == cli::kOk && files > 0 && same == files,
                  str(name, ": ", same, "/", files, " files byte-identical across reruns (1 vs 2 jobs)"));
    };

    RunConfig sim = default_run_config(Subcommand::simulate);
    sim.seed = 12345;
    auto& s = sim.simulate.run;
    s.grid = GridSpec::square(64, 10.0);
    s.nu = 2e-2;
    s.t_end = 3.0;
    s.eps = 4.0;
    s.shape = DataShape::random_localized;
    s.field_stride = 10;
    sim.simulate.write_snapshots = true;
    sim.simulate.delta = 3.0;
    propagate_seed(sim);
    run_pair("simulate", sim);

    RunConfig scan = default_run_config(Subcommand::threshold_scan);
    scan.seed = 99;
    SimConfig t;
    t.nu = 1e-2;
    t.grid = GridSpec::square(64, 16.0);
    t.width = 2.0;
    scan.threshold_scan.runs = {t};
    t.nu = 5e-3;
    scan.threshold_scan.runs.push_back(t);
    scan.threshold_scan.c_list = {0.5, 1.0, 4.0, 8.0};
    scan.threshold_scan.horizon = 4.0;
    scan.threshold_scan.bootstrap_samples = 300;
    propagate_seed(scan);
    run_pair("threshold-scan", scan);

    RunConfig ev = default_run_config(Subcommand::kernel_eval);
    run_pair("kernel-eval", ev);
    return v;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance criteria"};
    std::string out = "acceptance_out";
    app.add_option("--out", out, "Scratch and artifact directory");
    CLI11_PARSE(app, argc, argv);
    fs::create_directories(out);

    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
        {"kernel mass", kernel_mass},
        {"closed-form Lp norms", closed_form_norms},
        {"derivative envelope slopes", derivative_slopes},
        {"Duhamel vs Fourier propagator", oracle_equivalence},
        {"enhanced dissipation", [&] { return enhanced_dissipation(out); }},
        {"nonlinear stability shadow", [&] { return stability_shadow(out); }},
        {"structural invariants", invariants},
        {"determinism", [&] { return determinism(out); }},
    };

    std::ostringstream report;
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = criteria[i].second();
        } catch (const std::exception& e) {
            v.require(false, std::string("exception: ") + e.what());
        }
        const std::string line = str("criterion ", i + 1, " (", criteria[i].first, "): ", v.pass ? "PASS" : "FAIL",
                                     "  [", std::fixed, std::setprecision(1), seconds_since(t0), " s]");
        std::cout << line << "\n";
        report << line << "\n";
        for (const auto& n : v.notes) {
            std::cout << "    " << n << "\n";
            report << "    " << n << "\n";
        }
        std::cout.flush();
        if (!v.pass) ++failed;
    }
    std::ofstream(fs::path(out) / "acceptance_report.txt") << report.str();
    std::cout << (failed ? "acceptance: " + std::to_string(failed) + " criterion(s) failed" : "acceptance: all passed")
              << "\n";
    return failed ? 1 : 0;
}
