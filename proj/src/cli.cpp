#include "shearlab/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <tuple>

#include <CLI11.hpp>

#include "shearlab/csv.hpp"
#include "shearlab/diagnostics.hpp"
#include "shearlab/error.hpp"
#include "shearlab/kernel.hpp"
#include "shearlab/norms.hpp"
#include "shearlab/parallel.hpp"
#include "shearlab/scan.hpp"
#include "shearlab/snapshot.hpp"
#include "shearlab/solver.hpp"

namespace shearlab::cli {

namespace fs = std::filesystem;
using csv::format;

namespace {

std::string fmt_opt(const std::optional<double>& v) { return v ? format(*v) : std::string(); }
std::string fmt_bool(bool b) { return b ? "1" : "0"; }
std::string fmt_int(long long v) { return format(v); }

const char* kColumnsHelp = R"(Output tables (CSV, shortest round-trip decimals):
  kernel-eval     kernel_eval.csv: nu,tau,x,y,y_prime,G,dG_dx,dG_dx_prime,dG_dy,dG_dy_prime
  kernel-norms    kernel_norms.csv: nu,tau,p,slice,derivative,quadrature,closed_form,relative_error
  verify          norm_report.csv: lemma,p,nu,tau,slice,derivative,measured,envelope,ratio
                  slope_fits.csv: lemma,p,nu,slice,derivative,regime,points,measured_slope,envelope_slope
                  constants.csv: lemma,p,constant      failures.txt: one line per failed check
  linear-demo     decay_fits.csv: nu,flow,window,alpha,residual
                  bound.csv: nu,constant,young_bound
                  nu_<nu>/<flow>/trajectory.csv and audit.csv as for simulate
  simulate        trajectory.csv: t,l2,linf,u_l2,enstrophy_flux
                  audit.csv: t,dissipation,tail_ratio,boundary_ratio,substeps
                  summary.csv: eps,envelope_sup,envelope_sup_time,max_tail_ratio,max_boundary_ratio,resolved,stop_reason
                  decay_fits.csv: nu,window,alpha,residual
                  bootstrap_report.csv: nu,eps,delta,sup_envelope,hypothesis_ok,conclusion_margin,conclusion_ok,first_violation
  threshold-scan  threshold.csv: nu,stable,unstable,eps_star
                  threshold_flags.csv: nu,censored_high,censored_low,resolution_limited
                  cells.csv: nu,c,eps,outcome,envelope_sup,violation_time,unresolved_time,max_tail_ratio,stop_reason
                  cells.dat: the same rows, whitespace separated, for gnuplot
                  bootstrap_reports.csv: nu,c,eps,delta,sup_envelope,hypothesis_ok,conclusion_margin,conclusion_ok
                  gamma.csv: delta,gamma_fit,gamma_lo,gamma_hi,censored,c0
Every run writes its resolved config to config.json.  A run that fails leaves FAILED.
Output root: --out, else $SHEARLAB_OUT_ROOT/<subcommand>, else ./shearlab_out/<subcommand>.
Exit codes: 0 ok, 1 a check failed, 2 bad usage or config, 3 the run failed.)";

// ---------------------------------------------------------------- kernel-eval

int cmd_kernel_eval(const RunConfig& r, const fs::path& out) {
    const auto& c = r.kernel_eval;
    csv::Table t({"nu", "tau", "x", "y", "y_prime", "G", "dG_dx", "dG_dx_prime", "dG_dy", "dG_dy_prime"});
    for (double nu : c.nu) {
        for (double tau : c.tau) {
            const KernelParams kp(nu, tau);
            for (double x : c.x) {
                for (double y : c.y) {
                    for (double yp : c.y_prime) {
                        const KernelPoint pt{x, y, yp};
                        t.add_row({format(nu), format(tau), format(x), format(y), format(yp),
                                   format(eval_green(kp, pt)),
                                   format(eval_green_grad(kp, pt, KernelVariable::x)),
                                   format(eval_green_grad(kp, pt, KernelVariable::x_prime)),
                                   format(eval_green_grad(kp, pt, KernelVariable::y)),
                                   format(eval_green_grad(kp, pt, KernelVariable::y_prime))});
                    }
                }
            }
        }
    }
    csv::write_table(out / "kernel_eval.csv", t);
    std::cout << t.str();
    return kOk;
}

// --------------------------------------------------------------- kernel-norms

int cmd_kernel_norms(const RunConfig& r, const fs::path& out) {
    const auto& c = r.kernel_norms;
    struct Job {
        double nu, tau, p;
        Slice s;
        Derivative d;
        double measured = 0.0;
    };
    std::vector<Job> jobs;
    for (double nu : c.nu) {
        for (double ratio : c.tau_over_nu) {
            for (double p : c.p) {
                for (Slice s : c.slices) {
                    for (Derivative d : c.derivatives) jobs.push_back({nu, nu * ratio, p, s, d});
                }
            }
        }
    }
    parallel_for(jobs.size(), r.jobs, [&](std::size_t i) {
        auto& j = jobs[i];
        j.measured = kernel_lp_quadrature(NormQuery{KernelParams(j.nu, j.tau), j.p, j.s, j.d, 0.0, 0.5});
    });
    csv::Table t({"nu", "tau", "p", "slice", "derivative", "quadrature", "closed_form", "relative_error"});
    for (const auto& j : jobs) {
        std::string closed, err;
        if (j.d == Derivative::none) {
            const double cf = kernel_lp_closed_form(KernelParams(j.nu, j.tau), j.p);
            closed = format(cf);
            err = format(std::abs(j.measured / cf - 1.0));
        }
        t.add_row({format(j.nu), format(j.tau), format(j.p), std::string(to_string(j.s)), std::string(to_string(j.d)),
                   format(j.measured), closed, err});
    }
    csv::write_table(out / "kernel_norms.csv", t);
    return kOk;
}

// --------------------------------------------------------------------- verify

int cmd_verify(const RunConfig& r, const fs::path& out) {
    const auto& c = r.verify;
    std::vector<std::pair<double, double>> grid;
    for (double nu : c.nu) {
        for (double ratio : c.tau_over_nu) grid.emplace_back(nu, nu * ratio);
    }
    VerifyOptions opts;
    opts.slices = c.slices;
    opts.tau_shift = c.tau_shift;
    opts.large_regime = c.large_regime;
    opts.small_regime = c.small_regime;
    opts.slope_tolerance = c.slope_tolerance;
    opts.jobs = r.jobs;

    csv::Table rows({"lemma", "p", "nu", "tau", "slice", "derivative", "measured", "envelope", "ratio"});
    csv::Table fits({"lemma", "p", "nu", "slice", "derivative", "regime", "points", "measured_slope",
                     "envelope_slope"});
    csv::Table consts({"lemma", "p", "constant"});
    std::vector<std::string> failures;

    for (Lemma lemma : c.lemmas) {
        const NormReport rep = verify_lemma_bounds(lemma, grid, c.p, opts);
        failures.insert(failures.end(), rep.failures.begin(), rep.failures.end());
        for (const auto& row : rep.rows) {
            rows.add_row({std::string(to_string(row.lemma)), format(row.p), format(row.nu), format(row.tau),
                          std::string(to_string(row.slice)), std::string(to_string(row.derivative)),
                          format(row.measured), format(row.envelope), format(row.ratio)});
        }
        for (const auto& f : rep.fits) {
            fits.add_row({std::string(to_string(f.lemma)), format(f.p), format(f.nu), std::string(to_string(f.slice)),
                          std::string(to_string(f.derivative)), f.large_tau ? "large" : "small", fmt_int(f.points),
                          format(f.measured_slope), format(f.envelope_slope)});
        }
        for (const auto& k : rep.constants) {
            consts.add_row({std::string(to_string(k.lemma)), format(k.p), format(k.constant)});
        }

        // Exact Gaussian integrals: closed form and a constant normalized ratio.
        if (lemma == Lemma::kernel) {
            std::map<double, std::pair<double, double>> spread;
            for (const auto& row : rep.rows) {
                if (row.derivative != Derivative::none) continue;
                const double cf = kernel_lp_closed_form(KernelParams(row.nu, row.tau), row.p);
                const double err = std::abs(row.measured / cf - 1.0);
                if (!(err <= c.closed_form_tolerance)) {
                    std::ostringstream os;
                    os << "lemma 3.1 p=" << row.p << " nu=" << row.nu << " tau=" << row.tau << " slice="
                       << to_string(row.slice) << ": quadrature differs from closed form by " << err;
                    failures.push_back(os.str());
                }
                auto [it, fresh] = spread.try_emplace(row.p, row.ratio, row.ratio);
                if (!fresh) {
                    it->second.first = std::min(it->second.first, row.ratio);
                    it->second.second = std::max(it->second.second, row.ratio);
                }
            }
            for (const auto& [p, mm] : spread) {
                const double s = (mm.second - mm.first) / mm.first;
                if (!(s <= c.closed_form_tolerance)) {
                    std::ostringstream os;
                    os << "lemma 3.1 p=" << p << ": normalized ratio spread " << s;
                    failures.push_back(os.str());
                }
            }
        }

        // Source and target slices carry the same norm.
        std::map<std::tuple<double, double, double, int>, std::vector<double>> by_point;
        for (const auto& row : rep.rows) {
            by_point[{row.p, row.nu, row.tau, static_cast<int>(row.derivative)}].push_back(row.measured);
        }
        for (const auto& [key, vals] : by_point) {
            if (vals.size() < 2) continue;
            const auto [lo, hi] = std::minmax_element(vals.begin(), vals.end());
            const double d = (*hi - *lo) / *hi;
            if (!(d <= c.slice_tolerance)) {
                std::ostringstream os;
                os << "lemma " << to_string(lemma) << " p=" << std::get<0>(key) << " nu=" << std::get<1>(key)
                   << " tau=" << std::get<2>(key) << " derivative="
                   << to_string(static_cast<Derivative>(std::get<3>(key)))
                   << ": source and target slices differ by " << d;
                failures.push_back(os.str());
            }
        }
    }

    csv::write_table(out / "norm_report.csv", rows);
    csv::write_table(out / "slope_fits.csv", fits);
    csv::write_table(out / "constants.csv", consts);
    std::string text;
    for (const auto& f : failures) text += f + "\n";
    csv::write_atomic(out / "failures.txt", text);
    if (!failures.empty()) {
        std::cerr << failures.size() << " check(s) failed:\n" << text;
        return kCheckFailed;
    }
    std::cout << "verify: all checks passed (" << rows.rows().size() << " norm rows)\n";
    return kOk;
}

// ------------------------------------------------------------------ trajectory

void write_trajectory(const Trajectory& tr, const fs::path& dir) {
    fs::create_directories(dir);
    csv::Table t({"t", "l2", "linf", "u_l2", "enstrophy_flux"});
    csv::Table a({"t", "dissipation", "tail_ratio", "boundary_ratio", "substeps"});
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
        t.add_row({format(tr.times[i]), format(tr.l2_norms[i]), format(tr.linf_norms[i]), format(tr.velocity_l2[i]),
                   format(tr.enstrophy_flux[i])});
        a.add_row({format(tr.times[i]), format(tr.dissipation[i]), format(tr.tail_ratio[i]),
                   format(tr.boundary_ratio[i]), fmt_int(tr.substeps[i])});
    }
    csv::write_table(dir / "trajectory.csv", t);
    csv::write_table(dir / "audit.csv", a);
    csv::Table s({"eps", "envelope_sup", "envelope_sup_time", "max_tail_ratio", "max_boundary_ratio", "resolved",
                  "stop_reason"});
    s.add_row({format(tr.eps), format(tr.envelope_sup), format(tr.envelope_sup_time), format(tr.max_tail_ratio),
               format(tr.max_boundary_ratio), fmt_bool(tr.resolved()), tr.stop_reason});
    csv::write_table(dir / "summary.csv", s);
}

std::string window_label(const char* var, double lo, double hi) {
    return std::string(var) + ":" + format(lo) + ":" + format(hi);
}

// ----------------------------------------------------------------- linear-demo

int cmd_linear_demo(const RunConfig& r, const fs::path& out) {
    const auto& c = r.linear_demo;
    struct Job {
        double nu;
        bool shear;
        Trajectory tr;
        double l1 = 0.0;
    };
    std::vector<Job> jobs;
    for (double nu : c.nu) {
        jobs.push_back({nu, true, {}, 0.0});
        jobs.push_back({nu, false, {}, 0.0});
    }
    parallel_for(jobs.size(), r.jobs, [&](std::size_t i) {
        auto& j = jobs[i];
        SimConfig cfg = c.run;
        cfg.nu = j.nu;
        cfg.nonlinear = false;
        cfg.shear = j.shear;
        if (c.width_factor > 0.0) cfg.width = std::sqrt(c.width_factor * j.nu);
        j.l1 = lp_norm_field(transform_backward(initial_vorticity(cfg)), 1.0);
        j.tr = simulate(cfg);
    });

    csv::Table fits({"nu", "flow", "window", "alpha", "residual"});
    csv::Table bound({"nu", "constant", "young_bound"});
    const double young = std::pow(12.0, 0.25) / std::sqrt(8.0 * M_PI);
    bool failed = false;
    for (const auto& j : jobs) {
        const std::string flow = j.shear ? "couette" : "heat";
        write_trajectory(j.tr, out / ("nu_" + format(j.nu)) / flow);
        if (j.tr.failure) failed = true;
        const DecayFit ft = decay_fit(j.tr, c.fit_lo, c.fit_hi, 1.0);
        fits.add_row({format(j.nu), flow, window_label("t", c.fit_lo, c.fit_hi), format(ft.alpha),
                       format(ft.residual)});
        if (j.shear) {
            // ||w(tau)||_2 tau / (nu^(1/2) ||w0||_1) in rescaled time tau = nu t.
            double cmax = 0.0;
            for (std::size_t i = 0; i < j.tr.times.size(); ++i) {
                const double tau = j.nu * j.tr.times[i];
                cmax = std::max(cmax, j.tr.l2_norms[i] * tau / (std::sqrt(j.nu) * j.l1));
            }
            bound.add_row({format(j.nu), format(cmax), format(young)});
        }
    }
    csv::write_table(out / "decay_fits.csv", fits);
    csv::write_table(out / "bound.csv", bound);
    std::cout << fits.str();
    if (failed) throw Error("linear-demo: a linear run failed");
    return kOk;
}

// -------------------------------------------------------------------- simulate

int cmd_simulate(const RunConfig& r, const fs::path& out) {
    const auto& c = r.simulate;
    const Trajectory tr = simulate(c.run);
    write_trajectory(tr, out);

    csv::Table fits({"nu", "window", "alpha", "residual"});
    if (c.fit_hi > c.fit_lo) {
        try {
            const DecayFit f = decay_fit(tr, c.fit_lo, c.fit_hi, 1.0);
            fits.add_row({format(c.run.nu), window_label("t", c.fit_lo, c.fit_hi), format(f.alpha),
                          format(f.residual)});
        } catch (const InvalidArgument& e) {
            std::cerr << "simulate: decay fit skipped: " << e.what() << "\n";
        }
    }
    csv::write_table(out / "decay_fits.csv", fits);

    if (c.delta > 0.0 && c.run.eps > 0.0) {
        const BootstrapReport b = bootstrap_audit(tr, c.run.eps, c.delta);
        csv::Table t({"nu", "eps", "delta", "sup_envelope", "hypothesis_ok", "conclusion_margin", "conclusion_ok",
                      "first_violation"});
        t.add_row({format(c.run.nu), format(b.eps), format(b.delta), format(b.sup_envelope),
                   fmt_bool(b.hypothesis_ok), format(b.conclusion_margin), fmt_bool(b.conclusion_ok),
                   fmt_opt(b.first_violation)});
        csv::write_table(out / "bootstrap_report.csv", t);
    }
    if (c.write_snapshots) {
        fs::create_directories(out / "fields");
        for (std::size_t k = 0; k < tr.fields.size(); ++k) {
            std::ostringstream name;
            name << "field_" << std::setw(5) << std::setfill('0') << k << ".bin";
            write_snapshot(out / "fields" / name.str(), tr.fields[k].field, tr.fields[k].time, c.run.nu);
        }
    }
    if (tr.failure) {
        throw NumericalBlowup("simulate: " + *tr.failure, tr.failure_time.value_or(0.0));
    }
    std::cout << "simulate: " << tr.times.size() << " rows, stop " << tr.stop_reason << ", resolved "
              << (tr.resolved() ? "yes" : "no") << "\n";
    return kOk;
}

// -------------------------------------------------------------- threshold-scan

int cmd_threshold_scan(const RunConfig& r, const fs::path& out) {
    const auto& c = r.threshold_scan;
    double delta = c.delta;
    if (!(delta > 0.0)) {
        // Coarsest viscosity sets the constant.
        const auto coarsest = std::max_element(c.runs.begin(), c.runs.end(),
                                               [](const SimConfig& a, const SimConfig& b) { return a.nu < b.nu; });
        SimConfig lin = *coarsest;
        lin.t_end = c.horizon;
        delta = calibrate_delta(lin);
    }
    ScanOptions o;
    o.configs = c.runs;
    o.c_list = c.c_list;
    o.delta = delta;
    o.horizon = c.horizon;
    o.bisect_ratio = c.bisect_ratio;
    o.bootstrap_samples = c.bootstrap_samples;
    o.seed = r.seed;
    o.jobs = r.jobs;
    if (c.cache) o.cache_dir = out / "cells";
    const ThresholdScanResult res = threshold_scan(o);
    const std::optional<double> c0 = calibrate_c0(res);

    csv::Table th({"nu", "stable", "unstable", "eps_star"});
    csv::Table flags({"nu", "censored_high", "censored_low", "resolution_limited"});
    const std::vector<std::string> cell_cols{"nu", "c", "eps", "outcome", "envelope_sup", "violation_time",
                                             "unresolved_time", "max_tail_ratio", "stop_reason"};
    csv::Table cells(cell_cols);
    csv::Table boots({"nu", "c", "eps", "delta", "sup_envelope", "hypothesis_ok", "conclusion_margin",
                      "conclusion_ok"});
    std::string dat = "#";
    for (const auto& h : cell_cols) dat += " " + h;
    dat += "\n";
    for (const auto& n : res.per_nu) {
        th.add_row({format(n.nu), n.stable > 0.0 ? format(n.stable) : std::string(), fmt_opt(n.unstable),
                    fmt_opt(n.eps_star)});
        flags.add_row({format(n.nu), fmt_bool(n.censored_high), fmt_bool(n.censored_low),
                       fmt_bool(n.resolution_limited)});
        for (const auto& cell : n.cells) {
            std::vector<std::string> row{format(cell.nu),
                                         format(cell.c),
                                         format(cell.eps),
                                         cell.outcome,
                                         format(cell.envelope_sup),
                                         fmt_opt(cell.violation_time),
                                         fmt_opt(cell.unresolved_time),
                                         format(cell.max_tail_ratio),
                                         cell.stop_reason};
            for (std::size_t k = 0; k < row.size(); ++k) dat += (k ? " " : "") + (row[k].empty() ? "NaN" : row[k]);
            dat += "\n";
            cells.add_row(std::move(row));
            const double margin = cell.envelope_sup / (0.5 * delta * cell.eps);
            boots.add_row({format(cell.nu), format(cell.c), format(cell.eps), format(delta),
                           format(cell.envelope_sup), fmt_bool(cell.envelope_sup <= delta * cell.eps),
                           format(margin), fmt_bool(margin <= 1.0)});
        }
    }
    csv::Table gamma({"delta", "gamma_fit", "gamma_lo", "gamma_hi", "censored", "c0"});
    gamma.add_row({format(delta), fmt_opt(res.gamma_fit), fmt_opt(res.gamma_lo), fmt_opt(res.gamma_hi),
                   fmt_bool(res.gamma_censored), fmt_opt(c0)});
    csv::write_table(out / "threshold.csv", th);
    csv::write_table(out / "threshold_flags.csv", flags);
    csv::write_table(out / "cells.csv", cells);
    csv::write_atomic(out / "cells.dat", dat);
    csv::write_table(out / "bootstrap_reports.csv", boots);
    csv::write_table(out / "gamma.csv", gamma);
    std::cout << th.str() << gamma.str();
    return kOk;
}

void write_failure(const fs::path& out, const std::string& what) {
    try {
        fs::create_directories(out);
        csv::write_atomic(out / "FAILED", what + "\n");
    } catch (const std::exception&) {
        // nothing more can be done
    }
}

}  // namespace

fs::path resolve_out_dir(const std::optional<std::string>& out, Subcommand sub) {
    if (out && !out->empty()) return fs::path(*out);
    const std::string name(to_string(sub));
    if (const char* root = std::getenv(kOutRootEnv); root && *root) return fs::path(root) / name;
    return fs::path("shearlab_out") / name;
}

int execute(const RunConfig& cfg, const fs::path& out) {
    try {
        fs::create_directories(out);
        fs::remove(out / "FAILED");
        csv::write_atomic(out / "config.json", dump_run_config(cfg));
        int code = kOk;
        switch (cfg.subcommand) {
            case Subcommand::kernel_eval: code = cmd_kernel_eval(cfg, out); break;
            case Subcommand::kernel_norms: code = cmd_kernel_norms(cfg, out); break;
            case Subcommand::verify: code = cmd_verify(cfg, out); break;
            case Subcommand::linear_demo: code = cmd_linear_demo(cfg, out); break;
            case Subcommand::simulate: code = cmd_simulate(cfg, out); break;
            case Subcommand::threshold_scan: code = cmd_threshold_scan(cfg, out); break;
        }
        if (code != kOk) write_failure(out, std::string(to_string(cfg.subcommand)) + ": checks failed, see failures.txt");
        return code;
    } catch (const ConfigError& e) {
        write_failure(out, e.what());
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        write_failure(out, e.what());
        std::cerr << "error: " << e.what() << "\n";
        return kRunFailed;
    }
}

int run(const std::vector<std::string>& args) {
    CLI::App app{"shearlab: Green's-function estimates and shear-flow stability experiments"};
    app.footer(kColumnsHelp);
    app.require_subcommand(1, 1);

    std::optional<std::string> config_path, out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<int> jobs;
    std::map<CLI::App*, Subcommand> subs;
    const std::pair<Subcommand, const char*> menu[] = {
        {Subcommand::kernel_eval, "Evaluate G and its first derivatives on a grid"},
        {Subcommand::kernel_norms, "Quadrature Lp norms of kernel slices against the closed form"},
        {Subcommand::verify, "Check the lemma envelopes over a (nu, tau) grid; nonzero exit on any failure"},
        {Subcommand::linear_demo, "Linear Couette and pure-heat decay runs with power-law fits"},
        {Subcommand::simulate, "One nonlinear (or linear) run with audits"},
        {Subcommand::threshold_scan, "Bisect the stability threshold eps*(nu) and fit its exponent"},
    };
    for (const auto& [s, desc] : menu) {
        CLI::App* sub = app.add_subcommand(std::string(to_string(s)), desc);
        sub->add_option("--config", config_path, "JSON run config")->check(CLI::ExistingFile);
        sub->add_option("--out", out_dir, "Output directory");
        sub->add_option("--seed", seed, "64-bit seed (overrides the config)");
        sub->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
        subs[sub] = s;
    }
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kUsage;
    }
    const Subcommand sub = subs.at(app.get_subcommands().front());
    const fs::path out = resolve_out_dir(out_dir, sub);

    RunConfig cfg = default_run_config(sub);
    try {
        if (config_path) {
            std::ifstream is(*config_path);
            std::stringstream ss;
            ss << is.rdbuf();
            cfg = parse_run_config(sub, ss.str());
        }
    } catch (const ConfigError& e) {
        write_failure(out, e.what());
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    }
    if (seed) cfg.seed = *seed;
    if (jobs) cfg.jobs = *jobs;
    propagate_seed(cfg);
    return execute(cfg, out);
}

int run(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args);
}

}  // namespace shearlab::cli
