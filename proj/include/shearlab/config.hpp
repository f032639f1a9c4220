#pragma once

// Run configuration: one JSON file per run.  Top-level keys are "seed", "jobs"
// and the section named after the subcommand (kernel_eval, kernel_norms,
// verify, linear_demo, simulate, threshold_scan).  Unknown keys are errors.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "shearlab/norms.hpp"
#include "shearlab/solver.hpp"

namespace shearlab {

enum class Subcommand { kernel_eval, kernel_norms, verify, linear_demo, simulate, threshold_scan };

/// Command-line spelling, e.g. "kernel-eval".
std::string_view to_string(Subcommand s);
/// Config section key, e.g. "kernel_eval".
std::string_view section_key(Subcommand s);
Subcommand subcommand_from_string(std::string_view s);

struct KernelEvalConfig {
    std::vector<double> nu{1e-2};
    std::vector<double> tau{1e-2, 1.0};
    std::vector<double> x{0.0};
    std::vector<double> y{0.0};
    std::vector<double> y_prime{0.0};
};

struct KernelNormsConfig {
    std::vector<double> nu{1e-2, 1.0};
    std::vector<double> tau_over_nu{1e-2, 1e-1, 1.0, 1e1, 1e2};
    std::vector<double> p{1.0, 10.0 / 9.0, 4.0 / 3.0, 5.0 / 3.0, 2.0};
    std::vector<Slice> slices{Slice::source, Slice::target};
    std::vector<Derivative> derivatives{Derivative::none};
};

struct VerifyConfig {
    std::vector<Lemma> lemmas{Lemma::kernel, Lemma::x_derivative, Lemma::y_derivative};
    std::vector<double> p{1.0, 10.0 / 9.0, 4.0 / 3.0, 5.0 / 3.0, 2.0};
    std::vector<double> nu{1e-2, 1.0};
    /// Default 10^(k/2), k = -4..8.
    std::vector<double> tau_over_nu;
    std::vector<Slice> slices{Slice::source, Slice::target};
    double tau_shift = 0.0;
    double large_regime = 100.0;
    double small_regime = 0.1;
    double slope_tolerance = 0.05;
    double closed_form_tolerance = 1e-6;
    double slice_tolerance = 1e-6;
    VerifyConfig();
};

struct LinearDemoConfig {
    /// Template run; nonlinear is forced off, shear is toggled for the two flows.
    SimConfig run;
    std::vector<double> nu{1e-2};
    double fit_lo = 5.0;
    double fit_hi = 50.0;
    /// Data width is sqrt(width_factor * nu) when > 0, else run.width.
    double width_factor = 2.0;
    LinearDemoConfig();
};

struct SimulateConfig {
    SimConfig run;
    /// Decay fit window in physical time (skipped when fit_hi <= fit_lo).
    double fit_lo = 5.0;
    double fit_hi = 50.0;
    /// Bootstrap audit constant (0: no audit).
    double delta = 0.0;
    /// Write the kept lab-frame fields as binary snapshots.
    bool write_snapshots = false;
};

struct ThresholdScanConfig {
    /// One template per nu; eps, t_end and the stopping rules are set by the scan.
    std::vector<SimConfig> runs;
    std::vector<double> c_list{1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0};
    /// 0: calibrate from the linear evolution of the first run's data.
    double delta = 0.0;
    double horizon = 50.0;
    double bisect_ratio = 1.1;
    int bootstrap_samples = 2000;
    /// Keep completed cells under <out>/cells and reuse them.
    bool cache = true;
    ThresholdScanConfig();
};

struct RunConfig {
    Subcommand subcommand = Subcommand::kernel_eval;
    std::uint64_t seed = 0;
    int jobs = 1;
    KernelEvalConfig kernel_eval;
    KernelNormsConfig kernel_norms;
    VerifyConfig verify;
    LinearDemoConfig linear_demo;
    SimulateConfig simulate;
    ThresholdScanConfig threshold_scan;
};

/// Defaults for the subcommand.
RunConfig default_run_config(Subcommand s);

/// Parses JSON text over the defaults.  Throws ConfigError on syntax errors,
/// unknown keys, wrong types and invalid values.
RunConfig parse_run_config(Subcommand s, std::string_view text);

/// Fully resolved config (defaults included) as pretty JSON.
std::string dump_run_config(const RunConfig& cfg);

/// Copies cfg.seed into every simulation template.
void propagate_seed(RunConfig& cfg);

}  // namespace shearlab
