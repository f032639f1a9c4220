#pragma once

// Bootstrap-constant calibration and the transition-threshold scan over (nu, eps).

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "shearlab/solver.hpp"

namespace shearlab {

/// delta = 2 sup_t (1 + t) ||w_lin(t)||_2 / eps for the linear evolution of cfg's data.
double calibrate_delta(SimConfig cfg);

struct ScanCell {
    double nu = 0.0;
    double c = 0.0;
    double eps = 0.0;
    /// "stable", "unstable" or "excluded" (unresolved or failed before a violation).
    std::string outcome;
    double envelope_sup = 0.0;
    std::optional<double> violation_time;
    std::optional<double> unresolved_time;
    double max_tail_ratio = 0.0;
    std::string stop_reason;
};

struct ScanNuResult {
    double nu = 0.0;
    /// Largest stable amplitude found (0 when none).
    double stable = 0.0;
    /// Smallest amplitude that violated the envelope or could not be resolved; empty if none.
    std::optional<double> unstable;
    /// true when `unstable` is an unresolved run rather than a violation.
    bool resolution_limited = false;
    bool censored_high = false;
    bool censored_low = false;
    std::optional<double> eps_star;
    std::vector<ScanCell> cells;  // in evaluation order
};

struct ThresholdScanResult {
    double delta = 0.0;
    double horizon = 0.0;
    std::vector<ScanNuResult> per_nu;
    std::optional<double> gamma_fit;
    std::optional<double> gamma_lo;
    std::optional<double> gamma_hi;
    /// Any nu censored or resolution-limited.
    bool gamma_censored = false;
};

struct ScanOptions {
    /// One fully specified template per nu (grid, dt, data); eps and t_end are set by the scan.
    std::vector<SimConfig> configs;
    /// Ascending multipliers c in eps = c nu^(3/4).
    std::vector<double> c_list;
    double delta = 0.0;
    double horizon = 50.0;
    /// Stop refining once unstable / stable <= this.
    double bisect_ratio = 1.1;
    int bootstrap_samples = 2000;
    std::uint64_t seed = 0;
    int jobs = 1;
    /// Completed cells are cached here and reused on rerun (empty: no cache).
    std::filesystem::path cache_dir;
};

ScanCell run_scan_cell(const SimConfig& base, double c, double delta, double horizon);

ThresholdScanResult threshold_scan(const ScanOptions& options);

/// OLS slope of log eps_star against log nu, and a seeded percentile bootstrap interval.
struct GammaFit {
    std::optional<double> slope;
    std::optional<double> lo;
    std::optional<double> hi;
};
GammaFit fit_gamma(const std::vector<double>& nu, const std::vector<double>& eps_star, int samples,
                   std::uint64_t seed);

/// c0 = 0.5 min over nu of eps_star / nu^(3/4); empty if no nu has an eps_star.
std::optional<double> calibrate_c0(const ThresholdScanResult& scan);

}  // namespace shearlab
