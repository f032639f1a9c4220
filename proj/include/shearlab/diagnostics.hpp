#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "shearlab/solver.hpp"
#include "shearlab/spectral.hpp"

namespace shearlab {

struct DecayFit {
    /// Decay exponent: ||w|| ~ amplitude * (1 + s t)^(-alpha).
    double alpha = 0.0;
    double amplitude = 0.0;
    double t_lo = 0.0;
    double t_hi = 0.0;
    /// RMS of the log-space residual.
    double residual = 0.0;
    int samples = 0;
    /// s in log(1 + s t); 1 for physical time, nu for rescaled time.
    double time_scale = 1.0;
};

/// Least squares of log values against log(1 + time_scale * t) over t in [t_lo, t_hi].
/// Needs >= 10 samples in the window and positive values.
DecayFit decay_fit(const std::vector<double>& times, const std::vector<double>& values, double t_lo, double t_hi,
                   double time_scale = 1.0);
DecayFit decay_fit(const Trajectory& traj, double t_lo, double t_hi, double time_scale = 1.0);

struct BootstrapReport {
    double delta = 0.0;
    double eps = 0.0;
    /// sup_t (1 + t) ||w(t)||_2 over the recorded samples.
    double sup_envelope = 0.0;
    bool hypothesis_ok = true;
    /// sup / (delta eps / 2); the conclusion holds iff this is <= 1.
    double conclusion_margin = 0.0;
    bool conclusion_ok = true;
    std::optional<double> first_violation;
};

/// Physical time t.  Throws InvalidArgument unless eps > 0 and delta > 0.
BootstrapReport bootstrap_audit(const std::vector<double>& times, const std::vector<double>& l2, double eps,
                                double delta);
/// Also folds in the per-step sup the simulation tracked between rows.
BootstrapReport bootstrap_audit(const Trajectory& traj, double eps, double delta);

struct GnPair {
    double q = 2.0;
    double a = 1.0;
};

struct GnRatio {
    double q = 2.0;
    double a = 1.0;
    std::optional<double> ratio;  // empty when the denominator vanishes
};

/// a = 1/2 + 1/q with q >= 2 is what 2-D scaling allows for ||u||_q <~ ||u||_2^a ||D^2 u||_2^(1-a).
bool gn_admissible(const GnPair& pair);

/// (10, 3/5), (5/2, 9/10), (4, 3/4).
std::vector<GnPair> paper_gn_pairs();

/// ||u||_q / (||u||_2^a ||D^2 u||_2^(1-a)) with |u| the Euclidean magnitude.
/// Rejects inadmissible pairs.
std::vector<GnRatio> gn_check(const SpectralVelocity& u, const std::vector<GnPair>& pairs);

/// ||D^2 u||_2 by Parseval (sum |K|^4 |u_hat|^2).
double hessian_l2(const SpectralVelocity& u);

}  // namespace shearlab
