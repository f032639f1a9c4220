#pragma once

// Lp norms of Green's-function slices, the exact Gaussian closed form, the
// lemma envelopes and a discrete Young/Schur operator-bound checker.

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "shearlab/kernel.hpp"

namespace shearlab {

/// source: fixed (x, y), integrate over (x', y').  target: fixed (x', y'), integrate over (x, y).
enum class Slice { source, target };
enum class Derivative { none, x, x_prime, y, y_prime };
enum class Lemma { kernel, x_derivative, y_derivative };  // 3.1, 3.2, 3.3

std::string_view to_string(Slice s);
std::string_view to_string(Derivative d);
std::string_view to_string(Lemma l);
Slice slice_from_string(std::string_view s);
Derivative derivative_from_string(std::string_view s);
Lemma lemma_from_string(std::string_view s);

struct NormQuery {
    KernelParams params;
    double p = 1.0;
    Slice slice = Slice::source;
    Derivative derivative = Derivative::none;
    /// The fixed point: (x, y) for source slices, (x', y') for target slices.
    /// The norms do not depend on it; it only places the quadrature window.
    double fixed_x = 0.0;
    double fixed_y = 0.0;
};

/// Adaptive quadrature of |kernel|^p over the slice plane, then the p-th root.
/// Throws QuadratureError on non-convergence, InvalidArgument for p outside [1, inf).
double kernel_lp_quadrature(const NormQuery& q);

/// p^(-1/p) (4 pi tau)^(-(1-1/p)) (1+kappa)^(-(1-1/p)/2).
double kernel_lp_closed_form(const KernelParams& params, double p);

/// Lemma envelope without constant.  tau_shift is added to the tau exponent
/// (used only to build deliberately wrong envelopes).
double lemma_envelope(Lemma lemma, const KernelParams& params, double p, double tau_shift = 0.0);

/// Large-tau/nu asymptotic log-log slope of the envelope in tau at fixed nu.
double envelope_asymptotic_slope(Lemma lemma, double p, bool large_tau);

std::vector<Derivative> lemma_derivatives(Lemma lemma);

struct NormRow {
    Lemma lemma = Lemma::kernel;
    double p = 1.0;
    double nu = 0.0;
    double tau = 0.0;
    Slice slice = Slice::source;
    Derivative derivative = Derivative::none;
    double measured = 0.0;
    double envelope = 0.0;
    double ratio = 0.0;
    bool calibration = false;
    bool flagged = false;
};

struct SlopeFit {
    Lemma lemma = Lemma::kernel;
    double p = 1.0;
    double nu = 0.0;
    Slice slice = Slice::source;
    Derivative derivative = Derivative::none;
    bool large_tau = true;
    int points = 0;
    double measured_slope = 0.0;
    double envelope_slope = 0.0;
};

struct LemmaConstant {
    Lemma lemma = Lemma::kernel;
    double p = 1.0;
    double constant = 0.0;  // max calibration ratio times 1.01
};

struct NormReport {
    std::vector<NormRow> rows;
    std::vector<SlopeFit> fits;
    std::vector<LemmaConstant> constants;
    std::vector<std::string> failures;
    bool ok() const noexcept { return failures.empty(); }
};

struct VerifyOptions {
    std::vector<Slice> slices{Slice::source, Slice::target};
    /// Empty means the derivatives that belong to the lemma.
    std::vector<Derivative> derivatives{};
    double tau_shift = 0.0;
    /// tau/nu at or above this is the large regime, at or below small_regime the small one.
    double large_regime = 100.0;
    double small_regime = 0.1;
    /// Fitted slope farther than this from the envelope slope is a failure.
    double slope_tolerance = 0.05;
    int jobs = 1;
};

/// grid holds (nu, tau) pairs.  Calibration uses every other tau per nu (endpoints included).
NormReport verify_lemma_bounds(Lemma lemma, const std::vector<std::pair<double, double>>& grid,
                               const std::vector<double>& p_list, const VerifyOptions& options = {});

/// Default (nu, tau) grid: nu in {1e-2, 1}, tau/nu = 10^(k/2) for k = -4..8.
std::vector<std::pair<double, double>> default_norm_grid();

/// Least-squares slope of y against x.
double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y);

// Young / Schur test on a weighted discrete measure.

struct YoungResult {
    double lhs = 0.0;
    double bound_fine = 0.0;
    double bound_coarse = 0.0;
    double a = 0.0;  // sup over columns z' of ||K(., z')||_q
    double b = 0.0;  // sup over rows z of ||K(z, .)||_q
};

/// kernel is row-major n x n with K(z_i, z'_j) at [i * n + j]; weight is the cell measure.
/// Rejects exponents outside [1, inf) and triples violating 1 + 1/r = 1/q + 1/p.
YoungResult young_check(const std::vector<double>& kernel, const std::vector<double>& f, double weight, double p,
                        double q, double r);

}  // namespace shearlab
