#pragma once

// Linear kernel propagator and the nonlinear pseudo-spectral stepper for
//
//     d_t w + y d_x w - nu Laplace w = -div(u w),   u = grad-perp Laplace^{-1} w,
//
// in physical time.  The stepper works in the shearing frame (coefficients
// indexed by moving-frame wavenumbers, lab wavenumber eta - k t), with the
// viscous symbol integrated exactly and RK4 on the nonlinearity.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "shearlab/spectral.hpp"

namespace shearlab {

enum class DataShape { gaussian, gaussian_dipole, random_localized };

std::string_view to_string(DataShape s);
DataShape data_shape_from_string(std::string_view s);

struct SimConfig {
    double nu = 1e-2;
    GridSpec grid = GridSpec::square(256, 16.0);
    double t_end = 50.0;
    double dt = 0.1;
    double eps = 1e-3;
    DataShape shape = DataShape::gaussian;
    double width = 1.0;
    std::uint64_t seed = 0;
    bool dealias = true;
    bool nonlinear = true;
    /// false replaces the Couette transport by nothing (pure heat control).
    bool shear = true;
    int snapshot_stride = 1;
    /// Every this many rows a lab-frame field is kept (0: none).
    int field_stride = 0;
    double cfl = 0.5;
    int max_substeps = 4096;
    double tail_tolerance = 1e-6;
    double boundary_tolerance = 1e-8;
    bool stop_when_unresolved = false;
    /// Stop once (1 + t) ||w||_2 exceeds this (0 disables).
    double stop_envelope = 0.0;

    /// Throws ConfigError describing the first violated constraint.
    void validate() const;
};

struct FieldDump {
    double time = 0.0;
    ScalarField field;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<double> l2_norms;
    std::vector<double> linf_norms;
    std::vector<double> velocity_l2;
    /// (||w_{n+1}||^2 - ||w_n||^2) / dt over the step that starts at the row time.
    std::vector<double> enstrophy_flux;
    /// 2 nu ||grad w||^2 at the row time.
    std::vector<double> dissipation;
    std::vector<double> tail_ratio;
    std::vector<double> boundary_ratio;
    std::vector<int> substeps;
    std::vector<FieldDump> fields;

    double eps = 0.0;
    /// sup over every step of (1 + t) ||w||_2 and where it happened.
    double envelope_sup = 0.0;
    double envelope_sup_time = 0.0;
    double max_tail_ratio = 0.0;
    double max_boundary_ratio = 0.0;
    /// First row time at which an audit failed, if any.
    std::optional<double> unresolved_time;
    bool resolved() const noexcept { return !unresolved_time.has_value(); }

    std::string stop_reason = "horizon";  // horizon | envelope | unresolved | failed
    std::optional<std::string> failure;
    std::optional<double> failure_time;
};

/// Samples the named profile (unit amplitude) on the laboratory grid.
ScalarField sample_profile(const GridSpec& grid, DataShape shape, double width, std::uint64_t seed);

/// sqrt(||w||_2^2 + ||grad w||_2^2) + ||w||_1 of the field (gradient spectrally).
double h1_l1_norm(const SpectralField& w);

/// 2/3-rule mask on moving-frame indices: |m| <= nx/3 and |n| <= ny/3.
std::vector<unsigned char> dealias_mask(const GridSpec& grid);
SpectralField apply_mask(const SpectralField& w, const std::vector<unsigned char>& mask);

/// Initial vorticity per the config, normalized so h1_l1_norm equals eps.
SpectralField initial_vorticity(const SimConfig& cfg);

/// -div(u w) at time t for a state in frame t (shear on) or frame 0 (shear off).
SpectralField nonlinear_rhs(const SpectralField& omega_hat, double t, double nu, bool dealias = true,
                            bool shear = true);

/// One integrating-factor RK4 step of length dt from time t.  No substepping.
SpectralField step(const SpectralField& state, double t, double dt, const SimConfig& cfg);

/// Full run.  Step errors end the run with stop_reason "failed" and the partial trajectory.
Trajectory simulate(const SimConfig& cfg);

/// Duhamel term of the linear problem: integral of G(x - x', y, nu t; y') w0(x', y').
/// Exact Fourier convolution in x, adaptive quadrature in y' over the box.
ScalarField duhamel_linear_apply(const ScalarField& omega0, double t_phys, double nu, double rel_tol = 1e-10);

/// ||a - b||_2 / ||b||_2 on matching grids.
double relative_l2_error(const ScalarField& a, const ScalarField& b);

}  // namespace shearlab
