#pragma once

// Periodic-box representation of fields on R^2.
//
// Grid nodes are x_i = -Lx + i dx, y_j = -Ly + j dy; samples are stored
// row-major with rows of fixed y: values[j * nx + i].
//
// A SpectralField with frame time f and coefficients c(m, n) represents
//
//     w(x, y) = (4 Lx Ly)^(-1/2) sum c(m, n) exp(i k x + i (eta_n - k f) y),
//     k = pi m / Lx,  eta_n = pi n / Ly,
//
// i.e. a function periodic in the sheared coordinate x - f y.  f = 0 is the
// laboratory frame.  With this normalization sum |c|^2 equals the continuum
// L2 norm squared of the sampled function (Parseval with weight dx dy).

#include <complex>
#include <cstddef>
#include <vector>

#include "shearlab/fft.hpp"

namespace shearlab {

using cplx = std::complex<double>;

class GridSpec {
public:
    /// Rejects sizes that are not powers of two >= 16 and non-positive half-lengths.
    GridSpec(int nx, int ny, double half_length_x, double half_length_y);
    static GridSpec square(int n, double half_length) { return GridSpec(n, n, half_length, half_length); }

    int nx() const noexcept { return nx_; }
    int ny() const noexcept { return ny_; }
    double lx() const noexcept { return lx_; }
    double ly() const noexcept { return ly_; }
    double dx() const noexcept { return 2.0 * lx_ / nx_; }
    double dy() const noexcept { return 2.0 * ly_ / ny_; }
    double x(int i) const noexcept { return -lx_ + dx() * i; }
    double y(int j) const noexcept { return -ly_ + dy() * j; }
    std::size_t size() const noexcept { return static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_); }

    /// Signed wavenumber index of storage index i along an axis of length n; i = n/2 maps to -n/2.
    static int signed_index(int i, int n) noexcept { return i < n / 2 ? i : i - n; }
    double kx(int i) const noexcept;
    double ky(int j) const noexcept;

    bool operator==(const GridSpec& o) const noexcept {
        return nx_ == o.nx_ && ny_ == o.ny_ && lx_ == o.lx_ && ly_ == o.ly_;
    }

private:
    int nx_;
    int ny_;
    double lx_;
    double ly_;
};

class ScalarField {
public:
    explicit ScalarField(const GridSpec& grid);
    /// Rejects size mismatch and non-finite samples.
    ScalarField(const GridSpec& grid, std::vector<double> values);

    const GridSpec& grid() const noexcept { return grid_; }
    const std::vector<double>& values() const noexcept { return values_; }
    std::vector<double>& mutable_values() noexcept { return values_; }
    double at(int i, int j) const { return values_[static_cast<std::size_t>(j) * grid_.nx() + i]; }
    double& at(int i, int j) { return values_[static_cast<std::size_t>(j) * grid_.nx() + i]; }

private:
    GridSpec grid_;
    std::vector<double> values_;
};

class SpectralField {
public:
    explicit SpectralField(const GridSpec& grid, double frame_time = 0.0);
    SpectralField(const GridSpec& grid, double frame_time, fft::CVec modes);

    const GridSpec& grid() const noexcept { return grid_; }
    double frame_time() const noexcept { return frame_time_; }
    void set_frame_time(double f) noexcept { frame_time_ = f; }
    const fft::CVec& modes() const noexcept { return modes_; }
    fft::CVec& mutable_modes() noexcept { return modes_; }
    /// Coefficient at storage indices (i along x, j along y).
    cplx at(int i, int j) const { return modes_[static_cast<std::size_t>(j) * grid_.nx() + i]; }
    cplx& at(int i, int j) { return modes_[static_cast<std::size_t>(j) * grid_.nx() + i]; }
    /// Coefficient at signed wavenumber indices (m, n).
    cplx mode(int m, int n) const;
    cplx& mode(int m, int n);
    /// Laboratory-frame y wavenumber of storage row j at storage column i.
    double lab_ky(int i, int j) const noexcept { return grid_.ky(j) - grid_.kx(i) * frame_time_; }

private:
    GridSpec grid_;
    double frame_time_;
    fft::CVec modes_;
};

struct VelocityField {
    ScalarField u1;
    ScalarField u2;
};

/// Spectral velocity components in the frame of the vorticity they came from.
struct SpectralVelocity {
    SpectralField u1;
    SpectralField u2;
};

SpectralField transform_forward(const ScalarField& f);
/// Samples the represented function at the laboratory grid nodes (any frame time).
ScalarField transform_backward(const SpectralField& f);
/// Samples at the nodes of the sheared grid (x_i + f y_j, y_j), i.e. a plain inverse DFT.
ScalarField moving_frame_samples(const SpectralField& f);

/// u = (d_y phi, -d_x phi) with Laplace phi = w; zero mode and Nyquist rows/columns set to 0.
SpectralVelocity biot_savart_spectral(const SpectralField& omega_hat);
VelocityField biot_savart(const SpectralField& omega_hat);
/// d_y u1 - d_x u2 in spectral space.
SpectralField curl_spectral(const SpectralVelocity& u);
/// d_x u1 + d_y u2 in spectral space.
SpectralField divergence_spectral(const SpectralVelocity& u);
/// L2 norm of the full velocity gradient, by Parseval.
double gradient_l2(const SpectralVelocity& u);
/// ||grad w||_2 by Parseval, laboratory wavenumbers.
double gradient_l2(const SpectralField& w);

/// Relabels to frame f - t: coefficient (m, n) moves to (m, n - m t Ly / Lx).
/// The shift must be an integer for every m (InvalidArgument otherwise); occupied
/// modes landing off-grid raise FrameOverflow naming the first such mode.
SpectralField shear_frame_map(const SpectralField& omega_hat, double t);

/// Exact solution of d_t w + y d_x w - nu Laplace w = 0 after time t, returned in
/// the moving frame (frame time advanced by t; coefficients multiplied in place).
SpectralField linear_exact_fourier(const SpectralField& omega0_hat, double t, double nu);

/// exp(-nu int_{t1}^{t2} (k^2 + (eta0 - k s)^2) ds) with eta0 the lab wavenumber at s = 0.
double viscous_multiplier(double k, double eta0, double t1, double t2, double nu);

/// Riemann-sum Lp norm with cell weight dx dy; p = infinity gives max |value|.
double lp_norm_field(const ScalarField& f, double p);
/// sqrt(sum |c|^2); equals the continuum L2 norm.
double spectral_l2(const SpectralField& f);

/// max |boundary sample| / max |sample|, 0 for the zero field.
double boundary_ratio(const ScalarField& f);
/// Throws LocalizationError when boundary_ratio exceeds tol.
void require_localized(const ScalarField& f, double tol = 1e-8);

}  // namespace shearlab
