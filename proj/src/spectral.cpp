#include "shearlab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "shearlab/error.hpp"

namespace shearlab {

namespace {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

double parity(int i, int j) { return ((i + j) & 1) ? -1.0 : 1.0; }

double forward_scale(const GridSpec& g) { return std::sqrt(g.dx() * g.dy() / static_cast<double>(g.size())); }

void require_same_grid(const GridSpec& a, const GridSpec& b, const char* what) {
    if (!(a == b)) throw InvalidArgument(std::string(what) + ": grid mismatch");
}

void require_finite_modes(const SpectralField& f, const char* what) {
    for (const auto& c : f.modes()) {
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) {
            throw InvalidArgument(std::string(what) + ": non-finite coefficient");
        }
    }
}

}  // namespace

GridSpec::GridSpec(int nx, int ny, double half_length_x, double half_length_y)
    : nx_(nx), ny_(ny), lx_(half_length_x), ly_(half_length_y) {
    if (!is_power_of_two(nx) || !is_power_of_two(ny) || nx < 16 || ny < 16) {
        throw InvalidArgument("GridSpec: sample counts must be powers of two >= 16, got " + std::to_string(nx) +
                              " x " + std::to_string(ny));
    }
    if (!(std::isfinite(half_length_x) && half_length_x > 0.0 && std::isfinite(half_length_y) &&
          half_length_y > 0.0)) {
        throw InvalidArgument("GridSpec: half-lengths must be finite and > 0");
    }
}

double GridSpec::kx(int i) const noexcept { return std::numbers::pi * signed_index(i, nx_) / lx_; }
double GridSpec::ky(int j) const noexcept { return std::numbers::pi * signed_index(j, ny_) / ly_; }

ScalarField::ScalarField(const GridSpec& grid) : grid_(grid), values_(grid.size(), 0.0) {}

ScalarField::ScalarField(const GridSpec& grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size()) throw InvalidArgument("ScalarField: sample count does not match grid");
    for (double v : values_) {
        if (!std::isfinite(v)) throw InvalidArgument("ScalarField: non-finite sample");
    }
}

SpectralField::SpectralField(const GridSpec& grid, double frame_time)
    : grid_(grid), frame_time_(frame_time), modes_(grid.size(), cplx(0.0, 0.0)) {}

SpectralField::SpectralField(const GridSpec& grid, double frame_time, fft::CVec modes)
    : grid_(grid), frame_time_(frame_time), modes_(std::move(modes)) {
    if (modes_.size() != grid_.size()) throw InvalidArgument("SpectralField: mode count does not match grid");
    if (!std::isfinite(frame_time)) throw InvalidArgument("SpectralField: non-finite frame time");
}

namespace {
int storage_index(int m, int n) { return m >= 0 ? m : m + n; }
}  // namespace

cplx SpectralField::mode(int m, int n) const {
    const int nx = grid_.nx(), ny = grid_.ny();
    if (m < -nx / 2 || m >= nx / 2 || n < -ny / 2 || n >= ny / 2) throw InvalidArgument("mode index out of range");
    return at(storage_index(m, nx), storage_index(n, ny));
}

cplx& SpectralField::mode(int m, int n) {
    const int nx = grid_.nx(), ny = grid_.ny();
    if (m < -nx / 2 || m >= nx / 2 || n < -ny / 2 || n >= ny / 2) throw InvalidArgument("mode index out of range");
    return at(storage_index(m, nx), storage_index(n, ny));
}

SpectralField transform_forward(const ScalarField& f) {
    const auto& g = f.grid();
    fft::CVec data(g.size());
    for (std::size_t k = 0; k < data.size(); ++k) data[k] = cplx(f.values()[k], 0.0);
    fft::dft_2d(data, g.ny(), g.nx(), fft::Direction::forward);
    const double s = forward_scale(g);
    for (int j = 0; j < g.ny(); ++j) {
        for (int i = 0; i < g.nx(); ++i) data[static_cast<std::size_t>(j) * g.nx() + i] *= s * parity(i, j);
    }
    return SpectralField(g, 0.0, std::move(data));
}

ScalarField transform_backward(const SpectralField& f) {
    const auto& g = f.grid();
    const int nx = g.nx(), ny = g.ny();
    fft::CVec data(f.modes());
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) data[static_cast<std::size_t>(j) * nx + i] *= parity(i, j);
    }
    fft::dft_columns(data, ny, nx, fft::Direction::backward);
    if (f.frame_time() != 0.0) {
        for (int j = 0; j < ny; ++j) {
            const double yj = g.y(j);
            for (int i = 0; i < nx; ++i) {
                const double phase = -g.kx(i) * f.frame_time() * yj;
                data[static_cast<std::size_t>(j) * nx + i] *= cplx(std::cos(phase), std::sin(phase));
            }
        }
    }
    fft::dft_rows(data, ny, nx, fft::Direction::backward);
    const double a = 1.0 / (static_cast<double>(g.size()) * forward_scale(g));
    std::vector<double> out(g.size());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = a * data[k].real();
    return ScalarField(g, std::move(out));
}

ScalarField moving_frame_samples(const SpectralField& f) {
    const auto& g = f.grid();
    const int nx = g.nx(), ny = g.ny();
    fft::CVec data(f.modes());
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) data[static_cast<std::size_t>(j) * nx + i] *= parity(i, j);
    }
    fft::dft_2d(data, ny, nx, fft::Direction::backward);
    const double a = 1.0 / (static_cast<double>(g.size()) * forward_scale(g));
    std::vector<double> out(g.size());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = a * data[k].real();
    return ScalarField(g, std::move(out));
}

SpectralVelocity biot_savart_spectral(const SpectralField& omega_hat) {
    require_finite_modes(omega_hat, "biot_savart");
    const auto& g = omega_hat.grid();
    const int nx = g.nx(), ny = g.ny();
    SpectralField u1(g, omega_hat.frame_time());
    SpectralField u2(g, omega_hat.frame_time());
    const cplx I(0.0, 1.0);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            if (i == nx / 2 || j == ny / 2) continue;
            const double k = g.kx(i);
            const double eta = omega_hat.lab_ky(i, j);
            const double k2 = k * k + eta * eta;
            if (k2 == 0.0) continue;
            const cplx w = omega_hat.at(i, j);
            u1.at(i, j) = -I * eta * w / k2;
            u2.at(i, j) = I * k * w / k2;
        }
    }
    return {std::move(u1), std::move(u2)};
}

VelocityField biot_savart(const SpectralField& omega_hat) {
    auto u = biot_savart_spectral(omega_hat);
    return {transform_backward(u.u1), transform_backward(u.u2)};
}

SpectralField curl_spectral(const SpectralVelocity& u) {
    const auto& g = u.u1.grid();
    require_same_grid(g, u.u2.grid(), "curl_spectral");
    SpectralField out(g, u.u1.frame_time());
    const cplx I(0.0, 1.0);
    for (int j = 0; j < g.ny(); ++j) {
        for (int i = 0; i < g.nx(); ++i) {
            out.at(i, j) = I * u.u1.lab_ky(i, j) * u.u1.at(i, j) - I * g.kx(i) * u.u2.at(i, j);
        }
    }
    return out;
}

SpectralField divergence_spectral(const SpectralVelocity& u) {
    const auto& g = u.u1.grid();
    require_same_grid(g, u.u2.grid(), "divergence_spectral");
    SpectralField out(g, u.u1.frame_time());
    const cplx I(0.0, 1.0);
    for (int j = 0; j < g.ny(); ++j) {
        for (int i = 0; i < g.nx(); ++i) {
            out.at(i, j) = I * g.kx(i) * u.u1.at(i, j) + I * u.u1.lab_ky(i, j) * u.u2.at(i, j);
        }
    }
    return out;
}

double gradient_l2(const SpectralVelocity& u) {
    const auto& g = u.u1.grid();
    double s = 0.0;
    for (int j = 0; j < g.ny(); ++j) {
        for (int i = 0; i < g.nx(); ++i) {
            const double k = g.kx(i);
            const double eta = u.u1.lab_ky(i, j);
            s += (k * k + eta * eta) * (std::norm(u.u1.at(i, j)) + std::norm(u.u2.at(i, j)));
        }
    }
    return std::sqrt(s);
}

double gradient_l2(const SpectralField& w) {
    const auto& g = w.grid();
    double s = 0.0;
    for (int j = 0; j < g.ny(); ++j) {
        for (int i = 0; i < g.nx(); ++i) {
            const double k = g.kx(i);
            const double eta = w.lab_ky(i, j);
            s += (k * k + eta * eta) * std::norm(w.at(i, j));
        }
    }
    return std::sqrt(s);
}

SpectralField shear_frame_map(const SpectralField& omega_hat, double t) {
    if (!std::isfinite(t)) throw InvalidArgument("shear_frame_map: non-finite time");
    const auto& g = omega_hat.grid();
    const int nx = g.nx(), ny = g.ny();
    double peak = 0.0;
    for (const auto& c : omega_hat.modes()) peak = std::max(peak, std::abs(c));
    const double occupied = 1e-13 * peak;
    const double shift = t * g.ly() / g.lx();

    SpectralField out(g, omega_hat.frame_time() - t);
    for (int i = 0; i < nx; ++i) {
        const int m = GridSpec::signed_index(i, nx);
        bool column_occupied = false;
        for (int j = 0; j < ny && !column_occupied; ++j) column_occupied = std::abs(omega_hat.at(i, j)) > occupied;
        if (!column_occupied && peak > 0.0) continue;
        const double exact = m * shift;
        const double rounded = std::nearbyint(exact);
        if (std::abs(exact - rounded) > 1e-9 * std::max(1.0, std::abs(exact))) {
            throw InvalidArgument("shear_frame_map: shift " + std::to_string(exact) + " for m = " + std::to_string(m) +
                                  " is not an integer number of y-modes");
        }
        const long long dn = static_cast<long long>(rounded);
        for (int j = 0; j < ny; ++j) {
            const cplx c = omega_hat.at(i, j);
            const int n = GridSpec::signed_index(j, ny);
            const long long target = n - dn;
            if (target < -ny / 2 || target >= ny / 2) {
                if (std::abs(c) > occupied) {
                    throw FrameOverflow("shear_frame_map: mode (" + std::to_string(m) + ", " + std::to_string(n) +
                                        ") maps to (" + std::to_string(m) + ", " + std::to_string(target) +
                                        "), outside the grid");
                }
                continue;
            }
            out.mode(m, static_cast<int>(target)) = c;
        }
    }
    return out;
}

double viscous_multiplier(double k, double eta0, double t1, double t2, double nu) {
    const double a = eta0 - k * t1;
    const double b = eta0 - k * t2;
    const double span = t2 - t1;
    return std::exp(-nu * (k * k * span + span * (a * a + a * b + b * b) / 3.0));
}

SpectralField linear_exact_fourier(const SpectralField& omega0_hat, double t, double nu) {
    if (!(std::isfinite(t) && t >= 0.0)) throw InvalidArgument("linear_exact_fourier: t must be finite and >= 0");
    if (!(std::isfinite(nu) && nu >= 0.0)) throw InvalidArgument("linear_exact_fourier: nu must be finite and >= 0");
    const auto& g = omega0_hat.grid();
    SpectralField out(g, omega0_hat.frame_time() + t, omega0_hat.modes());
    for (int j = 0; j < g.ny(); ++j) {
        for (int i = 0; i < g.nx(); ++i) {
            out.at(i, j) *= viscous_multiplier(g.kx(i), omega0_hat.lab_ky(i, j), 0.0, t, nu);
        }
    }
    return out;
}

double lp_norm_field(const ScalarField& f, double p) {
    if (!(p >= 1.0)) throw InvalidArgument("lp_norm_field: p must be >= 1");
    double peak = 0.0;
    for (double v : f.values()) peak = std::max(peak, std::abs(v));
    if (std::isinf(p)) return peak;
    if (peak == 0.0) return 0.0;
    double s = 0.0;
    for (double v : f.values()) s += std::pow(std::abs(v) / peak, p);
    return peak * std::pow(s * f.grid().dx() * f.grid().dy(), 1.0 / p);
}

double spectral_l2(const SpectralField& f) {
    double s = 0.0;
    for (const auto& c : f.modes()) s += std::norm(c);
    return std::sqrt(s);
}

double boundary_ratio(const ScalarField& f) {
    const auto& g = f.grid();
    double peak = 0.0;
    for (double v : f.values()) peak = std::max(peak, std::abs(v));
    if (peak == 0.0) return 0.0;
    double edge = 0.0;
    for (int i = 0; i < g.nx(); ++i) edge = std::max({edge, std::abs(f.at(i, 0)), std::abs(f.at(i, g.ny() - 1))});
    for (int j = 0; j < g.ny(); ++j) edge = std::max({edge, std::abs(f.at(0, j)), std::abs(f.at(g.nx() - 1, j))});
    return edge / peak;
}

void require_localized(const ScalarField& f, double tol) {
    const double r = boundary_ratio(f);
    if (r > tol) {
        throw LocalizationError("field is not localized: boundary/max = " + std::to_string(r) + " exceeds " +
                                std::to_string(tol));
    }
}

}  // namespace shearlab
