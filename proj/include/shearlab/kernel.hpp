#pragma once

// Green's function of the Couette-advected heat equation
//
//     d_tau G + (1/nu) y d_x G - Laplace G = 0,   G(tau = 0) = delta(x, y - y'),
//
// written in rescaled time tau = nu * t.  With kappa = tau^2 / (12 nu^2) and the
// shear-shifted offset z = x - tau (y + y') / (2 nu):
//
//     G = 1 / (4 pi tau) (1 + kappa)^(-1/2)
//         exp(-z^2 / (4 tau (1 + kappa)) - (y - y')^2 / (4 tau)).
//
// Everything here is a pure function of its arguments.

#include <string_view>

namespace shearlab {

/// Viscosity and rescaled time.  Construction rejects non-positive or non-finite values.
class KernelParams {
public:
    KernelParams(double nu, double tau);

    double nu() const noexcept { return nu_; }
    double tau() const noexcept { return tau_; }
    /// tau^2 / (12 nu^2)
    double kappa() const noexcept { return kappa_; }
    /// Shear drift coefficient tau / (2 nu) multiplying (y + y').
    double drift() const noexcept { return tau_ / (2.0 * nu_); }
    /// Variance parameter of the x Gaussian, 4 tau (1 + kappa).
    double x_spread() const noexcept { return 4.0 * tau_ * (1.0 + kappa_); }
    /// Variance parameter of the y Gaussian, 4 tau.
    double y_spread() const noexcept { return 4.0 * tau_; }

private:
    double nu_;
    double tau_;
    double kappa_;
};

/// Arguments of G: x is the longitudinal offset x - x'.
struct KernelPoint {
    double x = 0.0;
    double y = 0.0;
    double y_prime = 0.0;
};

enum class KernelVariable { x, x_prime, y, y_prime };

std::string_view to_string(KernelVariable v);
KernelVariable kernel_variable_from_string(std::string_view s);

/// (1 + kappa)^(-1/2), in (0, 1].
double enhancement_factor(const KernelParams& params);

double eval_green(const KernelParams& params, const KernelPoint& pt);

/// Partial derivative of G with respect to one of x, x', y, y'.
double eval_green_grad(const KernelParams& params, const KernelPoint& pt, KernelVariable which);

/// The two pieces of d_y G: m1 carries the shear term proportional to tau / nu,
/// m2 the ordinary heat-kernel term.
struct GreenYDerivativeParts {
    double m1 = 0.0;
    double m2 = 0.0;
};
GreenYDerivativeParts green_y_derivative_parts(const KernelParams& params, const KernelPoint& pt);

/// Classical 2-D heat kernel (1 / (4 pi t)) exp(-(x^2 + y^2) / (4 t)).
double eval_heat(double t, double x, double y);

/// tau = nu * t_phys.
double to_rescaled_time(double t_phys, double nu);
double from_rescaled_time(double tau, double nu);

}  // namespace shearlab
