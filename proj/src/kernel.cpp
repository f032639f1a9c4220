#include "shearlab/kernel.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "shearlab/error.hpp"

namespace shearlab {

namespace {

void require_finite(const KernelPoint& pt) {
    if (!std::isfinite(pt.x) || !std::isfinite(pt.y) || !std::isfinite(pt.y_prime)) {
        throw InvalidArgument("kernel point has non-finite coordinates");
    }
}

// Offset of x from the Gaussian center, z = x - tau (y + y') / (2 nu).
double shear_offset(const KernelParams& p, const KernelPoint& pt) {
    return pt.x - p.drift() * (pt.y + pt.y_prime);
}

}  // namespace

KernelParams::KernelParams(double nu, double tau) : nu_(nu), tau_(tau) {
    if (!(std::isfinite(nu) && nu > 0.0)) {
        throw InvalidArgument("KernelParams: nu must be finite and > 0, got " + std::to_string(nu));
    }
    if (!(std::isfinite(tau) && tau > 0.0)) {
        throw InvalidArgument("KernelParams: tau must be finite and > 0, got " + std::to_string(tau));
    }
    const double ratio = tau / nu;
    kappa_ = ratio * ratio / 12.0;
    if (!std::isfinite(kappa_)) {
        throw InvalidArgument("KernelParams: kappa overflows for tau/nu = " + std::to_string(ratio));
    }
}

std::string_view to_string(KernelVariable v) {
    switch (v) {
        case KernelVariable::x: return "x";
        case KernelVariable::x_prime: return "xp";
        case KernelVariable::y: return "y";
        case KernelVariable::y_prime: return "yp";
    }
    return "?";
}

KernelVariable kernel_variable_from_string(std::string_view s) {
    if (s == "x") return KernelVariable::x;
    if (s == "xp" || s == "x'") return KernelVariable::x_prime;
    if (s == "y") return KernelVariable::y;
    if (s == "yp" || s == "y'") return KernelVariable::y_prime;
    throw InvalidArgument("unknown kernel variable '" + std::string(s) + "'");
}

double enhancement_factor(const KernelParams& params) {
    return 1.0 / std::sqrt(1.0 + params.kappa());
}

double eval_green(const KernelParams& p, const KernelPoint& pt) {
    require_finite(pt);
    const double z = shear_offset(p, pt);
    const double dy = pt.y - pt.y_prime;
    // One exponential of the grouped exponent; kappa ~ 1e8 stays harmless this way.
    const double log_g = -std::log(4.0 * std::numbers::pi * p.tau()) - 0.5 * std::log1p(p.kappa()) -
                         z * z / p.x_spread() - dy * dy / p.y_spread();
    return std::exp(log_g);
}

GreenYDerivativeParts green_y_derivative_parts(const KernelParams& p, const KernelPoint& pt) {
    const double g = eval_green(p, pt);
    const double z = shear_offset(p, pt);
    const double dy = pt.y - pt.y_prime;
    return {g * (p.tau() / p.nu()) * z / p.x_spread(), g * (-2.0 * dy) / p.y_spread()};
}

double eval_green_grad(const KernelParams& p, const KernelPoint& pt, KernelVariable which) {
    const double g = eval_green(p, pt);
    const double z = shear_offset(p, pt);
    const double dy = pt.y - pt.y_prime;
    const double dz = -2.0 * z / p.x_spread();  // d/dz of the exponent
    switch (which) {
        case KernelVariable::x: return g * dz;
        case KernelVariable::x_prime: return -g * dz;
        case KernelVariable::y: return g * (-p.drift() * dz - 2.0 * dy / p.y_spread());
        case KernelVariable::y_prime: return g * (-p.drift() * dz + 2.0 * dy / p.y_spread());
    }
    return 0.0;
}

double eval_heat(double t, double x, double y) {
    if (!(std::isfinite(t) && t > 0.0)) throw InvalidArgument("eval_heat: t must be > 0");
    if (!std::isfinite(x) || !std::isfinite(y)) throw InvalidArgument("eval_heat: non-finite point");
    return std::exp(-std::log(4.0 * std::numbers::pi * t) - (x * x + y * y) / (4.0 * t));
}

double to_rescaled_time(double t_phys, double nu) {
    if (!(t_phys > 0.0) || !(nu > 0.0) || !std::isfinite(t_phys) || !std::isfinite(nu)) {
        throw InvalidArgument("to_rescaled_time: arguments must be positive");
    }
    return nu * t_phys;
}

double from_rescaled_time(double tau, double nu) {
    if (!(tau > 0.0) || !(nu > 0.0) || !std::isfinite(tau) || !std::isfinite(nu)) {
        throw InvalidArgument("from_rescaled_time: arguments must be positive");
    }
    return tau / nu;
}

}  // namespace shearlab
