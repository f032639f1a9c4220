#include "shearlab/norms.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>
#include <tuple>

#include "shearlab/error.hpp"
#include "shearlab/parallel.hpp"
#include "shearlab/quadrature.hpp"

namespace shearlab {

std::string_view to_string(Slice s) { return s == Slice::source ? "source" : "target"; }

std::string_view to_string(Derivative d) {
    switch (d) {
        case Derivative::none: return "none";
        case Derivative::x: return "x";
        case Derivative::x_prime: return "xp";
        case Derivative::y: return "y";
        case Derivative::y_prime: return "yp";
    }
    return "?";
}

std::string_view to_string(Lemma l) {
    switch (l) {
        case Lemma::kernel: return "3.1";
        case Lemma::x_derivative: return "3.2";
        case Lemma::y_derivative: return "3.3";
    }
    return "?";
}

Slice slice_from_string(std::string_view s) {
    if (s == "source") return Slice::source;
    if (s == "target") return Slice::target;
    throw InvalidArgument("unknown slice '" + std::string(s) + "'");
}

Derivative derivative_from_string(std::string_view s) {
    if (s == "none") return Derivative::none;
    if (s == "x") return Derivative::x;
    if (s == "xp") return Derivative::x_prime;
    if (s == "y") return Derivative::y;
    if (s == "yp") return Derivative::y_prime;
    throw InvalidArgument("unknown derivative '" + std::string(s) + "'");
}

Lemma lemma_from_string(std::string_view s) {
    if (s == "3.1") return Lemma::kernel;
    if (s == "3.2") return Lemma::x_derivative;
    if (s == "3.3") return Lemma::y_derivative;
    throw InvalidArgument("unknown lemma '" + std::string(s) + "' (expected 3.1, 3.2 or 3.3)");
}

namespace {

void require_p(double p) {
    if (!(std::isfinite(p) && p >= 1.0)) throw InvalidArgument("exponent p must be finite and >= 1");
}

KernelVariable as_variable(Derivative d) {
    switch (d) {
        case Derivative::x: return KernelVariable::x;
        case Derivative::x_prime: return KernelVariable::x_prime;
        case Derivative::y: return KernelVariable::y;
        case Derivative::y_prime: return KernelVariable::y_prime;
        case Derivative::none: break;
    }
    throw InvalidArgument("no kernel variable for derivative 'none'");
}

// Integration variables: s = x - x' - drift (y + y') and v, the free height
// (y' on source slices, y on target slices).
struct SliceMap {
    const NormQuery& q;

    KernelPoint point(double s, double v) const {
        const double drift = q.params.drift();
        if (q.slice == Slice::source) return {s + drift * (q.fixed_y + v), q.fixed_y, v};
        return {s + drift * (v + q.fixed_y), v, q.fixed_y};
    }

    double integrand(double s, double v) const {
        const KernelPoint pt = point(s, v);
        const double k = q.derivative == Derivative::none ? eval_green(q.params, pt)
                                                          : eval_green_grad(q.params, pt, as_variable(q.derivative));
        return std::pow(std::abs(k), q.p);
    }

    // Zero of the derivative factor along s, where |dG|^p has a kink.
    double kink(double v) const {
        const double dy = q.slice == Slice::source ? q.fixed_y - v : v - q.fixed_y;
        const auto& p = q.params;
        switch (q.derivative) {
            case Derivative::y: return dy * p.x_spread() / (p.y_spread() * p.drift());
            case Derivative::y_prime: return -dy * p.x_spread() / (p.y_spread() * p.drift());
            default: return 0.0;
        }
    }
};

// Rough size of the integral, used to turn relative accuracy into an absolute floor.
double integral_scale(const NormQuery& q) {
    const auto& p = q.params;
    double d = 1.0;
    switch (q.derivative) {
        case Derivative::none: break;
        case Derivative::x:
        case Derivative::x_prime: d = 2.0 / std::sqrt(p.x_spread()); break;
        case Derivative::y:
        case Derivative::y_prime: d = 2.0 * p.drift() / std::sqrt(p.x_spread()) + 2.0 / std::sqrt(p.y_spread()); break;
    }
    return std::pow(kernel_lp_closed_form(p, q.p) * d, q.p);
}

}  // namespace

double kernel_lp_closed_form(const KernelParams& params, double p) {
    require_p(p);
    const double e = 1.0 - 1.0 / p;
    return std::pow(p, -1.0 / p) * std::exp(-e * std::log(4.0 * std::numbers::pi * params.tau()) -
                                            0.5 * e * std::log1p(params.kappa()));
}

double kernel_lp_quadrature(const NormQuery& q) {
    require_p(q.p);
    if (!std::isfinite(q.fixed_x) || !std::isfinite(q.fixed_y)) throw InvalidArgument("non-finite slice point");
    const SliceMap map{q};
    const double sigma_s = std::sqrt(q.params.x_spread() / 2.0);
    const double sigma_v = std::sqrt(q.params.y_spread() / 2.0);
    const double hs = 12.0 * sigma_s;
    const double hv = 12.0 * sigma_v;
    const double scale = integral_scale(q);

    double integral = 0.0;
    if (q.derivative == Derivative::none || q.derivative == Derivative::x || q.derivative == Derivative::x_prime) {
        // Kink (if any) sits on s = 0, which is a box edge here.
        const auto xs = quad::split_window(0.0, hs, 8);
        const auto vs = quad::split_window(q.fixed_y, hv, 8);
        const auto boxes = quad::tensor_boxes(xs, vs);
        quad::Tolerance tol{1e-13 * scale, 1e-12, 200000};
        integral = quad::integrate_2d([&](double s, double v) { return map.integrand(s, v); }, boxes, tol).value;
    } else {
        // Oblique kink: iterate, splitting each inner s-integral at the zero line.
        quad::Tolerance inner_tol{1e-14 * scale / (2.0 * hv), 1e-12, 20000};
        auto inner = [&](double v) {
            const double k = map.kink(v);
            std::vector<quad::Interval> pieces;
            if (k > -hs && k < hs) {
                const auto left = quad::split_window(0.5 * (k - hs), 0.5 * (k + hs), 4);
                const auto right = quad::split_window(0.5 * (k + hs), 0.5 * (hs - k), 4);
                pieces.insert(pieces.end(), left.begin(), left.end());
                pieces.insert(pieces.end(), right.begin(), right.end());
            } else {
                pieces = quad::split_window(0.0, hs, 8);
            }
            return quad::integrate_1d<double>([&](double s) { return map.integrand(s, v); }, pieces, inner_tol).value;
        };
        const auto vs = quad::split_window(q.fixed_y, hv, 8);
        quad::Tolerance outer_tol{1e-13 * scale, 1e-11, 20000};
        integral = quad::integrate_1d<double>(inner, vs, outer_tol).value;
    }
    if (!(integral > 0.0) || !std::isfinite(integral)) {
        throw QuadratureError("kernel_lp_quadrature: non-positive or non-finite integral");
    }
    return std::pow(integral, 1.0 / q.p);
}

double lemma_envelope(Lemma lemma, const KernelParams& params, double p, double tau_shift) {
    require_p(p);
    const double e = 1.0 - 1.0 / p;
    double tau_exp = -e + tau_shift;
    double kappa_exp = -0.5 * e;
    if (lemma == Lemma::x_derivative) {
        tau_exp -= 0.5;
        kappa_exp -= 0.5;
    } else if (lemma == Lemma::y_derivative) {
        tau_exp -= 0.5;
    }
    return std::exp(tau_exp * std::log(params.tau()) + kappa_exp * std::log1p(params.kappa()));
}

double envelope_asymptotic_slope(Lemma lemma, double p, bool large_tau) {
    const double e = 1.0 - 1.0 / p;
    switch (lemma) {
        case Lemma::kernel: return large_tau ? -2.0 * e : -e;
        case Lemma::x_derivative: return large_tau ? -2.0 * e - 1.5 : -e - 0.5;
        case Lemma::y_derivative: return large_tau ? -2.0 * e - 0.5 : -e - 0.5;
    }
    return 0.0;
}

std::vector<Derivative> lemma_derivatives(Lemma lemma) {
    switch (lemma) {
        case Lemma::kernel: return {Derivative::none};
        case Lemma::x_derivative: return {Derivative::x, Derivative::x_prime};
        case Lemma::y_derivative: return {Derivative::y, Derivative::y_prime};
    }
    return {};
}

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("least_squares_slope: need >= 2 paired points");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= x.size();
    my /= y.size();
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw InvalidArgument("least_squares_slope: degenerate abscissae");
    return sxy / sxx;
}

std::vector<std::pair<double, double>> default_norm_grid() {
    std::vector<std::pair<double, double>> grid;
    for (double nu : {1e-2, 1.0}) {
        for (int k = -4; k <= 8; ++k) grid.emplace_back(nu, nu * std::pow(10.0, 0.5 * k));
    }
    return grid;
}

NormReport verify_lemma_bounds(Lemma lemma, const std::vector<std::pair<double, double>>& grid,
                               const std::vector<double>& p_list, const VerifyOptions& options) {
    if (grid.empty() || p_list.empty()) throw InvalidArgument("verify_lemma_bounds: empty grid or p list");
    for (double p : p_list) require_p(p);
    const auto derivs = options.derivatives.empty() ? lemma_derivatives(lemma) : options.derivatives;

    // Calibration subgrid: every other tau per nu, first and last included.
    std::map<double, std::vector<double>> taus_by_nu;
    for (const auto& [nu, tau] : grid) taus_by_nu[nu].push_back(tau);
    auto is_calibration = [&](double nu, double tau) {
        auto taus = taus_by_nu[nu];
        std::sort(taus.begin(), taus.end());
        const auto it = std::find(taus.begin(), taus.end(), tau);
        const auto idx = static_cast<std::size_t>(it - taus.begin());
        return idx % 2 == 0 || idx + 1 == taus.size();
    };

    NormReport report;
    for (double p : p_list) {
        for (const auto& [nu, tau] : grid) {
            for (Slice s : options.slices) {
                for (Derivative d : derivs) {
                    NormRow row;
                    row.lemma = lemma;
                    row.p = p;
                    row.nu = nu;
                    row.tau = tau;
                    row.slice = s;
                    row.derivative = d;
                    row.calibration = is_calibration(nu, tau);
                    report.rows.push_back(row);
                }
            }
        }
    }

    parallel_for(report.rows.size(), options.jobs, [&](std::size_t i) {
        auto& row = report.rows[i];
        const KernelParams params(row.nu, row.tau);
        NormQuery q{params, row.p, row.slice, row.derivative, 0.0, 0.5};
        try {
            row.measured = kernel_lp_quadrature(q);
        } catch (const QuadratureError& e) {
            std::ostringstream os;
            os << e.what() << " at lemma " << to_string(row.lemma) << " p=" << row.p << " nu=" << row.nu
               << " tau=" << row.tau << " slice=" << to_string(row.slice) << " derivative=" << to_string(row.derivative);
            throw QuadratureError(os.str());
        }
        row.envelope = lemma_envelope(row.lemma, params, row.p, options.tau_shift);
        row.ratio = row.measured / row.envelope;
    });

    for (double p : p_list) {
        double c = 0.0;
        for (const auto& row : report.rows) {
            if (row.p == p && row.calibration) c = std::max(c, row.ratio);
        }
        c *= 1.01;
        report.constants.push_back({lemma, p, c});
        for (auto& row : report.rows) {
            if (row.p != p) continue;
            if (!(std::isfinite(row.ratio) && row.ratio > 0.0)) {
                row.flagged = true;
            } else if (row.measured > c * row.envelope) {
                row.flagged = true;
            }
            if (row.flagged) {
                std::ostringstream os;
                os << "lemma " << to_string(lemma) << " p=" << row.p << " nu=" << row.nu << " tau=" << row.tau
                   << " slice=" << to_string(row.slice) << " derivative=" << to_string(row.derivative)
                   << ": measured " << row.measured << " exceeds C*envelope with C=" << c;
                report.failures.push_back(os.str());
            }
        }
    }

    // Log-log slopes per (p, nu, slice, derivative) in both regimes.
    for (double p : p_list) {
        for (const auto& [nu, taus] : taus_by_nu) {
            for (Slice s : options.slices) {
                for (Derivative d : derivs) {
                    for (bool large : {false, true}) {
                        std::vector<double> lt, lm, le;
                        for (const auto& row : report.rows) {
                            if (row.p != p || row.nu != nu || row.slice != s || row.derivative != d) continue;
                            const double r = row.tau / row.nu;
                            if (large ? r >= options.large_regime : r <= options.small_regime) {
                                lt.push_back(std::log(row.tau));
                                lm.push_back(std::log(row.measured));
                                le.push_back(std::log(row.envelope));
                            }
                        }
                        if (lt.size() < 2) continue;
                        SlopeFit fit;
                        fit.lemma = lemma;
                        fit.p = p;
                        fit.nu = nu;
                        fit.slice = s;
                        fit.derivative = d;
                        fit.large_tau = large;
                        fit.points = static_cast<int>(lt.size());
                        fit.measured_slope = least_squares_slope(lt, lm);
                        fit.envelope_slope = least_squares_slope(lt, le);
                        report.fits.push_back(fit);
                        if (!(std::abs(fit.measured_slope - fit.envelope_slope) <= options.slope_tolerance)) {
                            std::ostringstream os;
                            os << "lemma " << to_string(lemma) << " p=" << p << " nu=" << nu
                               << " slice=" << to_string(s) << " derivative=" << to_string(d) << " "
                               << (large ? "large" : "small") << "-tau slope " << fit.measured_slope
                               << " differs from envelope slope " << fit.envelope_slope;
                            report.failures.push_back(os.str());
                        }
                    }
                }
            }
        }
    }
    return report;
}

YoungResult young_check(const std::vector<double>& kernel, const std::vector<double>& f, double weight, double p,
                        double q, double r) {
    for (double e : {p, q, r}) {
        if (!(std::isfinite(e) && e >= 1.0)) throw InvalidArgument("young_check: exponents must be finite and >= 1");
    }
    if (std::abs(1.0 + 1.0 / r - (1.0 / q + 1.0 / p)) > 1e-12) {
        throw InvalidArgument("young_check: exponents violate 1 + 1/r = 1/q + 1/p");
    }
    if (!(weight > 0.0)) throw InvalidArgument("young_check: weight must be > 0");
    const std::size_t n = f.size();
    if (kernel.size() != n * n || n == 0) throw InvalidArgument("young_check: kernel must be n x n with n = f.size()");

    auto norm = [&](auto&& value, std::size_t count, double e) {
        double s = 0.0;
        for (std::size_t i = 0; i < count; ++i) s += std::pow(std::abs(value(i)), e);
        return std::pow(s * weight, 1.0 / e);
    };

    YoungResult out;
    for (std::size_t j = 0; j < n; ++j) {
        out.a = std::max(out.a, norm([&](std::size_t i) { return kernel[i * n + j]; }, n, q));
    }
    for (std::size_t i = 0; i < n; ++i) {
        out.b = std::max(out.b, norm([&](std::size_t j) { return kernel[i * n + j]; }, n, q));
    }
    std::vector<double> tf(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += kernel[i * n + j] * f[j];
        tf[i] = s * weight;
    }
    const double fp = norm([&](std::size_t i) { return f[i]; }, n, p);
    out.lhs = norm([&](std::size_t i) { return tf[i]; }, n, r);
    out.bound_fine = std::pow(out.a, q / r) * std::pow(out.b, q - q / p) * fp;
    out.bound_coarse = std::max(out.a, out.b) * fp;
    return out;
}

}  // namespace shearlab
