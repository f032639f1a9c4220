#include "shearlab/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "shearlab/error.hpp"
#include "shearlab/norms.hpp"

namespace shearlab {

DecayFit decay_fit(const std::vector<double>& times, const std::vector<double>& values, double t_lo, double t_hi,
                   double time_scale) {
    if (times.size() != values.size()) throw InvalidArgument("decay_fit: times and values differ in length");
    if (!(t_hi > t_lo) || !(time_scale > 0.0)) throw InvalidArgument("decay_fit: bad window or time scale");
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < t_lo || times[i] > t_hi) continue;
        if (!(values[i] > 0.0) || !std::isfinite(values[i])) {
            throw InvalidArgument("decay_fit: non-positive norm at t = " + std::to_string(times[i]));
        }
        lx.push_back(std::log1p(time_scale * times[i]));
        ly.push_back(std::log(values[i]));
    }
    if (lx.size() < 10) {
        throw InvalidArgument("decay_fit: window holds " + std::to_string(lx.size()) + " samples, need >= 10");
    }
    const double slope = least_squares_slope(lx, ly);
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= lx.size();
    my /= ly.size();
    const double intercept = my - slope * mx;
    double ss = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        const double r = ly[i] - (intercept + slope * lx[i]);
        ss += r * r;
    }
    DecayFit fit;
    fit.alpha = -slope;
    fit.amplitude = std::exp(intercept);
    fit.t_lo = t_lo;
    fit.t_hi = t_hi;
    fit.residual = std::sqrt(ss / lx.size());
    fit.samples = static_cast<int>(lx.size());
    fit.time_scale = time_scale;
    return fit;
}

DecayFit decay_fit(const Trajectory& traj, double t_lo, double t_hi, double time_scale) {
    return decay_fit(traj.times, traj.l2_norms, t_lo, t_hi, time_scale);
}

BootstrapReport bootstrap_audit(const std::vector<double>& times, const std::vector<double>& l2, double eps,
                                double delta) {
    if (!(std::isfinite(eps) && eps > 0.0)) throw InvalidArgument("bootstrap_audit: eps must be > 0");
    if (!(std::isfinite(delta) && delta > 0.0)) throw InvalidArgument("bootstrap_audit: delta must be > 0");
    if (times.size() != l2.size()) throw InvalidArgument("bootstrap_audit: times and norms differ in length");
    BootstrapReport r;
    r.delta = delta;
    r.eps = eps;
    const double bound = delta * eps;
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double v = (1.0 + times[i]) * l2[i];
        r.sup_envelope = std::max(r.sup_envelope, v);
        if (v > bound * (1.0 + 1e-12) && !r.first_violation) r.first_violation = times[i];
    }
    r.hypothesis_ok = !r.first_violation.has_value();
    r.conclusion_margin = r.sup_envelope / (0.5 * bound);
    r.conclusion_ok = r.conclusion_margin <= 1.0 + 1e-12;
    return r;
}

BootstrapReport bootstrap_audit(const Trajectory& traj, double eps, double delta) {
    BootstrapReport r = bootstrap_audit(traj.times, traj.l2_norms, eps, delta);
    if (traj.envelope_sup > r.sup_envelope) {
        r.sup_envelope = traj.envelope_sup;
        r.conclusion_margin = r.sup_envelope / (0.5 * delta * eps);
        r.conclusion_ok = r.conclusion_margin <= 1.0 + 1e-12;
        if (r.sup_envelope > delta * eps * (1.0 + 1e-12) && !r.first_violation) {
            r.first_violation = traj.envelope_sup_time;
            r.hypothesis_ok = false;
        }
    }
    return r;
}

bool gn_admissible(const GnPair& pair) {
    return std::isfinite(pair.q) && pair.q >= 2.0 && std::abs(pair.a - (0.5 + 1.0 / pair.q)) < 1e-12;
}

std::vector<GnPair> paper_gn_pairs() { return {{10.0, 0.6}, {2.5, 0.9}, {4.0, 0.75}}; }

double hessian_l2(const SpectralVelocity& u) {
    const auto& g = u.u1.grid();
    double s = 0.0;
    for (int j = 0; j < g.ny(); ++j) {
        for (int i = 0; i < g.nx(); ++i) {
            const double k = g.kx(i);
            const double eta = u.u1.lab_ky(i, j);
            const double k2 = k * k + eta * eta;
            s += k2 * k2 * (std::norm(u.u1.at(i, j)) + std::norm(u.u2.at(i, j)));
        }
    }
    return std::sqrt(s);
}

std::vector<GnRatio> gn_check(const SpectralVelocity& u, const std::vector<GnPair>& pairs) {
    for (const auto& p : pairs) {
        if (!gn_admissible(p)) {
            throw InvalidArgument("gn_check: pair (q=" + std::to_string(p.q) + ", a=" + std::to_string(p.a) +
                                  ") is not admissible in 2-D (need a = 1/2 + 1/q)");
        }
    }
    const ScalarField u1 = transform_backward(u.u1);
    const ScalarField u2 = transform_backward(u.u2);
    std::vector<double> mag(u1.values().size());
    for (std::size_t k = 0; k < mag.size(); ++k) mag[k] = std::hypot(u1.values()[k], u2.values()[k]);
    const ScalarField magnitude(u1.grid(), std::move(mag));
    const double l2 = lp_norm_field(magnitude, 2.0);
    const double h2 = hessian_l2(u);

    std::vector<GnRatio> out;
    for (const auto& p : pairs) {
        GnRatio r{p.q, p.a, std::nullopt};
        const double den = std::pow(l2, p.a) * std::pow(h2, 1.0 - p.a);
        if (den > 0.0 && std::isfinite(den)) r.ratio = lp_norm_field(magnitude, p.q) / den;
        out.push_back(r);
    }
    return out;
}

}  // namespace shearlab
