#include "shearlab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "shearlab/error.hpp"
#include "shearlab/kernel.hpp"
#include "shearlab/quadrature.hpp"

namespace shearlab {

std::string_view to_string(DataShape s) {
    switch (s) {
        case DataShape::gaussian: return "gaussian";
        case DataShape::gaussian_dipole: return "gaussian-dipole";
        case DataShape::random_localized: return "random-localized";
    }
    return "?";
}

DataShape data_shape_from_string(std::string_view s) {
    if (s == "gaussian") return DataShape::gaussian;
    if (s == "gaussian-dipole") return DataShape::gaussian_dipole;
    if (s == "random-localized") return DataShape::random_localized;
    throw InvalidArgument("unknown data shape '" + std::string(s) + "'");
}

void SimConfig::validate() const {
    auto fail = [](const std::string& m) { throw ConfigError("simulation config: " + m); };
    if (!(std::isfinite(nu) && nu > 0.0)) fail("nu must be finite and > 0");
    if (!(std::isfinite(t_end) && t_end > 0.0)) fail("t_end must be finite and > 0");
    if (!(std::isfinite(dt) && dt > 0.0 && dt <= t_end)) fail("dt must be in (0, t_end]");
    if (!(std::isfinite(eps) && eps >= 0.0)) fail("eps must be finite and >= 0");
    if (!(std::isfinite(width) && width > 0.0)) fail("width must be finite and > 0");
    if (snapshot_stride < 1) fail("snapshot_stride must be >= 1");
    if (field_stride < 0) fail("field_stride must be >= 0");
    if (!(cfl > 0.0 && cfl <= 2.0)) fail("cfl must be in (0, 2]");
    if (max_substeps < 1) fail("max_substeps must be >= 1");
    if (!(tail_tolerance > 0.0) || !(boundary_tolerance > 0.0)) fail("audit tolerances must be > 0");
    if (!(stop_envelope >= 0.0)) fail("stop_envelope must be >= 0");
    const double steps = t_end / dt;
    if (std::abs(steps - std::round(steps)) > 1e-9 * std::max(1.0, steps)) fail("t_end must be a multiple of dt");
}

namespace {

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1p-53; }

double parity(int i, int j) { return ((i + j) & 1) ? -1.0 : 1.0; }

std::size_t mirror(int i, int j, int nx, int ny) {
    const int mi = (nx - i) % nx;
    const int mj = (ny - j) % ny;
    return static_cast<std::size_t>(mj) * nx + mi;
}

// Per-grid precomputation and work buffers for the moving-frame right-hand side.
class Engine {
public:
    Engine(const GridSpec& g, double nu, bool dealias, bool shear, bool nonlinear)
        : g_(g), nu_(nu), shear_(shear), nonlinear_(nonlinear), mask_(g.size(), 1), par_(g.size()),
          a_(g.size()), b_(g.size()), eh_(g.size()), ef_(g.size()), eh2_(g.size()) {
        if (dealias) mask_ = dealias_mask(g);
        for (int j = 0; j < g.ny(); ++j) {
            for (int i = 0; i < g.nx(); ++i) par_[idx(i, j)] = parity(i, j);
        }
        s_ = std::sqrt(g.dx() * g.dy() / static_cast<double>(g.size()));
        inv_ = 1.0 / (static_cast<double>(g.size()) * s_);
    }

    std::size_t idx(int i, int j) const { return static_cast<std::size_t>(j) * g_.nx() + i; }
    double eta(int i, int j, double t) const { return shear_ ? g_.ky(j) - g_.kx(i) * t : g_.ky(j); }

    // Returns the frame-advection rate max|u1 - t u2| / dx + max|u2| / dy.
    double rhs(const fft::CVec& w, double t, fft::CVec& out) {
        const int nx = g_.nx(), ny = g_.ny();
        if (!nonlinear_) {
            std::fill(out.begin(), out.end(), cplx(0.0, 0.0));
            return 0.0;
        }
        const cplx I(0.0, 1.0);
        for (int j = 0; j < ny; ++j) {
            for (int i = 0; i < nx; ++i) {
                const std::size_t k = idx(i, j);
                b_[k] = par_[k] * w[k];
                if (i == nx / 2 || j == ny / 2) {
                    a_[k] = 0.0;
                    continue;
                }
                const double kx = g_.kx(i);
                const double ey = eta(i, j, t);
                const double k2 = kx * kx + ey * ey;
                if (k2 == 0.0) {
                    a_[k] = 0.0;
                    continue;
                }
                const cplx u1 = -I * ey * w[k] / k2;
                const cplx u2 = I * kx * w[k] / k2;
                a_[k] = par_[k] * (u1 + I * u2);
            }
        }
        fft::dft_2d(a_, ny, nx, fft::Direction::backward);
        fft::dft_2d(b_, ny, nx, fft::Direction::backward);
        double max_x = 0.0, max_y = 0.0;
        const double tx = shear_ ? t : 0.0;
        for (std::size_t k = 0; k < a_.size(); ++k) {
            const double u1 = inv_ * a_[k].real();
            const double u2 = inv_ * a_[k].imag();
            const double wv = inv_ * b_[k].real();
            max_x = std::max(max_x, std::abs(u1 - tx * u2));
            max_y = std::max(max_y, std::abs(u2));
            a_[k] = cplx(u1 * wv, u2 * wv);
        }
        fft::dft_2d(a_, ny, nx, fft::Direction::forward);
        for (int j = 0; j < ny; ++j) {
            for (int i = 0; i < nx; ++i) {
                const std::size_t k = idx(i, j);
                if (!mask_[k]) {
                    out[k] = 0.0;
                    continue;
                }
                const cplx f = a_[k];
                const cplx fm = std::conj(a_[mirror(i, j, nx, ny)]);
                const cplx p1 = 0.5 * (f + fm) * (s_ * par_[k]);
                const cplx p2 = (f - fm) / (2.0 * I) * (s_ * par_[k]);
                out[k] = -(I * g_.kx(i) * p1 + I * eta(i, j, t) * p2);
            }
        }
        return max_x / g_.dx() + max_y / g_.dy();
    }

    void multiplier(double t1, double t2, std::vector<double>& e) const {
        const double span = t2 - t1;
        for (int j = 0; j < g_.ny(); ++j) {
            for (int i = 0; i < g_.nx(); ++i) {
                const double kx = g_.kx(i);
                if (shear_) {
                    e[idx(i, j)] = viscous_multiplier(kx, g_.ky(j), t1, t2, nu_);
                } else {
                    const double ky = g_.ky(j);
                    e[idx(i, j)] = std::exp(-nu_ * (kx * kx + ky * ky) * span);
                }
            }
        }
    }

    // Lawson RK4 from t to t + h; k1 holds N(w, t) on entry.
    void lawson(fft::CVec& w, double t, double h, const fft::CVec& k1) {
        multiplier(t, t + h, ef_);
        if (!nonlinear_) {
            for (std::size_t k = 0; k < w.size(); ++k) w[k] *= ef_[k];
            return;
        }
        multiplier(t, t + 0.5 * h, eh_);
        multiplier(t + 0.5 * h, t + h, eh2_);
        const std::size_t n = w.size();
        fft::CVec stage(n), k2(n), k3(n), k4(n);
        for (std::size_t k = 0; k < n; ++k) stage[k] = eh_[k] * (w[k] + 0.5 * h * k1[k]);
        rhs(stage, t + 0.5 * h, k2);
        for (std::size_t k = 0; k < n; ++k) stage[k] = eh_[k] * w[k] + 0.5 * h * k2[k];
        rhs(stage, t + 0.5 * h, k3);
        for (std::size_t k = 0; k < n; ++k) stage[k] = ef_[k] * w[k] + h * eh2_[k] * k3[k];
        rhs(stage, t + h, k4);
        for (std::size_t k = 0; k < n; ++k) {
            w[k] = ef_[k] * w[k] + h / 6.0 * (ef_[k] * k1[k] + 2.0 * eh2_[k] * (k2[k] + k3[k]) + k4[k]);
        }
    }

    const std::vector<unsigned char>& mask() const { return mask_; }

private:
    GridSpec g_;
    double nu_;
    bool shear_;
    bool nonlinear_;
    std::vector<unsigned char> mask_;
    std::vector<double> par_;
    double s_ = 1.0;
    double inv_ = 1.0;
    fft::CVec a_, b_;
    std::vector<double> eh_, ef_, eh2_;
};

void require_frame(const SpectralField& w, double t, bool shear, const char* what) {
    const double expected = shear ? t : 0.0;
    if (std::abs(w.frame_time() - expected) > 1e-9 * (1.0 + std::abs(expected))) {
        std::ostringstream os;
        os << what << ": state frame time " << w.frame_time() << " does not match " << expected;
        throw InvalidArgument(os.str());
    }
}

double sum_norm(const fft::CVec& w) {
    double s = 0.0;
    for (const auto& c : w) s += std::norm(c);
    return s;
}

double tail_ratio(const SpectralField& w, bool dealias) {
    const auto& g = w.grid();
    const double cut_x = dealias ? 2.0 * g.nx() / 9.0 : g.nx() / 3.0;
    const double cut_y = dealias ? 2.0 * g.ny() / 9.0 : g.ny() / 3.0;
    double tail = 0.0, total = 0.0;
    for (int j = 0; j < g.ny(); ++j) {
        const int n = std::abs(GridSpec::signed_index(j, g.ny()));
        for (int i = 0; i < g.nx(); ++i) {
            const int m = std::abs(GridSpec::signed_index(i, g.nx()));
            const double e = std::norm(w.at(i, j));
            total += e;
            if (m > cut_x || n > cut_y) tail += e;
        }
    }
    return total > 0.0 ? std::sqrt(tail / total) : 0.0;
}

double velocity_l2(const SpectralField& w) {
    const auto& g = w.grid();
    double s = 0.0;
    for (int j = 0; j < g.ny(); ++j) {
        for (int i = 0; i < g.nx(); ++i) {
            if (i == g.nx() / 2 || j == g.ny() / 2) continue;
            const double kx = g.kx(i);
            const double ey = w.lab_ky(i, j);
            const double k2 = kx * kx + ey * ey;
            if (k2 > 0.0) s += std::norm(w.at(i, j)) / k2;
        }
    }
    return std::sqrt(s);
}

}  // namespace

ScalarField sample_profile(const GridSpec& grid, DataShape shape, double width, std::uint64_t seed) {
    if (!(width > 0.0)) throw InvalidArgument("sample_profile: width must be > 0");
    struct Wave {
        double a, kx, ky, phase;
    };
    std::vector<Wave> waves;
    if (shape == DataShape::random_localized) {
        std::mt19937_64 rng(seed);
        for (int n = 0; n < 6; ++n) {
            Wave w{};
            w.a = 0.5 + 0.5 * uniform01(rng);
            w.kx = (2.0 * uniform01(rng) - 1.0) * 1.5 / width;
            w.ky = (2.0 * uniform01(rng) - 1.0) * 1.5 / width;
            w.phase = 2.0 * std::numbers::pi * uniform01(rng);
            waves.push_back(w);
        }
    }
    ScalarField f(grid);
    const double w2 = width * width;
    for (int j = 0; j < grid.ny(); ++j) {
        const double y = grid.y(j);
        for (int i = 0; i < grid.nx(); ++i) {
            const double x = grid.x(i);
            const double env = std::exp(-(x * x + y * y) / (2.0 * w2));
            double v = env;
            if (shape == DataShape::gaussian_dipole) {
                v = -x / w2 * env;
            } else if (shape == DataShape::random_localized) {
                double s = 0.0;
                for (const auto& w : waves) s += w.a * std::cos(w.kx * x + w.ky * y + w.phase);
                v = env * s;
            }
            f.at(i, j) = v;
        }
    }
    return f;
}

double h1_l1_norm(const SpectralField& w) {
    const double l2 = spectral_l2(w);
    const double grad = gradient_l2(w);
    const double l1 = lp_norm_field(moving_frame_samples(w), 1.0);
    return std::sqrt(l2 * l2 + grad * grad) + l1;
}

std::vector<unsigned char> dealias_mask(const GridSpec& g) {
    std::vector<unsigned char> mask(g.size(), 0);
    for (int j = 0; j < g.ny(); ++j) {
        const int n = std::abs(GridSpec::signed_index(j, g.ny()));
        for (int i = 0; i < g.nx(); ++i) {
            const int m = std::abs(GridSpec::signed_index(i, g.nx()));
            // Nyquist index is -n/2, so |signed| = n/2 there and it is always cut.
            mask[static_cast<std::size_t>(j) * g.nx() + i] = (3 * m <= g.nx() && 3 * n <= g.ny()) ? 1 : 0;
        }
    }
    return mask;
}

SpectralField apply_mask(const SpectralField& w, const std::vector<unsigned char>& mask) {
    if (mask.size() != w.modes().size()) throw InvalidArgument("apply_mask: size mismatch");
    SpectralField out(w);
    for (std::size_t k = 0; k < mask.size(); ++k) {
        if (!mask[k]) out.mutable_modes()[k] = 0.0;
    }
    return out;
}

SpectralField initial_vorticity(const SimConfig& cfg) {
    cfg.validate();
    if (cfg.eps == 0.0) return SpectralField(cfg.grid, 0.0);
    const ScalarField profile = sample_profile(cfg.grid, cfg.shape, cfg.width, cfg.seed);
    require_localized(profile, cfg.boundary_tolerance);
    SpectralField w = transform_forward(profile);
    if (cfg.dealias) w = apply_mask(w, dealias_mask(cfg.grid));
    const double norm = h1_l1_norm(w);
    if (!(norm > 0.0)) throw InvalidArgument("initial_vorticity: profile has zero norm");
    for (auto& c : w.mutable_modes()) c *= cfg.eps / norm;
    return w;
}

SpectralField nonlinear_rhs(const SpectralField& omega_hat, double t, double nu, bool dealias, bool shear) {
    require_frame(omega_hat, t, shear, "nonlinear_rhs");
    Engine e(omega_hat.grid(), nu, dealias, shear, true);
    SpectralField out(omega_hat.grid(), omega_hat.frame_time());
    e.rhs(omega_hat.modes(), t, out.mutable_modes());
    return out;
}

SpectralField step(const SpectralField& state, double t, double dt, const SimConfig& cfg) {
    if (!(std::isfinite(dt) && dt > 0.0)) throw InvalidArgument("step: dt must be > 0");
    if (!(state.grid() == cfg.grid)) throw InvalidArgument("step: grid mismatch");
    require_frame(state, t, cfg.shear, "step");
    Engine e(cfg.grid, cfg.nu, cfg.dealias, cfg.shear, cfg.nonlinear);
    fft::CVec w = state.modes();
    fft::CVec k1(w.size());
    e.rhs(w, t, k1);
    e.lawson(w, t, dt, k1);
    const double s = sum_norm(w);
    if (!std::isfinite(s)) throw NumericalBlowup("step: non-finite state", t + dt);
    return SpectralField(cfg.grid, cfg.shear ? t + dt : 0.0, std::move(w));
}

Trajectory simulate(const SimConfig& cfg) {
    cfg.validate();
    Trajectory tr;
    tr.eps = cfg.eps;
    const SpectralField w0 = initial_vorticity(cfg);
    Engine engine(cfg.grid, cfg.nu, cfg.dealias, cfg.shear, cfg.nonlinear);
    fft::CVec w = w0.modes();
    fft::CVec k1(w.size());

    const long long nsteps = std::llround(cfg.t_end / cfg.dt);
    double t = 0.0;
    long long pending_row = -1;  // row waiting for its step flux
    int rows_since_field = 0;

    auto record_row = [&](double time, int subs) {
        const SpectralField f(cfg.grid, cfg.shear ? time : 0.0, w);
        const ScalarField samples = moving_frame_samples(f);
        const double l2 = spectral_l2(f);
        tr.times.push_back(time);
        tr.l2_norms.push_back(l2);
        tr.linf_norms.push_back(lp_norm_field(samples, INFINITY));
        tr.velocity_l2.push_back(velocity_l2(f));
        tr.enstrophy_flux.push_back(0.0);
        const double grad = gradient_l2(f);
        tr.dissipation.push_back(2.0 * cfg.nu * grad * grad);
        const double tail = tail_ratio(f, cfg.dealias);
        const double edge = boundary_ratio(samples);
        tr.tail_ratio.push_back(tail);
        tr.boundary_ratio.push_back(edge);
        tr.substeps.push_back(subs);
        tr.max_tail_ratio = std::max(tr.max_tail_ratio, tail);
        tr.max_boundary_ratio = std::max(tr.max_boundary_ratio, edge);
        if ((tail > cfg.tail_tolerance || edge > cfg.boundary_tolerance) && !tr.unresolved_time) {
            tr.unresolved_time = time;
        }
        if (cfg.field_stride > 0 && rows_since_field % cfg.field_stride == 0) {
            tr.fields.push_back({time, transform_backward(f)});
        }
        ++rows_since_field;
        pending_row = static_cast<long long>(tr.times.size()) - 1;
    };

    auto envelope = [&](double time, double l2) {
        const double v = (1.0 + time) * l2;
        if (v > tr.envelope_sup) {
            tr.envelope_sup = v;
            tr.envelope_sup_time = time;
        }
        return v;
    };

    envelope(0.0, std::sqrt(sum_norm(w)));
    record_row(0.0, 1);
    double last_flux = 0.0;
    try {
        for (long long n = 0; n < nsteps; ++n) {
            const double before = sum_norm(w);
            const double rate = engine.rhs(w, t, k1);
            const double need = std::ceil(cfg.dt * rate / cfg.cfl);
            if (!std::isfinite(need) || need > cfg.max_substeps) {
                throw NumericalBlowup("advective CFL needs more than " + std::to_string(cfg.max_substeps) +
                                          " substeps",
                                      t);
            }
            const int subs = std::max(1, static_cast<int>(need));
            const double h = cfg.dt / subs;
            for (int s = 0; s < subs; ++s) {
                const double ts = t + s * h;
                if (s > 0) engine.rhs(w, ts, k1);
                engine.lawson(w, ts, h, k1);
            }
            t = (n + 1) * cfg.dt;
            const double after = sum_norm(w);
            if (!std::isfinite(after)) throw NumericalBlowup("non-finite state", t);
            last_flux = (after - before) / cfg.dt;
            if (pending_row >= 0) {
                tr.enstrophy_flux[static_cast<std::size_t>(pending_row)] = last_flux;
                pending_row = -1;
            }
            const double env = envelope(t, std::sqrt(after));
            const bool last = n + 1 == nsteps;
            const bool stop_env = cfg.stop_envelope > 0.0 && env > cfg.stop_envelope;
            if ((n + 1) % cfg.snapshot_stride == 0 || last || stop_env) {
                record_row(t, subs);
                if (tr.unresolved_time && cfg.stop_when_unresolved) {
                    tr.stop_reason = "unresolved";
                    break;
                }
            }
            if (stop_env) {
                tr.stop_reason = "envelope";
                break;
            }
        }
    } catch (const NumericalBlowup& e) {
        tr.stop_reason = "failed";
        tr.failure = e.what();
        tr.failure_time = e.time();
    }
    if (pending_row >= 0) tr.enstrophy_flux[static_cast<std::size_t>(pending_row)] = last_flux;
    return tr;
}

ScalarField duhamel_linear_apply(const ScalarField& omega0, double t_phys, double nu, double rel_tol) {
    require_localized(omega0);
    const KernelParams params(nu, to_rescaled_time(t_phys, nu));
    const auto& g = omega0.grid();
    const int nx = g.nx(), ny = g.ny();
    const SpectralField c = transform_forward(omega0);

    double global = 0.0;
    for (const auto& v : c.modes()) global = std::max(global, std::abs(v));
    ScalarField out(g);
    if (global == 0.0) return out;

    const double tau = params.tau();
    const double drift = params.drift();
    const double sigma = std::sqrt(2.0 * tau);
    const double hwin = 12.0 * sigma;
    const double y_lo = -g.ly();
    const double y_hi = g.ly();
    const double base = std::numbers::pi / g.ly();

    // h(m, y_j) stored as [j * nx + i].
    fft::CVec h(g.size(), cplx(0.0, 0.0));
    for (int i = 0; i < nx; ++i) {
        const double k = g.kx(i);
        const double damp = std::exp(-k * k * tau * (1.0 + params.kappa()));
        double colsum = 0.0, colmax = 0.0;
        for (int j = 0; j < ny; ++j) {
            colsum += std::abs(c.at(i, j));
            colmax = std::max(colmax, std::abs(c.at(i, j)));
        }
        if (colmax * damp <= 1e-17 * global) continue;

        // Trigonometric interpolant of the column in y', evaluated by recurrence.
        auto column = [&](double yp) {
            const cplx step_phase(std::cos(base * yp), std::sin(base * yp));
            cplx z(std::cos(-base * (ny / 2) * yp), std::sin(-base * (ny / 2) * yp));
            cplx acc(0.0, 0.0);
            for (int n = -ny / 2; n < ny / 2; ++n) {
                acc += c.at(i, n >= 0 ? n : n + ny) * z;
                z *= step_phase;
            }
            return acc;
        };

        const double prefactor = 1.0 / std::sqrt(4.0 * std::numbers::pi * tau);
        const quad::Tolerance tol{1e-13 * colsum * damp, rel_tol, 20000};
        for (int j = 0; j < ny; ++j) {
            const double y = g.y(j);
            const double lo = std::max(y_lo, y - hwin);
            const double hi = std::min(y_hi, y + hwin);
            if (!(hi > lo)) continue;
            const auto pieces = quad::split_window(0.5 * (lo + hi), 0.5 * (hi - lo), 4);
            auto integrand = [&](double yp) {
                const double dy = y - yp;
                const double phase = -k * drift * (y + yp);
                return prefactor * std::exp(-dy * dy / (4.0 * tau)) * damp * cplx(std::cos(phase), std::sin(phase)) *
                       column(yp);
            };
            h[static_cast<std::size_t>(j) * nx + i] = quad::integrate_1d<cplx>(integrand, pieces, tol).value;
        }
    }
    // Back to samples along x: w(x_i, y_j) = A sum_m e^{i k x_i} h(m, j), e^{i k x_i} = (-1)^m e^{2 pi i m i / nx}.
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) h[static_cast<std::size_t>(j) * nx + i] *= (i & 1) ? -1.0 : 1.0;
    }
    fft::dft_rows(h, ny, nx, fft::Direction::backward);
    const double a = 1.0 / std::sqrt(4.0 * g.lx() * g.ly());
    for (std::size_t k = 0; k < h.size(); ++k) out.mutable_values()[k] = a * h[k].real();
    return out;
}

double relative_l2_error(const ScalarField& a, const ScalarField& b) {
    if (!(a.grid() == b.grid())) throw InvalidArgument("relative_l2_error: grid mismatch");
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < a.values().size(); ++k) {
        const double d = a.values()[k] - b.values()[k];
        num += d * d;
        den += b.values()[k] * b.values()[k];
    }
    if (den == 0.0) return num == 0.0 ? 0.0 : INFINITY;
    return std::sqrt(num / den);
}

}  // namespace shearlab
