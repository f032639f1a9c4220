#include "shearlab/scan.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "shearlab/csv.hpp"
#include "shearlab/diagnostics.hpp"
#include "shearlab/error.hpp"
#include "shearlab/norms.hpp"
#include "shearlab/parallel.hpp"

namespace shearlab {

using nlohmann::json;

double calibrate_delta(SimConfig cfg) {
    cfg.nonlinear = false;
    if (!(cfg.eps > 0.0)) cfg.eps = 1.0;
    cfg.stop_envelope = 0.0;
    cfg.stop_when_unresolved = false;
    cfg.field_stride = 0;
    const Trajectory tr = simulate(cfg);
    if (tr.failure) throw Error("calibrate_delta: linear run failed: " + *tr.failure);
    return 2.0 * tr.envelope_sup / cfg.eps;
}

ScanCell run_scan_cell(const SimConfig& base, double c, double delta, double horizon) {
    if (!(c > 0.0) || !(delta > 0.0)) throw InvalidArgument("run_scan_cell: c and delta must be > 0");
    SimConfig cfg = base;
    cfg.nonlinear = true;
    cfg.eps = c * std::pow(cfg.nu, 0.75);
    cfg.t_end = horizon;
    cfg.stop_envelope = delta * cfg.eps;
    cfg.stop_when_unresolved = true;
    cfg.field_stride = 0;
    const Trajectory tr = simulate(cfg);

    ScanCell cell;
    cell.nu = cfg.nu;
    cell.c = c;
    cell.eps = cfg.eps;
    cell.envelope_sup = tr.envelope_sup;
    cell.unresolved_time = tr.unresolved_time;
    cell.max_tail_ratio = tr.max_tail_ratio;
    cell.stop_reason = tr.stop_reason;
    const BootstrapReport rep = bootstrap_audit(tr, cfg.eps, delta);
    if (tr.stop_reason == "envelope") {
        cell.outcome = "unstable";
        cell.violation_time = rep.first_violation ? rep.first_violation : std::optional<double>(tr.times.back());
    } else if (tr.stop_reason == "horizon" && tr.resolved()) {
        cell.outcome = rep.hypothesis_ok ? "stable" : "unstable";
        cell.violation_time = rep.first_violation;
    } else {
        cell.outcome = "excluded";
    }
    return cell;
}

namespace {

json cell_key(const SimConfig& cfg, double c, double delta, double horizon) {
    return json{{"nu", cfg.nu},
                {"c", c},
                {"delta", delta},
                {"horizon", horizon},
                {"nx", cfg.grid.nx()},
                {"ny", cfg.grid.ny()},
                {"lx", cfg.grid.lx()},
                {"ly", cfg.grid.ly()},
                {"dt", cfg.dt},
                {"shape", std::string(to_string(cfg.shape))},
                {"width", cfg.width},
                {"seed", cfg.seed},
                {"dealias", cfg.dealias},
                {"shear", cfg.shear},
                {"snapshot_stride", cfg.snapshot_stride},
                {"cfl", cfg.cfl},
                {"tail_tolerance", cfg.tail_tolerance},
                {"boundary_tolerance", cfg.boundary_tolerance}};
}

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> opt_from(const json& j) {
    if (j.is_null()) return std::nullopt;
    return j.get<double>();
}

json cell_to_json(const ScanCell& c) {
    return json{{"nu", c.nu},
                {"c", c.c},
                {"eps", c.eps},
                {"outcome", c.outcome},
                {"envelope_sup", c.envelope_sup},
                {"violation_time", opt(c.violation_time)},
                {"unresolved_time", opt(c.unresolved_time)},
                {"max_tail_ratio", c.max_tail_ratio},
                {"stop_reason", c.stop_reason}};
}

ScanCell cell_from_json(const json& j) {
    ScanCell c;
    c.nu = j.at("nu").get<double>();
    c.c = j.at("c").get<double>();
    c.eps = j.at("eps").get<double>();
    c.outcome = j.at("outcome").get<std::string>();
    c.envelope_sup = j.at("envelope_sup").get<double>();
    c.violation_time = opt_from(j.at("violation_time"));
    c.unresolved_time = opt_from(j.at("unresolved_time"));
    c.max_tail_ratio = j.at("max_tail_ratio").get<double>();
    c.stop_reason = j.at("stop_reason").get<std::string>();
    return c;
}

ScanCell cached_cell(const ScanOptions& o, const SimConfig& cfg, double c) {
    const json key = cell_key(cfg, c, o.delta, o.horizon);
    std::filesystem::path file;
    if (!o.cache_dir.empty()) {
        file = o.cache_dir / ("nu_" + csv::format(cfg.nu) + "_c_" + csv::format(c) + ".json");
        std::ifstream is(file);
        if (is) {
            try {
                const json stored = json::parse(is);
                if (stored.at("key") == key) return cell_from_json(stored.at("cell"));
            } catch (const std::exception&) {
                // unreadable or stale entry: recompute
            }
        }
    }
    const ScanCell cell = run_scan_cell(cfg, c, o.delta, o.horizon);
    if (!file.empty()) {
        const json stored{{"key", key}, {"cell", cell_to_json(cell)}};
        csv::write_atomic(file, stored.dump(2) + "\n");
    }
    return cell;
}

ScanNuResult scan_one(const ScanOptions& o, const SimConfig& cfg) {
    ScanNuResult r;
    r.nu = cfg.nu;
    const double scale = std::pow(cfg.nu, 0.75);
    auto eval = [&](double c) -> const ScanCell& {
        r.cells.push_back(cached_cell(o, cfg, c));
        return r.cells.back();
    };
    const auto& cs = o.c_list;
    const int n = static_cast<int>(cs.size());

    int lo = -1;
    int hi = n;
    std::string hi_outcome;
    {
        const ScanCell first = eval(cs[0]);
        if (first.outcome == "stable") {
            lo = 0;
        } else {
            hi = 0;
            hi_outcome = first.outcome;
        }
    }
    if (lo == 0 && n > 1) {
        const ScanCell last = eval(cs[n - 1]);
        if (last.outcome == "stable") {
            lo = n - 1;
        } else {
            hi = n - 1;
            hi_outcome = last.outcome;
        }
    }
    while (lo >= 0 && hi < n && hi - lo > 1) {
        const int mid = (lo + hi) / 2;
        const ScanCell cell = eval(cs[mid]);
        if (cell.outcome == "stable") {
            lo = mid;
        } else {
            hi = mid;
            hi_outcome = cell.outcome;
        }
    }
    if (lo >= 0 && hi < n) {
        double cl = cs[lo];
        double ch = cs[hi];
        while (ch / cl > o.bisect_ratio) {
            const double cm = std::sqrt(cl * ch);
            const ScanCell cell = eval(cm);
            if (cell.outcome == "stable") {
                cl = cm;
            } else {
                ch = cm;
                hi_outcome = cell.outcome;
            }
        }
        r.stable = cl * scale;
        r.unstable = ch * scale;
        r.resolution_limited = hi_outcome == "excluded";
        r.eps_star = r.stable;
    } else if (lo >= 0) {
        r.stable = cs[lo] * scale;
        r.censored_high = true;
        r.eps_star = r.stable;
    } else {
        r.censored_low = true;
        r.unstable = cs[0] * scale;
        r.resolution_limited = hi_outcome == "excluded";
    }
    return r;
}

}  // namespace

GammaFit fit_gamma(const std::vector<double>& nu, const std::vector<double>& eps_star, int samples,
                   std::uint64_t seed) {
    GammaFit out;
    if (nu.size() != eps_star.size()) throw InvalidArgument("fit_gamma: size mismatch");
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < nu.size(); ++i) {
        lx.push_back(std::log(nu[i]));
        ly.push_back(std::log(eps_star[i]));
    }
    const bool distinct = std::adjacent_find(lx.begin(), lx.end(), std::not_equal_to<>()) != lx.end();
    if (lx.size() < 2 || !distinct) return out;
    out.slope = least_squares_slope(lx, ly);
    if (samples <= 0) return out;
    std::mt19937_64 rng(seed);
    std::vector<double> slopes;
    const std::size_t m = lx.size();
    for (int b = 0; b < samples; ++b) {
        std::vector<double> bx, by;
        for (std::size_t k = 0; k < m; ++k) {
            const std::size_t pick = static_cast<std::size_t>(rng() % m);
            bx.push_back(lx[pick]);
            by.push_back(ly[pick]);
        }
        if (std::adjacent_find(bx.begin(), bx.end(), std::not_equal_to<>()) == bx.end()) continue;
        slopes.push_back(least_squares_slope(bx, by));
    }
    if (slopes.empty()) return out;
    std::sort(slopes.begin(), slopes.end());
    auto quantile = [&](double q) {
        const double pos = q * (slopes.size() - 1);
        const auto i = static_cast<std::size_t>(std::floor(pos));
        const auto j = std::min(i + 1, slopes.size() - 1);
        return slopes[i] + (pos - i) * (slopes[j] - slopes[i]);
    };
    out.lo = quantile(0.025);
    out.hi = quantile(0.975);
    return out;
}

ThresholdScanResult threshold_scan(const ScanOptions& o) {
    if (o.configs.empty()) throw InvalidArgument("threshold_scan: empty nu list");
    if (o.c_list.empty()) throw InvalidArgument("threshold_scan: empty amplitude list");
    if (!std::is_sorted(o.c_list.begin(), o.c_list.end()) ||
        std::adjacent_find(o.c_list.begin(), o.c_list.end()) != o.c_list.end() || !(o.c_list.front() > 0.0)) {
        throw InvalidArgument("threshold_scan: c_list must be positive and strictly increasing");
    }
    if (!(o.delta > 0.0)) throw InvalidArgument("threshold_scan: delta must be > 0");
    if (!(o.horizon > 0.0)) throw InvalidArgument("threshold_scan: horizon must be > 0");
    if (!(o.bisect_ratio > 1.0)) throw InvalidArgument("threshold_scan: bisect_ratio must be > 1");
    for (const auto& c : o.configs) c.validate();
    if (!o.cache_dir.empty()) std::filesystem::create_directories(o.cache_dir);

    ThresholdScanResult res;
    res.delta = o.delta;
    res.horizon = o.horizon;
    res.per_nu.resize(o.configs.size());
    parallel_for(o.configs.size(), o.jobs, [&](std::size_t i) { res.per_nu[i] = scan_one(o, o.configs[i]); });

    std::vector<double> nus, stars;
    for (const auto& r : res.per_nu) {
        if (r.censored_high || r.censored_low || r.resolution_limited) res.gamma_censored = true;
        if (r.eps_star) {
            nus.push_back(r.nu);
            stars.push_back(*r.eps_star);
        }
    }
    const GammaFit g = fit_gamma(nus, stars, o.bootstrap_samples, o.seed);
    res.gamma_fit = g.slope;
    res.gamma_lo = g.lo;
    res.gamma_hi = g.hi;
    return res;
}

std::optional<double> calibrate_c0(const ThresholdScanResult& scan) {
    std::optional<double> best;
    for (const auto& r : scan.per_nu) {
        if (!r.eps_star) continue;
        const double c = *r.eps_star / std::pow(r.nu, 0.75);
        if (!best || c < *best) best = c;
    }
    if (best) *best *= 0.5;
    return best;
}

}  // namespace shearlab
