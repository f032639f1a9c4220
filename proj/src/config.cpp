#include "shearlab/config.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <json.hpp>

#include "shearlab/error.hpp"

namespace shearlab {

using nlohmann::json;

namespace {

constexpr Subcommand kAll[] = {Subcommand::kernel_eval, Subcommand::kernel_norms, Subcommand::verify,
                               Subcommand::linear_demo, Subcommand::simulate,     Subcommand::threshold_scan};

[[noreturn]] void bad(const std::string& path, const std::string& what) {
    throw ConfigError("config " + path + ": " + what);
}

void convert(const json& v, double& dst, const std::string& path) {
    if (!v.is_number()) bad(path, "expected a number");
    dst = v.get<double>();
    if (!std::isfinite(dst)) bad(path, "expected a finite number");
}

void convert(const json& v, int& dst, const std::string& path) {
    if (!v.is_number_integer()) bad(path, "expected an integer");
    const auto x = v.get<long long>();
    if (x < -2147483647LL || x > 2147483647LL) bad(path, "integer out of range");
    dst = static_cast<int>(x);
}

void convert(const json& v, std::uint64_t& dst, const std::string& path) {
    if (v.is_number_unsigned()) {
        dst = v.get<std::uint64_t>();
    } else if (v.is_number_integer() && v.get<long long>() >= 0) {
        dst = static_cast<std::uint64_t>(v.get<long long>());
    } else {
        bad(path, "expected a non-negative integer");
    }
}

void convert(const json& v, bool& dst, const std::string& path) {
    if (!v.is_boolean()) bad(path, "expected true or false");
    dst = v.get<bool>();
}

void convert(const json& v, std::string& dst, const std::string& path) {
    if (!v.is_string()) bad(path, "expected a string");
    dst = v.get<std::string>();
}

template <class T, class Parse>
void convert_enum(const json& v, T& dst, const std::string& path, Parse parse) {
    std::string s;
    convert(v, s, path);
    try {
        dst = parse(s);
    } catch (const Error& e) {
        bad(path, e.what());
    }
}

void convert(const json& v, Slice& dst, const std::string& path) { convert_enum(v, dst, path, slice_from_string); }
void convert(const json& v, Derivative& dst, const std::string& path) {
    convert_enum(v, dst, path, derivative_from_string);
}
void convert(const json& v, Lemma& dst, const std::string& path) { convert_enum(v, dst, path, lemma_from_string); }
void convert(const json& v, DataShape& dst, const std::string& path) {
    convert_enum(v, dst, path, data_shape_from_string);
}

template <class T>
void convert(const json& v, std::vector<T>& dst, const std::string& path) {
    if (!v.is_array()) bad(path, "expected an array");
    std::vector<T> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) convert(v[i], out[i], path + "[" + std::to_string(i) + "]");
    dst = std::move(out);
}

// Reads known keys of one object and rejects the rest.
class Section {
public:
    Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) bad(path_, "expected an object");
    }

    template <class T>
    void get(const std::string& key, T& dst) {
        seen_.insert(key);
        const auto it = j_.find(key);
        if (it != j_.end()) convert(*it, dst, path_ + "." + key);
    }

    const json* child(const std::string& key) {
        seen_.insert(key);
        const auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    void finish() const {
        for (const auto& item : j_.items()) {
            if (!seen_.count(item.key())) bad(path_ + "." + item.key(), "unknown key");
        }
    }

    const std::string& path() const noexcept { return path_; }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

void read_sim(Section& s, SimConfig& c) {
    int nx = c.grid.nx(), ny = c.grid.ny();
    double lx = c.grid.lx(), ly = c.grid.ly();
    s.get("nu", c.nu);
    s.get("nx", nx);
    s.get("ny", ny);
    s.get("lx", lx);
    s.get("ly", ly);
    s.get("t_end", c.t_end);
    s.get("dt", c.dt);
    s.get("eps", c.eps);
    s.get("shape", c.shape);
    s.get("width", c.width);
    s.get("dealias", c.dealias);
    s.get("nonlinear", c.nonlinear);
    s.get("shear", c.shear);
    s.get("snapshot_stride", c.snapshot_stride);
    s.get("field_stride", c.field_stride);
    s.get("cfl", c.cfl);
    s.get("max_substeps", c.max_substeps);
    s.get("tail_tolerance", c.tail_tolerance);
    s.get("boundary_tolerance", c.boundary_tolerance);
    s.get("stop_when_unresolved", c.stop_when_unresolved);
    s.get("stop_envelope", c.stop_envelope);
    try {
        c.grid = GridSpec(nx, ny, lx, ly);
    } catch (const Error& e) {
        bad(s.path(), e.what());
    }
}

json sim_json(const SimConfig& c) {
    return json{{"nu", c.nu},
                {"nx", c.grid.nx()},
                {"ny", c.grid.ny()},
                {"lx", c.grid.lx()},
                {"ly", c.grid.ly()},
                {"t_end", c.t_end},
                {"dt", c.dt},
                {"eps", c.eps},
                {"shape", std::string(to_string(c.shape))},
                {"width", c.width},
                {"dealias", c.dealias},
                {"nonlinear", c.nonlinear},
                {"shear", c.shear},
                {"snapshot_stride", c.snapshot_stride},
                {"field_stride", c.field_stride},
                {"cfl", c.cfl},
                {"max_substeps", c.max_substeps},
                {"tail_tolerance", c.tail_tolerance},
                {"boundary_tolerance", c.boundary_tolerance},
                {"stop_when_unresolved", c.stop_when_unresolved},
                {"stop_envelope", c.stop_envelope}};
}

template <class T>
json names(const std::vector<T>& v) {
    json a = json::array();
    for (const auto& x : v) a.push_back(std::string(to_string(x)));
    return a;
}

void check_sim(const SimConfig& c, const std::string& path) {
    try {
        c.validate();
    } catch (const ConfigError& e) {
        bad(path, e.what());
    }
}

void require_positive(const std::vector<double>& v, const std::string& path) {
    for (double x : v) {
        if (!(x > 0.0)) bad(path, "values must be > 0");
    }
}

void require_exponents(const std::vector<double>& v, const std::string& path) {
    for (double x : v) {
        if (!(x >= 1.0)) bad(path, "exponents must be >= 1");
    }
}

void require_window(double lo, double hi, const std::string& path) {
    if (!(lo >= 0.0) || !(hi > lo)) bad(path, "fit window needs 0 <= fit_lo < fit_hi");
}

void read_section(RunConfig& r, Section& s) {
    const std::string p = s.path();
    switch (r.subcommand) {
        case Subcommand::kernel_eval: {
            auto& c = r.kernel_eval;
            s.get("nu", c.nu);
            s.get("tau", c.tau);
            s.get("x", c.x);
            s.get("y", c.y);
            s.get("y_prime", c.y_prime);
            require_positive(c.nu, p + ".nu");
            require_positive(c.tau, p + ".tau");
            break;
        }
        case Subcommand::kernel_norms: {
            auto& c = r.kernel_norms;
            s.get("nu", c.nu);
            s.get("tau_over_nu", c.tau_over_nu);
            s.get("p", c.p);
            s.get("slices", c.slices);
            s.get("derivatives", c.derivatives);
            require_positive(c.nu, p + ".nu");
            require_positive(c.tau_over_nu, p + ".tau_over_nu");
            require_exponents(c.p, p + ".p");
            break;
        }
        case Subcommand::verify: {
            auto& c = r.verify;
            s.get("lemmas", c.lemmas);
            s.get("p", c.p);
            s.get("nu", c.nu);
            s.get("tau_over_nu", c.tau_over_nu);
            s.get("slices", c.slices);
            s.get("tau_shift", c.tau_shift);
            s.get("large_regime", c.large_regime);
            s.get("small_regime", c.small_regime);
            s.get("slope_tolerance", c.slope_tolerance);
            s.get("closed_form_tolerance", c.closed_form_tolerance);
            s.get("slice_tolerance", c.slice_tolerance);
            require_positive(c.nu, p + ".nu");
            require_positive(c.tau_over_nu, p + ".tau_over_nu");
            require_exponents(c.p, p + ".p");
            if (c.lemmas.empty()) bad(p + ".lemmas", "at least one lemma is required");
            if (c.slices.empty()) bad(p + ".slices", "at least one slice is required");
            if (!(c.small_regime > 0.0) || !(c.large_regime > c.small_regime)) {
                bad(p, "need 0 < small_regime < large_regime");
            }
            if (!(c.slope_tolerance > 0.0) || !(c.closed_form_tolerance > 0.0) || !(c.slice_tolerance > 0.0)) {
                bad(p, "tolerances must be > 0");
            }
            break;
        }
        case Subcommand::linear_demo: {
            auto& c = r.linear_demo;
            if (const json* run = s.child("run")) {
                Section rs(*run, p + ".run");
                read_sim(rs, c.run);
                rs.finish();
            }
            s.get("nu", c.nu);
            s.get("fit_lo", c.fit_lo);
            s.get("fit_hi", c.fit_hi);
            s.get("width_factor", c.width_factor);
            require_positive(c.nu, p + ".nu");
            require_window(c.fit_lo, c.fit_hi, p);
            if (!(c.width_factor >= 0.0)) bad(p + ".width_factor", "must be >= 0");
            for (double nu : c.nu) {
                SimConfig t = c.run;
                t.nu = nu;
                check_sim(t, p + ".run");
            }
            break;
        }
        case Subcommand::simulate: {
            auto& c = r.simulate;
            if (const json* run = s.child("run")) {
                Section rs(*run, p + ".run");
                read_sim(rs, c.run);
                rs.finish();
            }
            s.get("fit_lo", c.fit_lo);
            s.get("fit_hi", c.fit_hi);
            s.get("delta", c.delta);
            s.get("write_snapshots", c.write_snapshots);
            check_sim(c.run, p + ".run");
            if (!(c.delta >= 0.0)) bad(p + ".delta", "must be >= 0");
            if (!(c.fit_lo >= 0.0)) bad(p + ".fit_lo", "must be >= 0");
            break;
        }
        case Subcommand::threshold_scan: {
            auto& c = r.threshold_scan;
            if (const json* runs = s.child("runs")) {
                if (!runs->is_array()) bad(p + ".runs", "expected an array");
                c.runs.clear();
                for (std::size_t i = 0; i < runs->size(); ++i) {
                    SimConfig t;
                    Section rs((*runs)[i], p + ".runs[" + std::to_string(i) + "]");
                    read_sim(rs, t);
                    rs.finish();
                    c.runs.push_back(t);
                }
            }
            s.get("c_list", c.c_list);
            s.get("delta", c.delta);
            s.get("horizon", c.horizon);
            s.get("bisect_ratio", c.bisect_ratio);
            s.get("bootstrap_samples", c.bootstrap_samples);
            s.get("cache", c.cache);
            if (c.runs.empty()) bad(p + ".runs", "at least one run is required");
            if (c.c_list.empty()) bad(p + ".c_list", "at least one amplitude is required");
            require_positive(c.c_list, p + ".c_list");
            for (std::size_t i = 1; i < c.c_list.size(); ++i) {
                if (!(c.c_list[i] > c.c_list[i - 1])) bad(p + ".c_list", "must be strictly increasing");
            }
            if (!(c.delta >= 0.0)) bad(p + ".delta", "must be >= 0");
            if (!(c.horizon > 0.0)) bad(p + ".horizon", "must be > 0");
            if (!(c.bisect_ratio > 1.0)) bad(p + ".bisect_ratio", "must be > 1");
            if (c.bootstrap_samples < 0) bad(p + ".bootstrap_samples", "must be >= 0");
            for (std::size_t i = 0; i < c.runs.size(); ++i) {
                SimConfig t = c.runs[i];
                t.t_end = c.horizon;
                check_sim(t, p + ".runs[" + std::to_string(i) + "]");
            }
            break;
        }
    }
}

json section_json(const RunConfig& r) {
    switch (r.subcommand) {
        case Subcommand::kernel_eval: {
            const auto& c = r.kernel_eval;
            return json{{"nu", c.nu}, {"tau", c.tau}, {"x", c.x}, {"y", c.y}, {"y_prime", c.y_prime}};
        }
        case Subcommand::kernel_norms: {
            const auto& c = r.kernel_norms;
            return json{{"nu", c.nu},
                        {"tau_over_nu", c.tau_over_nu},
                        {"p", c.p},
                        {"slices", names(c.slices)},
                        {"derivatives", names(c.derivatives)}};
        }
        case Subcommand::verify: {
            const auto& c = r.verify;
            return json{{"lemmas", names(c.lemmas)},
                        {"p", c.p},
                        {"nu", c.nu},
                        {"tau_over_nu", c.tau_over_nu},
                        {"slices", names(c.slices)},
                        {"tau_shift", c.tau_shift},
                        {"large_regime", c.large_regime},
                        {"small_regime", c.small_regime},
                        {"slope_tolerance", c.slope_tolerance},
                        {"closed_form_tolerance", c.closed_form_tolerance},
                        {"slice_tolerance", c.slice_tolerance}};
        }
        case Subcommand::linear_demo: {
            const auto& c = r.linear_demo;
            return json{{"run", sim_json(c.run)},
                        {"nu", c.nu},
                        {"fit_lo", c.fit_lo},
                        {"fit_hi", c.fit_hi},
                        {"width_factor", c.width_factor}};
        }
        case Subcommand::simulate: {
            const auto& c = r.simulate;
            return json{{"run", sim_json(c.run)},
                        {"fit_lo", c.fit_lo},
                        {"fit_hi", c.fit_hi},
                        {"delta", c.delta},
                        {"write_snapshots", c.write_snapshots}};
        }
        case Subcommand::threshold_scan: {
            const auto& c = r.threshold_scan;
            json runs = json::array();
            for (const auto& t : c.runs) runs.push_back(sim_json(t));
            return json{{"runs", runs},
                        {"c_list", c.c_list},
                        {"delta", c.delta},
                        {"horizon", c.horizon},
                        {"bisect_ratio", c.bisect_ratio},
                        {"bootstrap_samples", c.bootstrap_samples},
                        {"cache", c.cache}};
        }
    }
    return json::object();
}

SimConfig scan_template(double nu, int nx, double lx, double ly) {
    SimConfig c;
    c.nu = nu;
    c.grid = GridSpec(nx, 128, lx, ly);
    c.t_end = 50.0;
    c.dt = 0.1;
    c.shape = DataShape::gaussian;
    c.width = 1.0;
    c.snapshot_stride = 5;
    return c;
}

}  // namespace

VerifyConfig::VerifyConfig() {
    for (int k = -4; k <= 8; ++k) tau_over_nu.push_back(std::pow(10.0, k / 2.0));
}

LinearDemoConfig::LinearDemoConfig() {
    run.nu = 1e-2;
    run.grid = GridSpec(8192, 512, 192.0, 12.0);
    run.t_end = 50.0;
    run.dt = 0.1;
    run.eps = 1.0;
    run.nonlinear = false;
    run.dealias = false;
    run.shape = DataShape::gaussian;
    run.snapshot_stride = 2;
}

ThresholdScanConfig::ThresholdScanConfig() {
    runs.push_back(scan_template(1e-2, 2048, 180.0, 10.0));
    runs.push_back(scan_template(3e-3, 1024, 100.0, 8.0));
    runs.push_back(scan_template(1e-3, 512, 60.0, 8.0));
}

std::string_view to_string(Subcommand s) {
    switch (s) {
        case Subcommand::kernel_eval: return "kernel-eval";
        case Subcommand::kernel_norms: return "kernel-norms";
        case Subcommand::verify: return "verify";
        case Subcommand::linear_demo: return "linear-demo";
        case Subcommand::simulate: return "simulate";
        case Subcommand::threshold_scan: return "threshold-scan";
    }
    return "?";
}

std::string_view section_key(Subcommand s) {
    switch (s) {
        case Subcommand::kernel_eval: return "kernel_eval";
        case Subcommand::kernel_norms: return "kernel_norms";
        case Subcommand::verify: return "verify";
        case Subcommand::linear_demo: return "linear_demo";
        case Subcommand::simulate: return "simulate";
        case Subcommand::threshold_scan: return "threshold_scan";
    }
    return "?";
}

Subcommand subcommand_from_string(std::string_view s) {
    for (Subcommand c : kAll) {
        if (s == to_string(c)) return c;
    }
    throw InvalidArgument("unknown subcommand '" + std::string(s) + "'");
}

RunConfig default_run_config(Subcommand s) {
    RunConfig r;
    r.subcommand = s;
    return r;
}

RunConfig parse_run_config(Subcommand sub, std::string_view text) {
    RunConfig r = default_run_config(sub);
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: malformed JSON: ") + e.what());
    }
    Section top(j, "");
    top.get("seed", r.seed);
    top.get("jobs", r.jobs);
    if (r.jobs < 1) bad(".jobs", "must be >= 1");
    const std::string key(section_key(sub));
    if (const json* sec = top.child(key)) {
        Section s(*sec, "." + key);
        read_section(r, s);
        s.finish();
    }
    top.finish();
    propagate_seed(r);
    return r;
}

std::string dump_run_config(const RunConfig& cfg) {
    json j{{"seed", cfg.seed}, {"jobs", cfg.jobs}, {std::string(section_key(cfg.subcommand)), section_json(cfg)}};
    return j.dump(2) + "\n";
}

void propagate_seed(RunConfig& cfg) {
    cfg.linear_demo.run.seed = cfg.seed;
    cfg.simulate.run.seed = cfg.seed;
    for (auto& t : cfg.threshold_scan.runs) t.seed = cfg.seed;
}

}  // namespace shearlab
