#include "qkin/config.hpp"

#include <fstream>

#include "qkin/errors.hpp"

namespace qkin {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw config_error("config error at " + path + ": " + what);
}

const json& need(const json& j, const std::string& path, const char* key) {
    if (!j.contains(key)) fail(path + "." + key, "missing required field");
    return j.at(key);
}

double need_num(const json& j, const std::string& path, const char* key) {
    const json& v = need(j, path, key);
    if (!v.is_number()) fail(path + "." + key, "expected a number");
    return v.get<double>();
}

double opt_num(const json& j, const std::string& path, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number()) fail(path + "." + key, "expected a number");
    return j.at(key).get<double>();
}

int opt_int(const json& j, const std::string& path, const char* key, int fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number_integer()) fail(path + "." + key, "expected an integer");
    return j.at(key).get<int>();
}

bool opt_bool(const json& j, const std::string& path, const char* key, bool fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_boolean()) fail(path + "." + key, "expected a boolean");
    return j.at(key).get<bool>();
}

std::string need_str(const json& j, const std::string& path, const char* key) {
    const json& v = need(j, path, key);
    if (!v.is_string()) fail(path + "." + key, "expected a string");
    return v.get<std::string>();
}

std::vector<double> num_array(const json& v, const std::string& path) {
    if (!v.is_array()) fail(path, "expected an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
        if (!e.is_number()) fail(path, "expected an array of numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

PhysicalParams parse_physical(const json& j) {
    const std::string p = "physical";
    try {
        return PhysicalParams(need_num(j, p, "mass"), need_num(j, p, "hbar"),
                              need_num(j, p, "temperature"), need_num(j, p, "spreading_width"),
                              need_num(j, p, "correlation_length"));
    } catch (const std::invalid_argument& e) {
        fail(p, e.what());
    }
}

Correlator parse_correlator(const json& j, const std::string& p) {
    const std::string family = need_str(j, p, "family");
    try {
        if (family == "gaussian") return Correlator::gaussian();
        if (family == "quadratic-truncated") return Correlator::quadratic_truncated();
        if (family == "levy") {
            const double alpha = need_num(j, p, "alpha");
            const std::string completion =
                j.contains("completion") ? j.at("completion").get<std::string>() : "clamped";
            if (completion == "clamped") return Correlator::levy(alpha);
            if (completion == "exponential") return Correlator::levy_exponential(alpha);
            fail(p + ".completion", "expected 'clamped' or 'exponential'");
        }
        if (family == "tabulated") {
            auto x = num_array(need(j, p, "x"), p + ".x");
            auto g = num_array(need(j, p, "g"), p + ".g");
            return Correlator::tabulated(std::move(x), std::move(g));
        }
    } catch (const config_error&) {
        throw;
    } catch (const std::exception& e) {
        fail(p, e.what());
    }
    fail(p + ".family", "unknown family '" + family + "'");
}

Potential parse_potential(const json& j, const std::string& p) {
    const std::string kind = need_str(j, p, "kind");
    try {
        if (kind == "free") return Potential::free();
        if (kind == "linear") return Potential::linear(need_num(j, p, "slope"));
        if (kind == "harmonic") return Potential::harmonic(need_num(j, p, "stiffness"));
        if (kind == "parabolic-barrier")
            return Potential::parabolic_barrier(need_num(j, p, "curvature"));
        if (kind == "double-well")
            return Potential::double_well(need_num(j, p, "a"), need_num(j, p, "b"));
        if (kind == "tabulated") {
            auto q = num_array(need(j, p, "q"), p + ".q");
            auto u = num_array(need(j, p, "u"), p + ".u");
            return Potential::tabulated(std::move(q), std::move(u));
        }
    } catch (const config_error&) {
        throw;
    } catch (const std::exception& e) {
        fail(p, e.what());
    }
    fail(p + ".kind", "unknown kind '" + kind + "'");
}

GridConfig parse_grid(const json& j) {
    const std::string p = "grid";
    GridConfig g;
    g.nr = opt_int(j, p, "nr", g.nr);
    g.ns = opt_int(j, p, "ns", g.ns);
    g.r_extent = need_num(j, p, "r_extent");
    g.s_extent = need_num(j, p, "s_extent");
    if (g.nr < 2 || (g.nr & (g.nr - 1)) != 0) fail(p + ".nr", "must be a power of two");
    if (g.ns < 2 || (g.ns & (g.ns - 1)) != 0) fail(p + ".ns", "must be a power of two");
    return g;
}

InitialStateConfig parse_initial_state(const json& j) {
    const std::string p = "initial_state";
    InitialStateConfig s;
    s.type = j.contains("type") ? j.at("type").get<std::string>() : "gaussian";
    if (s.type != "gaussian" && s.type != "thermal-gaussian")
        fail(p + ".type", "expected 'gaussian' or 'thermal-gaussian'");
    s.center = opt_num(j, p, "center", 0.0);
    s.sigma_q = need_num(j, p, "sigma_q");
    s.momentum = opt_num(j, p, "momentum", 0.0);
    s.sigma_p = opt_num(j, p, "sigma_p", 0.0);
    if (s.type == "thermal-gaussian" && !(s.sigma_p > 0.0))
        fail(p + ".sigma_p", "thermal-gaussian requires sigma_p > 0");
    return s;
}

SolverOptions parse_solver(const json& j) {
    const std::string p = "solver";
    SolverOptions o;
    o.dt = need_num(j, p, "dt");
    o.n_steps = opt_int(j, p, "n_steps", 1);
    o.snapshot_stride = opt_int(j, p, "snapshot_stride", 1);
    const std::string scheme =
        j.contains("scheme") ? j.at("scheme").get<std::string>() : "strang-split";
    if (scheme == "strang-split")
        o.scheme = Scheme::StrangSplit;
    else if (scheme == "rk4-spectral")
        o.scheme = Scheme::Rk4Spectral;
    else
        fail(p + ".scheme", "expected 'strang-split' or 'rk4-spectral'");
    o.dealias = opt_bool(j, p, "dealias", false);
    o.trace_tol = opt_num(j, p, "trace_tol", 1e-6);
    o.herm_tol = opt_num(j, p, "herm_tol", 1e-6);
    o.disable_kinetic = opt_bool(j, p, "disable_kinetic", false);
    o.disable_friction = opt_bool(j, p, "disable_friction", false);
    o.absorbing_mask = opt_bool(j, p, "absorbing_mask", false);
    o.absorb_width_frac = opt_num(j, p, "absorb_width_frac", 0.1);
    o.positivity_monitor = opt_bool(j, p, "positivity_monitor", false);
    o.positivity_dim = opt_int(j, p, "positivity_dim", 32);
    try {
        o.validate();
    } catch (const std::invalid_argument& e) {
        fail(p, e.what());
    }
    return o;
}

LangevinConfig parse_langevin(const json& j) {
    const std::string p = "langevin";
    LangevinConfig c;
    c.n_walkers = opt_int(j, p, "n_walkers", c.n_walkers);
    c.dt = need_num(j, p, "dt");
    c.n_steps = opt_int(j, p, "n_steps", c.n_steps);
    c.record_stride = opt_int(j, p, "record_stride", c.record_stride);
    c.q_mean = opt_num(j, p, "q_mean", 0.0);
    c.q_sigma = opt_num(j, p, "q_sigma", 1.0);
    c.p_mean = opt_num(j, p, "p_mean", 0.0);
    c.p_sigma = opt_num(j, p, "p_sigma", 0.0);
    if (c.n_walkers < 1) fail(p + ".n_walkers", "must be >= 1");
    if (c.n_steps < 1) fail(p + ".n_steps", "must be >= 1");
    if (c.record_stride < 1) fail(p + ".record_stride", "must be >= 1");
    return c;
}

RmtConfig parse_rmt(const json& j) {
    const std::string p = "rmt";
    RmtConfig c;
    c.ensemble.dimension = opt_int(j, p, "dimension", 2);
    const std::string class_name = need_str(j, p, "symmetry");
    if (class_name == "GOE")
        c.ensemble.symmetry = SymmetryClass::GOE;
    else if (class_name == "GUE")
        c.ensemble.symmetry = SymmetryClass::GUE;
    else if (class_name == "GSE")
        c.ensemble.symmetry = SymmetryClass::GSE;
    else
        fail(p + ".symmetry", "expected GOE, GUE or GSE");
    c.ensemble.rho0 = need_num(j, p, "rho0");
    c.ensemble.beta = need_num(j, p, "beta");
    c.ensemble.kappa0 = need_num(j, p, "kappa0");
    c.ensemble.spreading_width = need_num(j, p, "spreading_width");
    c.ensemble.correlation_length = need_num(j, p, "correlation_length");
    c.ensemble.x_points = num_array(need(j, p, "x_points"), p + ".x_points");
    if (j.contains("correlator"))
        c.ensemble.correlator = parse_correlator(j.at("correlator"), p + ".correlator");
    c.n_samples = opt_int(j, p, "n_samples", 100);
    c.audit.n_law_entries = opt_int(j, p, "n_law_entries", c.audit.n_law_entries);
    c.audit.n_zero_entries = opt_int(j, p, "n_zero_entries", c.audit.n_zero_entries);
    c.audit.audit_seed =
        static_cast<std::uint64_t>(opt_num(j, p, "audit_seed", 0xa0d17));
    c.audit.max_index = opt_int(j, p, "max_index", 0);
    c.export_first_sample = opt_bool(j, p, "export_first_sample", false);
    try {
        c.ensemble.validate();
    } catch (const std::invalid_argument& e) {
        fail(p, e.what());
    }
    return c;
}

ObservablesConfig parse_observables(const json& j) {
    const std::string p = "observables";
    ObservablesConfig o;
    o.max_order = opt_int(j, p, "max_order", 4);
    o.fit_t_lo = opt_num(j, p, "fit_t_lo", 0.0);
    o.fit_t_hi = opt_num(j, p, "fit_t_hi", 0.0);
    if (j.contains("snapshot_times"))
        o.snapshot_times = num_array(j.at("snapshot_times"), p + ".snapshot_times");
    o.emit_snapshots = opt_bool(j, p, "emit_snapshots", true);
    o.emit_wigner_slice = opt_bool(j, p, "emit_wigner_slice", false);
    o.tail_diagnostics = opt_bool(j, p, "tail_diagnostics", false);
    if (o.max_order < 1 || o.max_order > 8) fail(p + ".max_order", "must be in [1, 8]");
    return o;
}

}  // namespace

std::string to_string(JobKind k) {
    switch (k) {
        case JobKind::Evolve: return "evolve";
        case JobKind::FreeAnalytic: return "free-analytic";
        case JobKind::Decoherence: return "decoherence";
        case JobKind::Langevin: return "langevin";
        case JobKind::RmtVerify: return "rmt-verify";
        case JobKind::Compare: return "compare";
    }
    return "?";
}

std::uint64_t fnv1a_hash(const std::string& text) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

RunConfig parse_config(const json& j) {
    if (!j.is_object()) throw config_error("config error at <root>: expected an object");
    RunConfig cfg;

    const std::string job = need_str(j, "<root>", "job");
    if (job == "evolve")
        cfg.job = JobKind::Evolve;
    else if (job == "free-analytic")
        cfg.job = JobKind::FreeAnalytic;
    else if (job == "decoherence")
        cfg.job = JobKind::Decoherence;
    else if (job == "langevin")
        cfg.job = JobKind::Langevin;
    else if (job == "rmt-verify")
        cfg.job = JobKind::RmtVerify;
    else if (job == "compare")
        cfg.job = JobKind::Compare;
    else
        fail("job", "unknown job kind '" + job + "'");

    if (j.contains("seed")) {
        if (!j.at("seed").is_number_unsigned() && !j.at("seed").is_number_integer())
            fail("seed", "expected an unsigned integer");
        cfg.seed = j.at("seed").get<std::uint64_t>();
    }
    if (j.contains("output_dir")) cfg.output_dir = j.at("output_dir").get<std::string>();

    const bool needs_physical = cfg.job != JobKind::RmtVerify;
    if (needs_physical) cfg.physical = parse_physical(need(j, "<root>", "physical"));

    const bool needs_correlator =
        cfg.job == JobKind::Evolve || cfg.job == JobKind::FreeAnalytic ||
        cfg.job == JobKind::Decoherence || cfg.job == JobKind::Compare;
    if (needs_correlator)
        cfg.correlator = parse_correlator(need(j, "<root>", "correlator"), "correlator");

    const bool needs_grid = needs_correlator;
    if (needs_grid) {
        cfg.grid = parse_grid(need(j, "<root>", "grid"));
        cfg.initial_state = parse_initial_state(need(j, "<root>", "initial_state"));
    }

    if (cfg.job == JobKind::Evolve || cfg.job == JobKind::Compare) {
        cfg.potential = parse_potential(need(j, "<root>", "potential"), "potential");
        cfg.solver = parse_solver(need(j, "<root>", "solver"));
    }
    if (cfg.job == JobKind::Langevin) {
        cfg.langevin = parse_langevin(need(j, "<root>", "langevin"));
        cfg.potential = j.contains("potential")
                            ? parse_potential(j.at("potential"), "potential")
                            : Potential::free();
    }
    if (cfg.job == JobKind::RmtVerify) cfg.rmt = parse_rmt(need(j, "<root>", "rmt"));
    if (j.contains("observables")) cfg.observables = parse_observables(j.at("observables"));

    if (cfg.job == JobKind::FreeAnalytic || cfg.job == JobKind::Decoherence) {
        if (cfg.observables.snapshot_times.empty())
            fail("observables.snapshot_times", "required for analytic jobs");
        for (double t : cfg.observables.snapshot_times)
            if (t < 0.0) fail("observables.snapshot_times", "times must be >= 0");
    }

    cfg.echo = j.dump();
    cfg.config_hash = fnv1a_hash(cfg.echo);
    return cfg;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw config_error("config error at <file>: cannot open '" + path + "'");
    json j;
    try {
        j = json::parse(is);
    } catch (const json::parse_error& e) {
        throw config_error(std::string("config error at <file>: ") + e.what());
    }
    return parse_config(j);
}

}  // namespace qkin
