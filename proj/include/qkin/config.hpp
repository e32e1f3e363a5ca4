#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qkin/correlator.hpp"
#include "qkin/evolver.hpp"
#include "qkin/physical_params.hpp"
#include "qkin/potential.hpp"
#include "qkin/rmt.hpp"

namespace qkin {

enum class JobKind { Evolve, FreeAnalytic, Decoherence, Langevin, RmtVerify, Compare };

std::string to_string(JobKind k);

struct GridConfig {
    int nr = 256, ns = 256;
    double r_extent = 20.0, s_extent = 20.0;
};

struct InitialStateConfig {
    std::string type = "gaussian";  // "gaussian" | "thermal-gaussian"
    double center = 0.0;
    double sigma_q = 1.0;
    double momentum = 0.0;
    double sigma_p = 0.0;  // thermal-gaussian only
};

struct LangevinConfig {
    int n_walkers = 1000;
    double dt = 1e-3;
    int n_steps = 100;
    int record_stride = 10;
    double q_mean = 0.0, q_sigma = 1.0;
    double p_mean = 0.0;
    double p_sigma = 0.0;  // 0 selects the thermal value sqrt(M T)
};

struct RmtConfig {
    EnsembleSpec ensemble;
    int n_samples = 100;
    AuditOptions audit;
    bool export_first_sample = false;
};

struct ObservablesConfig {
    int max_order = 4;
    double fit_t_lo = 0.0, fit_t_hi = 0.0;     // 0,0 disables the fit
    std::vector<double> snapshot_times;        // analytic/decoherence jobs
    bool emit_snapshots = true;
    bool emit_wigner_slice = false;
    bool tail_diagnostics = false;
};

struct RunConfig {
    JobKind job = JobKind::Evolve;
    std::uint64_t seed = 1;
    std::string output_dir = "out";

    std::optional<PhysicalParams> physical;
    std::optional<Correlator> correlator;
    std::optional<Potential> potential;
    GridConfig grid;
    InitialStateConfig initial_state;
    SolverOptions solver;
    LangevinConfig langevin;
    std::optional<RmtConfig> rmt;
    ObservablesConfig observables;

    std::string echo;           // canonical serialized form
    std::uint64_t config_hash = 0;
};

// Parse and validate; throws config_error with a field path in the message.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config_file(const std::string& path);

std::uint64_t fnv1a_hash(const std::string& text);

}  // namespace qkin
