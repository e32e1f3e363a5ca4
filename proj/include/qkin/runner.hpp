#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "qkin/config.hpp"
#include "qkin/observables.hpp"

namespace qkin {

struct RunResult {
    int exit_code = 0;  // 0 ok, 2 config, 3 numerical abort, 4 statistical failure
    nlohmann::json summary;
    std::filesystem::path summary_path;
};

// Execute a validated config: runs the job, writes snapshots, observable
// tables and summary.json into the output directory.
RunResult run(const RunConfig& cfg, bool verbose = false);

// Plot-ready columnar emitters (plain text, one row per record).
void emit_cumulant_table(const std::filesystem::path& path, const CumulantSeries& series,
                         std::uint64_t config_hash, std::uint64_t seed);
void emit_wigner_slice(const std::filesystem::path& path, const WignerGrid& w,
                       std::uint64_t config_hash, std::uint64_t seed);
void emit_fit_summary(const std::filesystem::path& path, const PowerLawFit& fit,
                      std::uint64_t config_hash, std::uint64_t seed);
void emit_distribution(const std::filesystem::path& path, const std::vector<double>& x,
                       const std::vector<double>& f, std::uint64_t config_hash,
                       std::uint64_t seed);

}  // namespace qkin
