// Command-line front end: parses a config file, runs the requested job and
// writes artifacts plus summary.json into the output directory.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "qkin/config.hpp"
#include "qkin/detail/parallel.hpp"
#include "qkin/errors.hpp"
#include "qkin/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"qkin: dissipative quantum kinetics simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed_override;
    std::optional<std::string> out_override;
    int threads = 1;
    bool verbose = false;

    CLI::App* run_cmd = app.add_subcommand("run", "execute a job described by a config file");
    run_cmd->add_option("config", config_path, "path to the JSON run config")->required();
    run_cmd->add_option("--seed", seed_override, "override the config seed");
    run_cmd->add_option("--out", out_override, "override the output directory");
    run_cmd->add_option("--threads", threads, "worker threads (observables/ensembles)");
    run_cmd->add_flag("--verbose", verbose, "print progress to stderr");

    CLI11_PARSE(app, argc, argv);

    try {
        qkin::RunConfig cfg = qkin::load_config_file(config_path);
        if (seed_override) cfg.seed = *seed_override;
        if (out_override) {
            cfg.output_dir = *out_override;
        } else if (const char* env = std::getenv("QKIN_OUT_DIR")) {
            cfg.output_dir = env;
        }
        qkin::set_worker_threads(threads);

        const auto result = qkin::run(cfg, verbose);
        if (verbose)
            std::cerr << "summary written to " << result.summary_path.string() << "\n";
        return result.exit_code;
    } catch (const qkin::config_error& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "fatal: " << e.what() << "\n";
        return 3;
    }
}
