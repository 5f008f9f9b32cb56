// Command-line entry point: mhpm <experiment> --config PATH [--seed N]
// [--ticks N] [--out DIR] [--resume CKPT]
//
// Exit codes: 0 ok, 2 config error, 3 contract violation, 4 I/O error.

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "mhpm/config.hpp"
#include "mhpm/errors.hpp"
#include "mhpm/experiments.hpp"

int main(int argc, char** argv) {
    CLI::App app{"mhpm experiment runner"};
    std::string experiment, config_path, out_dir, resume;
    std::optional<std::int64_t> seed, ticks;
    app.add_option("experiment", experiment, "charlm | saccade | arbitration | skinner | gradcheck")->required();
    app.add_option("--config", config_path, "run configuration file")->required();
    app.add_option("--seed", seed, "overrides [general] seed");
    app.add_option("--ticks", ticks, "overrides [general] ticks");
    app.add_option("--out", out_dir, "overrides [general] out_dir");
    app.add_option("--resume", resume, "continue from a checkpoint (charlm)");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        mhpm::RunConfig cfg = mhpm::RunConfig::load(config_path);
        if (seed) cfg.set("general", "seed", std::to_string(*seed));
        if (ticks) cfg.set("general", "ticks", std::to_string(*ticks));
        if (!out_dir.empty()) cfg.set("general", "out_dir", out_dir);
        mhpm::RunOptions opts;
        if (!resume.empty()) opts.resume = resume;
        const auto res = mhpm::run_experiment(experiment, cfg, opts);
        std::cout << res.summary << "\nartifacts: " << res.out_dir.string() << "\n";
        return 0;
    } catch (const mhpm::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const mhpm::ContractError& e) {
        std::cerr << "contract violation: " << e.what() << "\n";
        return 3;
    } catch (const mhpm::IoError& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return 4;
    }
}
