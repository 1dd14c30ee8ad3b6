// Experiment runner: picks one named experiment, merges config-file and
// command-line parameters, and writes a CSV table plus a pass/fail summary.
//
//   radsob --experiment blowup --out results --config lab.cfg
//
// Exit status: 0 = all checks passed, 1 = numerical check failed,
// 2 = configuration error.

#include "CLI11.hpp"
#include "radsob/experiments.hpp"

#include <cstdio>

int main(int argc, char** argv) {
    CLI::App app{"radsob: weighted radial Sobolev embedding laboratory"};

    std::string config_path, experiment, out_dir = ".";
    std::int64_t seed = -1;
    double tol = -1.0;
    int grid_n = -1;
    bool list = false;

    app.add_option("--config", config_path,
                   "config file (flat key=value, one [section] per experiment)");
    app.add_option("--experiment", experiment, "experiment name");
    app.add_option("--out", out_dir, "output directory")->capture_default_str();
    app.add_option("--seed", seed, "seed for stochastic experiments");
    app.add_option("--tol", tol, "tolerance override");
    app.add_option("--grid-n", grid_n, "grid size override");
    app.add_flag("--list", list, "list experiment names and exit");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (list) {
        for (const auto& name : radsob::experiments::experiment_names())
            std::printf("%s\n", name.c_str());
        return 0;
    }
    if (experiment.empty()) {
        std::fprintf(stderr, "config error: --experiment is required (see --list)\n");
        return 2;
    }

    radsob::experiments::ExperimentConfig cfg;
    cfg.experiment = experiment;
    cfg.out_dir = out_dir;
    if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
    if (tol > 0.0) cfg.tol = tol;
    if (grid_n > 0) cfg.grid_n = grid_n;

    if (!config_path.empty()) {
        try {
            auto sections = radsob::experiments::parse_config_file(config_path);
            auto it = sections.find(experiment);
            if (it != sections.end()) {
                for (const auto& [k, v] : it->second) {
                    if (k == "seed" && !cfg.seed) {
                        cfg.seed = std::stoull(v);
                    } else if (k != "seed") {
                        cfg.params[k] = v;
                    }
                }
            }
        } catch (const radsob::experiments::ConfigError& e) {
            std::fprintf(stderr, "config error: %s\n", e.what());
            return 2;
        }
    }

    return radsob::experiments::run(cfg);
}
