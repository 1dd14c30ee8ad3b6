// Reproducible experiment runner: every theorem-level check is a named
// experiment that writes a CSV table plus a key=value summary with pass/fail
// against its configured tolerances.  Identical config and seed give
// byte-identical outputs.

#ifndef RADSOB_EXPERIMENTS_HPP
#define RADSOB_EXPERIMENTS_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace radsob::experiments {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
    std::string experiment;
    std::map<std::string, std::string> params;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    std::optional<double> tol;
    std::optional<int> grid_n;
};

// flat key=value text with one [section] per experiment
std::map<std::string, std::map<std::string, std::string>> parse_config_file(
    const std::string& path);

const std::vector<std::string>& experiment_names();

// 0 = all checks passed, 1 = numerical check failed, 2 = configuration error
int run(const ExperimentConfig& cfg);

}  // namespace radsob::experiments

#endif
