#ifndef MTLAB_EXPERIMENT_HPP
#define MTLAB_EXPERIMENT_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "mtlab/model.hpp"
#include "mtlab/simulator.hpp"

namespace mtlab {

inline constexpr const char* kVersion = "mtlab 1.0.0";

enum class Mode { theory, simulate, compare, averages_check, sweep };

const char* mode_name(Mode mode);

// Flat key=value experiment description. Defaults follow the documented
// schema: dt = 0.01, record_interval = 0.5, trials = 1, test_inputs = 0.
struct ExperimentConfig {
    Mode mode = Mode::theory;
    bool mode_set = false;

    double a = 0.0;
    double eta_b = 0.0;
    double eta_j = 0.0;
    bool a_set = false;
    bool eta_b_set = false;
    bool eta_j_set = false;

    double dt = 0.01;
    double t_max = 0.0;
    bool t_max_set = false;
    double record_interval = 0.5;

    std::size_t n = 0;
    bool n_set = false;
    std::uint64_t seed = 1;
    std::size_t trials = 1;
    std::size_t test_inputs = 0;

    std::vector<double> eta_j_list;

    std::string output_path = ".";
    double tolerance = 0.03;           // compare-mode acceptance band
    std::size_t oracle_samples = 10'000'000;
    std::size_t n_states = 0;          // extra random states in averages-check
    unsigned threads = 1;

    ModelParams params() const { return ModelParams{a, eta_b, eta_j}; }
    SimConfig sim() const { return SimConfig{n, seed, t_max, record_interval, test_inputs, trials}; }

    void validate() const; // throws ConfigError naming the violated invariant
};

// Parses one `key = value` per line, `#` comments, unknown or duplicate keys
// rejected with their line number. Validates the result for its mode.
ExperimentConfig parse_config(std::string_view text);

ExperimentConfig load_config_file(const std::string& path);

// Executes the configured experiment, writing CSV files under
// cfg.output_path. Returns 0 on success or 3 when a compare/averages-check
// band fails; numerical failures and bad configs propagate as exceptions.
// Partial output files are removed on failure. `log` may be null.
int run_experiment(const ExperimentConfig& cfg, std::ostream* log);

// Deterministic random feasible state generator used by averages-check and
// the test grids; margin shrinks the feasible R_BJ interval away from its
// endpoints.
MacroState random_feasible_state(std::uint64_t seed, double margin = 0.05);

} // namespace mtlab

#endif // MTLAB_EXPERIMENT_HPP
