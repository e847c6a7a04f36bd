// Experiment runner: theory / simulate / compare / averages-check / sweep,
// each driven by a flat key=value config file and emitting CSV.
//
// Exit codes: 0 success, 1 validation or parse error, 2 numerical failure,
// 3 acceptance-band failure (averages-check, compare).

#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "mtlab/errors.hpp"
#include "mtlab/experiment.hpp"

namespace {

struct CliOptions {
    std::string config_path;
    std::string out_dir;
    bool out_set = false;
    std::uint64_t seed = 0;
    bool seed_set = false;
    unsigned threads = 0;
    bool quiet = false;
};

void add_common_options(CLI::App* sub, CliOptions& opt) {
    sub->add_option("--config", opt.config_path, "experiment config file")->required();
    sub->add_option("--out", opt.out_dir, "output directory (overrides output_path)");
    sub->add_option("--seed", opt.seed, "seed override");
    sub->add_option("--threads", opt.threads, "worker threads for trials/sweep entries");
    sub->add_flag("--quiet", opt.quiet, "suppress progress output");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"on-line learning laboratory: moving-teacher perceptron dynamics"};
    app.require_subcommand(1);

    CliOptions opt;
    const struct {
        const char* name;
        mtlab::Mode mode;
        const char* help;
    } kModes[] = {
        {"theory", mtlab::Mode::theory, "integrate the order-parameter ODEs"},
        {"simulate", mtlab::Mode::simulate, "run the finite-N Monte Carlo learner"},
        {"compare", mtlab::Mode::compare, "theory vs trial-averaged simulation"},
        {"averages-check", mtlab::Mode::averages_check, "closed-form averages vs oracle"},
        {"sweep", mtlab::Mode::sweep, "theory runs over a list of eta_J values"},
    };
    for (const auto& m : kModes) add_common_options(app.add_subcommand(m.name, m.help), opt);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        mtlab::ExperimentConfig cfg = mtlab::load_config_file(opt.config_path);
        const CLI::App* sub = app.get_subcommands().front();
        for (const auto& m : kModes) {
            if (sub->get_name() == m.name) {
                if (cfg.mode_set && cfg.mode != m.mode)
                    throw mtlab::ConfigError(0, std::string("config sets mode=") +
                                                    mtlab::mode_name(cfg.mode) +
                                                    " but the command line selected " + m.name);
                cfg.mode = m.mode;
                cfg.mode_set = true;
            }
        }
        if (sub->count("--out")) cfg.output_path = opt.out_dir;
        if (sub->count("--seed")) cfg.seed = opt.seed;
        if (sub->count("--threads")) cfg.threads = opt.threads;
        cfg.validate();

        return mtlab::run_experiment(cfg, opt.quiet ? nullptr : &std::cerr);
    } catch (const mtlab::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 1;
    } catch (const mtlab::NumericsError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
