#include "mtlab/experiment.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include "mtlab/averages.hpp"
#include "mtlab/generalization.hpp"
#include "mtlab/rng.hpp"
#include "mtlab/theory.hpp"

namespace fs = std::filesystem;

namespace mtlab {

namespace {

std::string fmt9(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", x);
    return buf;
}

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

double parse_double(const std::string& value, int line) {
    std::size_t pos = 0;
    double out = 0.0;
    try {
        out = std::stod(value, &pos);
    } catch (const std::exception&) {
        throw ConfigError(line, "expected a number, got '" + value + "'");
    }
    if (pos != value.size()) throw ConfigError(line, "trailing characters after number '" + value + "'");
    if (!std::isfinite(out)) throw ConfigError(line, "number must be finite");
    return out;
}

std::uint64_t parse_u64(const std::string& value, int line) {
    // stoull would silently wrap negative inputs
    if (value.find('-') != std::string::npos)
        throw ConfigError(line, "expected a non-negative integer, got '" + value + "'");
    std::size_t pos = 0;
    std::uint64_t out = 0;
    try {
        out = std::stoull(value, &pos);
    } catch (const std::exception&) {
        throw ConfigError(line, "expected a non-negative integer, got '" + value + "'");
    }
    if (pos != value.size())
        throw ConfigError(line, "trailing characters after integer '" + value + "'");
    return out;
}

std::vector<double> parse_double_list(const std::string& value, int line) {
    std::vector<double> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) throw ConfigError(line, "empty entry in list");
        out.push_back(parse_double(item, line));
    }
    return out;
}

// Removes the file on destruction unless commit() was called, so failed runs
// never leave partial CSVs behind.
class CsvFile {
public:
    explicit CsvFile(const fs::path& path) : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
        if (!out_) throw std::runtime_error("cannot open output file " + path.string());
    }
    ~CsvFile() {
        out_.close();
        if (!committed_) {
            std::error_code ec;
            fs::remove(path_, ec);
        }
    }
    std::ofstream& stream() { return out_; }
    void commit() {
        out_.flush();
        if (!out_) throw std::runtime_error("write failure on " + path_.string());
        committed_ = true;
    }

private:
    fs::path path_;
    std::ofstream out_;
    bool committed_ = false;
};

std::string config_echo(const ExperimentConfig& cfg) {
    std::string line = std::string("mode=") + mode_name(cfg.mode);
    line += " a=" + fmt9(cfg.a);
    line += " eta_B=" + fmt9(cfg.eta_b);
    line += " eta_J=" + fmt9(cfg.eta_j); // in sweep output: this file's entry
    if (cfg.mode != Mode::averages_check) {
        line += " dt=" + fmt9(cfg.dt);
        line += " t_max=" + fmt9(cfg.t_max);
        line += " record_interval=" + fmt9(cfg.record_interval);
    }
    if (cfg.mode == Mode::simulate || cfg.mode == Mode::compare) {
        line += " N=" + std::to_string(cfg.n);
        line += " trials=" + std::to_string(cfg.trials);
        line += " test_inputs=" + std::to_string(cfg.test_inputs);
    }
    if (cfg.mode == Mode::compare) line += " tolerance=" + fmt9(cfg.tolerance);
    if (cfg.mode == Mode::averages_check) {
        line += " oracle_samples=" + std::to_string(cfg.oracle_samples);
        line += " n_states=" + std::to_string(cfg.n_states);
    }
    if (cfg.mode == Mode::sweep) {
        line += " eta_J_list=";
        for (std::size_t i = 0; i < cfg.eta_j_list.size(); ++i) {
            if (i) line += ",";
            line += fmt9(cfg.eta_j_list[i]);
        }
    }
    return line;
}

void write_preamble(std::ofstream& out, const ExperimentConfig& cfg) {
    out << "# " << kVersion << "\n";
    out << "# config: " << config_echo(cfg) << "\n";
    out << "# seed: " << cfg.seed << "\n";
}

void write_trajectory_rows(std::ofstream& out, const Trajectory& traj) {
    out << "t,R_B,R_J,R_BJ,l_B,l_J,eg_B,eg_J\n";
    for (const TrajectoryRecord& rec : traj.records) {
        out << fmt9(rec.t) << ',' << fmt9(rec.state.r_b) << ',' << fmt9(rec.state.r_j) << ','
            << fmt9(rec.state.r_bj) << ',' << fmt9(rec.state.len_b) << ','
            << fmt9(rec.state.len_j) << ',' << fmt9(rec.eg_b) << ',' << fmt9(rec.eg_j) << '\n';
    }
}

void write_trajectory_csv(const fs::path& path, const ExperimentConfig& cfg, const Trajectory& traj) {
    CsvFile file(path);
    write_preamble(file.stream(), cfg);
    write_trajectory_rows(file.stream(), traj);
    file.commit();
}

fs::path prepare_output_dir(const ExperimentConfig& cfg) {
    fs::path dir(cfg.output_path);
    if (!dir.empty()) fs::create_directories(dir);
    return dir;
}

int run_theory(const ExperimentConfig& cfg, std::ostream* log) {
    const Trajectory traj = integrate(cfg.params(), standard_init(), cfg.dt, cfg.t_max,
                                      IntegrateOptions{cfg.record_interval, {}});
    const fs::path path = prepare_output_dir(cfg) / "theory.csv";
    write_trajectory_csv(path, cfg, traj);
    if (log) *log << "wrote " << path.string() << " (" << traj.records.size() << " records)\n";
    return 0;
}

int run_simulate(const ExperimentConfig& cfg, std::ostream* log) {
    const SimResult result = run_simulation(cfg.sim(), cfg.params(), cfg.threads);
    const fs::path dir = prepare_output_dir(cfg);
    for (std::size_t i = 0; i < result.trials.size(); ++i) {
        const fs::path path = dir / ("sim_trial" + std::to_string(i) + ".csv");
        write_trajectory_csv(path, cfg, result.trials[i]);
        if (log) *log << "wrote " << path.string() << "\n";
    }
    const fs::path mean_path = dir / "sim_mean.csv";
    write_trajectory_csv(mean_path, cfg, result.mean);
    if (log) *log << "wrote " << mean_path.string() << "\n";
    return 0;
}

int run_compare(const ExperimentConfig& cfg, std::ostream* log) {
    const Trajectory theory = integrate(cfg.params(), standard_init(), cfg.dt, cfg.t_max,
                                        IntegrateOptions{cfg.record_interval, {}});
    const SimResult sim = run_simulation(cfg.sim(), cfg.params(), cfg.threads);
    const Trajectory& mean = sim.mean;

    const std::size_t n_records = std::min(theory.records.size(), mean.records.size());
    static constexpr const char* kCols[7] = {"R_B", "R_J", "R_BJ", "l_B", "l_J", "eg_B", "eg_J"};
    auto values = [](const TrajectoryRecord& rec) {
        return std::array<double, 7>{rec.state.r_b,  rec.state.r_j,  rec.state.r_bj,
                                     rec.state.len_b, rec.state.len_j, rec.eg_b, rec.eg_j};
    };

    std::array<double, 7> max_dev{};
    const fs::path path = prepare_output_dir(cfg) / "compare.csv";
    {
        CsvFile file(path);
        write_preamble(file.stream(), cfg);
        file.stream() << "t";
        for (const char* col : kCols) file.stream() << ',' << col << "_theory," << col << "_sim";
        file.stream() << "\n";
        for (std::size_t r = 0; r < n_records; ++r) {
            const auto th = values(theory.records[r]);
            const auto si = values(mean.records[r]);
            file.stream() << fmt9(theory.records[r].t);
            for (int k = 0; k < 7; ++k) {
                file.stream() << ',' << fmt9(th[k]) << ',' << fmt9(si[k]);
                max_dev[k] = std::max(max_dev[k], std::abs(th[k] - si[k]));
            }
            file.stream() << "\n";
        }
        file.stream() << "# max_abs_dev";
        for (int k = 0; k < 7; ++k) file.stream() << ' ' << kCols[k] << '=' << fmt9(max_dev[k]);
        file.stream() << "\n";
        file.commit();
    }
    if (log) *log << "wrote " << path.string() << "\n";

    // The acceptance band covers the five order parameters; the error columns
    // are informational (they are derived from R when test_inputs = 0).
    bool ok = true;
    for (int k = 0; k < 5; ++k) {
        if (max_dev[k] > cfg.tolerance) {
            ok = false;
            if (log)
                *log << "band failure: max |" << kCols[k] << "_theory - " << kCols[k]
                     << "_sim| = " << fmt9(max_dev[k]) << " > " << fmt9(cfg.tolerance) << "\n";
        }
    }
    return ok ? 0 : 3;
}

int run_averages_check(const ExperimentConfig& cfg, std::ostream* log) {
    const ModelParams params = cfg.params();
    std::vector<MacroState> states{standard_init()};
    for (std::size_t i = 0; i < cfg.n_states; ++i)
        states.push_back(random_feasible_state(stream_seed(cfg.seed, i + 1, Stream::init)));

    static constexpr const char* kNames[9] = {"gv", "g2", "fu", "f2", "gu", "fv", "gf", "fy", "gy"};
    const auto fns = average_integrands(params);

    bool ok = true;
    const fs::path path = prepare_output_dir(cfg) / "averages_check.csv";
    {
        CsvFile file(path);
        write_preamble(file.stream(), cfg);
        file.stream() << "state,average,closed_form,oracle_mean,oracle_se,band,pass\n";
        for (std::size_t s = 0; s < states.size(); ++s) {
            const MacroState& state = states[s];
            const AveragesSet set = compute_all(state, params);
            const double closed[9] = {set.gv, set.g2, set.fu, set.f2, set.gu,
                                      set.fv, set.gf, set.fy, set.gy};
            const auto oracle =
                oracle_averages(fns, build_covariance(state), cfg.oracle_samples,
                                stream_seed(cfg.seed, 1000 + s, Stream::oracle));
            for (int k = 0; k < 9; ++k) {
                double band = 4.0 * oracle[k].std_error;
                if (std::string_view(kNames[k]) == "gf") band = std::max(band, 1e-4);
                const bool pass = std::abs(closed[k] - oracle[k].mean) <= band;
                ok = ok && pass;
                file.stream() << s << ',' << kNames[k] << ',' << fmt9(closed[k]) << ','
                              << fmt9(oracle[k].mean) << ',' << fmt9(oracle[k].std_error) << ','
                              << fmt9(band) << ',' << (pass ? "1" : "0") << "\n";
                if (!pass && log)
                    *log << "band failure: state " << s << " <" << kNames[k]
                         << "> closed=" << fmt9(closed[k]) << " oracle=" << fmt9(oracle[k].mean)
                         << " band=" << fmt9(band) << "\n";
            }
        }
        file.commit();
    }
    if (log) *log << "wrote " << path.string() << "\n";
    return ok ? 0 : 3;
}

int run_sweep(const ExperimentConfig& cfg, std::ostream* log) {
    struct Entry {
        double eta_j;
        Trajectory traj;
        std::exception_ptr error;
    };
    std::vector<Entry> entries;
    entries.reserve(cfg.eta_j_list.size());
    for (double eta_j : cfg.eta_j_list) entries.push_back({eta_j, {}, nullptr});

    auto work = [&](Entry& entry) {
        try {
            ModelParams params = cfg.params();
            params.eta_j = entry.eta_j;
            entry.traj = integrate(params, standard_init(), cfg.dt, cfg.t_max,
                                   IntegrateOptions{cfg.record_interval, {}});
        } catch (...) {
            entry.error = std::current_exception();
        }
    };

    if (cfg.threads <= 1 || entries.size() == 1) {
        for (Entry& entry : entries) work(entry);
    } else {
        std::vector<std::thread> pool;
        std::atomic<std::size_t> next{0};
        const unsigned workers = std::min<unsigned>(cfg.threads, entries.size());
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (;;) {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= entries.size()) return;
                    work(entries[i]);
                }
            });
        for (auto& th : pool) th.join();
    }

    const fs::path dir = prepare_output_dir(cfg);
    for (Entry& entry : entries) {
        if (entry.error) std::rethrow_exception(entry.error);
        ExperimentConfig echo_cfg = cfg;
        echo_cfg.eta_j = entry.eta_j;
        const fs::path path = dir / ("sweep_etaJ_" + fmt9(entry.eta_j) + ".csv");
        write_trajectory_csv(path, echo_cfg, entry.traj);
        if (log) *log << "wrote " << path.string() << "\n";
    }
    return 0;
}

} // namespace

const char* mode_name(Mode mode) {
    switch (mode) {
        case Mode::theory: return "theory";
        case Mode::simulate: return "simulate";
        case Mode::compare: return "compare";
        case Mode::averages_check: return "averages-check";
        case Mode::sweep: return "sweep";
    }
    return "?";
}

void ExperimentConfig::validate() const {
    if (!mode_set) throw ConfigError(0, "mode is required");
    if (!a_set) throw ConfigError(0, "a is required");
    if (!eta_b_set) throw ConfigError(0, "eta_B is required");
    if (!(a > 0.0)) throw ConfigError(0, "invariant violated: a > 0");
    if (!(eta_b > 0.0)) throw ConfigError(0, "invariant violated: eta_B > 0");

    const bool needs_eta_j = mode != Mode::sweep;
    if (needs_eta_j) {
        if (!eta_j_set) throw ConfigError(0, "eta_J is required");
        if (!(eta_j > 0.0)) throw ConfigError(0, "invariant violated: eta_J > 0");
    }
    const bool needs_time = mode != Mode::averages_check;
    if (needs_time) {
        if (!t_max_set) throw ConfigError(0, "t_max is required");
        if (t_max < 0.0) throw ConfigError(0, "invariant violated: t_max >= 0");
        if (!(dt > 0.0)) throw ConfigError(0, "invariant violated: dt > 0");
        if (!(record_interval > 0.0))
            throw ConfigError(0, "invariant violated: record_interval > 0");
    }
    if (mode == Mode::simulate || mode == Mode::compare) {
        if (!n_set) throw ConfigError(0, "N is required for simulate/compare");
        if (n < 100) throw ConfigError(0, "invariant violated: N >= 100");
        if (test_inputs != 0 && test_inputs < 10'000)
            throw ConfigError(0, "invariant violated: test_inputs = 0 or >= 1e4");
        if (trials < 1) throw ConfigError(0, "invariant violated: trials >= 1");
    }
    if (mode == Mode::compare && !(tolerance > 0.0))
        throw ConfigError(0, "invariant violated: tolerance > 0");
    if (mode == Mode::sweep) {
        if (eta_j_list.empty()) throw ConfigError(0, "eta_J_list must be non-empty in sweep mode");
        for (double e : eta_j_list)
            if (!(e > 0.0)) throw ConfigError(0, "invariant violated: every eta_J_list entry > 0");
    }
    if (mode == Mode::averages_check && oracle_samples < 10'000)
        throw ConfigError(0, "invariant violated: oracle_samples >= 1e4");
    if (threads < 1) throw ConfigError(0, "invariant violated: threads >= 1");
}

ExperimentConfig parse_config(std::string_view text) {
    ExperimentConfig cfg;
    std::map<std::string, int> seen;

    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t eol = text.find('\n', pos);
        std::string_view raw =
            text.substr(pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_no;

        std::string line(raw);
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;

        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(line_no, "expected `key = value`");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError(line_no, "empty key");
        if (value.empty()) throw ConfigError(line_no, "empty value for key '" + key + "'");
        if (auto [it, inserted] = seen.emplace(key, line_no); !inserted)
            throw ConfigError(line_no, "duplicate key '" + key + "' (first on line " +
                                           std::to_string(it->second) + ")");

        if (key == "mode") {
            if (value == "theory") cfg.mode = Mode::theory;
            else if (value == "simulate") cfg.mode = Mode::simulate;
            else if (value == "compare") cfg.mode = Mode::compare;
            else if (value == "averages-check") cfg.mode = Mode::averages_check;
            else if (value == "sweep") cfg.mode = Mode::sweep;
            else throw ConfigError(line_no, "unknown mode '" + value + "'");
            cfg.mode_set = true;
        } else if (key == "a") {
            cfg.a = parse_double(value, line_no);
            cfg.a_set = true;
        } else if (key == "eta_B") {
            cfg.eta_b = parse_double(value, line_no);
            cfg.eta_b_set = true;
        } else if (key == "eta_J") {
            cfg.eta_j = parse_double(value, line_no);
            cfg.eta_j_set = true;
        } else if (key == "dt") {
            cfg.dt = parse_double(value, line_no);
        } else if (key == "t_max") {
            cfg.t_max = parse_double(value, line_no);
            cfg.t_max_set = true;
        } else if (key == "record_interval") {
            cfg.record_interval = parse_double(value, line_no);
        } else if (key == "N") {
            cfg.n = static_cast<std::size_t>(parse_u64(value, line_no));
            cfg.n_set = true;
        } else if (key == "seed") {
            cfg.seed = parse_u64(value, line_no);
        } else if (key == "trials") {
            cfg.trials = static_cast<std::size_t>(parse_u64(value, line_no));
        } else if (key == "test_inputs") {
            cfg.test_inputs = static_cast<std::size_t>(parse_u64(value, line_no));
        } else if (key == "eta_J_list") {
            cfg.eta_j_list = parse_double_list(value, line_no);
        } else if (key == "output_path") {
            cfg.output_path = value;
        } else if (key == "tolerance") {
            cfg.tolerance = parse_double(value, line_no);
        } else if (key == "oracle_samples") {
            cfg.oracle_samples = static_cast<std::size_t>(parse_u64(value, line_no));
        } else if (key == "n_states") {
            cfg.n_states = static_cast<std::size_t>(parse_u64(value, line_no));
        } else if (key == "threads") {
            cfg.threads = static_cast<unsigned>(parse_u64(value, line_no));
        } else {
            throw ConfigError(line_no, "unknown key '" + key + "'");
        }
    }

    cfg.validate();
    return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(0, "cannot open config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

int run_experiment(const ExperimentConfig& cfg, std::ostream* log) {
    cfg.validate();
    if (log && cfg.params().monotone_regime())
        *log << "note: a >= sqrt(2 ln 2); the generalization error is monotone in R\n";
    switch (cfg.mode) {
        case Mode::theory: return run_theory(cfg, log);
        case Mode::simulate: return run_simulate(cfg, log);
        case Mode::compare: return run_compare(cfg, log);
        case Mode::averages_check: return run_averages_check(cfg, log);
        case Mode::sweep: return run_sweep(cfg, log);
    }
    throw std::logic_error("unreachable mode");
}

MacroState random_feasible_state(std::uint64_t seed, double margin) {
    std::mt19937_64 rng(mix64(seed));
    std::uniform_real_distribution<double> cosine(-0.95, 0.95);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> length(0.5, 2.0);

    MacroState s;
    s.r_b = cosine(rng);
    s.r_j = cosine(rng);
    // Feasible R_BJ interval given R_B, R_J, shrunk by `margin` on each side.
    const double center = s.r_b * s.r_j;
    const double half = std::sqrt((1.0 - s.r_b * s.r_b) * (1.0 - s.r_j * s.r_j));
    const double lo = center - (1.0 - margin) * half;
    const double hi = center + (1.0 - margin) * half;
    s.r_bj = lo + (hi - lo) * unit(rng);
    s.len_b = length(rng);
    s.len_j = length(rng);
    s.validate();
    return s;
}

} // namespace mtlab
