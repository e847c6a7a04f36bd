#include "mtlab/simulator.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "mtlab/generalization.hpp"
#include "mtlab/rng.hpp"

namespace mtlab {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

int sign_pm(double z) {
    return z >= 0.0 ? +1 : -1;
}

} // namespace

void SimConfig::validate() const {
    if (n < 100) throw std::invalid_argument("SimConfig: N must be >= 100");
    if (test_inputs != 0 && test_inputs < 10'000)
        throw std::invalid_argument("SimConfig: test_inputs must be 0 or >= 1e4");
    if (trials < 1) throw std::invalid_argument("SimConfig: trials must be >= 1");
    if (t_max < 0.0) throw std::invalid_argument("SimConfig: t_max must be >= 0");
    if (!(record_interval > 0.0))
        throw std::invalid_argument("SimConfig: record_interval must be > 0");
}

MicroState init_micro(std::size_t n, std::uint64_t seed) {
    if (n < 100) throw std::invalid_argument("init_micro: N must be >= 100");
    MicroState micro;
    micro.n = n;
    micro.a_vec.resize(n);
    micro.b_vec.resize(n);
    micro.j_vec.resize(n);

    std::mt19937_64 rng = make_stream(seed, 0, Stream::init);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (auto& w : micro.a_vec) w = normal(rng);
    for (auto& w : micro.b_vec) w = normal(rng);
    for (auto& w : micro.j_vec) w = normal(rng);
    micro.b_norm_sq = dot(micro.b_vec, micro.b_vec);
    micro.j_norm_sq = dot(micro.j_vec, micro.j_vec);
    return micro;
}

void step(MicroState& micro, const ModelParams& params, std::mt19937_64& train_rng) {
    const std::size_t n = micro.n;
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    std::normal_distribution<double> normal(0.0, 1.0);

    // Refresh the cached norms when stale or on the periodic exact recompute
    // that stops incremental round-off from accumulating over long runs.
    if (micro.b_norm_sq < 0.0 || micro.j_norm_sq < 0.0 || micro.step_count % 65536 == 0) {
        micro.b_norm_sq = dot(micro.b_vec, micro.b_vec);
        micro.j_norm_sq = dot(micro.j_vec, micro.j_vec);
    }

    thread_local std::vector<double> x;
    x.resize(n);
    double xx = 0.0, xa = 0.0, xb = 0.0, xj = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double xi = normal(train_rng) * scale;
        x[i] = xi;
        xx += xi * xi;
        xa += xi * micro.a_vec[i];
        xb += xi * micro.b_vec[i];
        xj += xi * micro.j_vec[i];
    }

    const double len_b = std::sqrt(micro.b_norm_sq / static_cast<double>(n));
    const double len_j = std::sqrt(micro.j_norm_sq / static_cast<double>(n));
    const double y = xa;
    const double v = xb / len_b;
    const double u = xj / len_j;

    // Both magnitudes come from the pre-update vectors; the student never
    // sees the moving teacher's post-update label for the same example.
    const double g = teacher_update_magnitude(y, v, params);
    const double f = student_update_magnitude(u, v, params.eta_j);
    if (g != 0.0) {
        for (std::size_t i = 0; i < n; ++i) micro.b_vec[i] += g * x[i];
        micro.b_norm_sq += 2.0 * g * xb + g * g * xx;
    }
    if (f != 0.0) {
        for (std::size_t i = 0; i < n; ++i) micro.j_vec[i] += f * x[i];
        micro.j_norm_sq += 2.0 * f * xj + f * f * xx;
    }
    ++micro.step_count;
}

MacroState measure(const MicroState& micro) {
    const double n = static_cast<double>(micro.n);
    const double aa = dot(micro.a_vec, micro.a_vec);
    const double bb = dot(micro.b_vec, micro.b_vec);
    const double jj = dot(micro.j_vec, micro.j_vec);
    const double ab = dot(micro.a_vec, micro.b_vec);
    const double aj = dot(micro.a_vec, micro.j_vec);
    const double bj = dot(micro.b_vec, micro.j_vec);

    MacroState s;
    s.r_b = ab / std::sqrt(aa * bb);
    s.r_j = aj / std::sqrt(aa * jj);
    s.r_bj = bj / std::sqrt(bb * jj);
    s.len_b = std::sqrt(bb / n);
    s.len_j = std::sqrt(jj / n);
    return s;
}

std::pair<double, double> estimate_gen_errors(const MicroState& micro, const ModelParams& params,
                                              std::size_t test_inputs, std::mt19937_64& test_rng) {
    if (test_inputs < 10'000)
        throw std::invalid_argument("estimate_gen_errors: need at least 1e4 test inputs");
    const std::size_t n = micro.n;
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    std::normal_distribution<double> normal(0.0, 1.0);

    std::size_t errs_b = 0;
    std::size_t errs_j = 0;
    for (std::size_t k = 0; k < test_inputs; ++k) {
        double xa = 0.0, xb = 0.0, xj = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double xi = normal(test_rng) * scale;
            xa += xi * micro.a_vec[i];
            xb += xi * micro.b_vec[i];
            xj += xi * micro.j_vec[i];
        }
        const int d = true_teacher_output(xa, params.a);
        if (sign_pm(xb) != d) ++errs_b;
        if (sign_pm(xj) != d) ++errs_j;
    }
    const double n_tests = static_cast<double>(test_inputs);
    return {static_cast<double>(errs_b) / n_tests, static_cast<double>(errs_j) / n_tests};
}

namespace {

Trajectory run_one_trial(const SimConfig& cfg, const ModelParams& params, std::uint64_t trial) {
    MicroState micro = init_micro(cfg.n, stream_seed(cfg.seed, trial, Stream::init));
    std::mt19937_64 train_rng = make_stream(cfg.seed, trial, Stream::train);
    std::mt19937_64 test_rng = make_stream(cfg.seed, trial, Stream::test);

    const auto n_steps = static_cast<std::uint64_t>(std::llround(cfg.t_max * static_cast<double>(cfg.n)));
    const auto steps_per_record = std::max<std::uint64_t>(
        1, static_cast<std::uint64_t>(std::llround(cfg.record_interval * static_cast<double>(cfg.n))));

    Trajectory traj;
    traj.params = params;
    traj.dt = 1.0 / static_cast<double>(cfg.n);

    auto record = [&](std::uint64_t step_idx) {
        TrajectoryRecord rec;
        rec.t = static_cast<double>(step_idx) / static_cast<double>(cfg.n);
        rec.state = measure(micro);
        if (cfg.test_inputs == 0) {
            rec.eg_b = gen_error(rec.state.r_b, params.a).value;
            rec.eg_j = gen_error(rec.state.r_j, params.a).value;
        } else {
            std::tie(rec.eg_b, rec.eg_j) =
                estimate_gen_errors(micro, params, cfg.test_inputs, test_rng);
        }
        traj.records.push_back(rec);
    };

    record(0);
    for (std::uint64_t step_idx = 1; step_idx <= n_steps; ++step_idx) {
        step(micro, params, train_rng);
        if (step_idx % steps_per_record == 0 || step_idx == n_steps) record(step_idx);
    }
    return traj;
}

} // namespace

SimResult run_simulation(const SimConfig& cfg, const ModelParams& params, unsigned threads) {
    cfg.validate();
    params.validate();

    SimResult result;
    result.trials.resize(cfg.trials);

    const unsigned workers = std::max(1u, std::min<unsigned>(threads, cfg.trials));
    if (workers == 1) {
        for (std::size_t trial = 0; trial < cfg.trials; ++trial)
            result.trials[trial] = run_one_trial(cfg, params, trial);
    } else {
        std::vector<std::thread> pool;
        std::atomic<std::size_t> next{0};
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (;;) {
                    const std::size_t trial = next.fetch_add(1);
                    if (trial >= cfg.trials) return;
                    result.trials[trial] = run_one_trial(cfg, params, trial);
                }
            });
        }
        for (auto& th : pool) th.join();
    }

    // Deterministic reduction in trial order.
    const std::size_t n_records = result.trials.front().records.size();
    result.mean.params = params;
    result.mean.dt = result.trials.front().dt;
    result.mean.records.resize(n_records);
    result.stddev.assign(n_records, {});
    for (std::size_t r = 0; r < n_records; ++r) {
        std::array<double, 7> sum{};
        std::array<double, 7> sum_sq{};
        for (const Trajectory& traj : result.trials) {
            const TrajectoryRecord& rec = traj.records[r];
            const std::array<double, 7> vals{rec.state.r_b, rec.state.r_j,  rec.state.r_bj,
                                             rec.state.len_b, rec.state.len_j, rec.eg_b,
                                             rec.eg_j};
            for (int k = 0; k < 7; ++k) {
                sum[k] += vals[k];
                sum_sq[k] += vals[k] * vals[k];
            }
        }
        const double m = static_cast<double>(cfg.trials);
        TrajectoryRecord& rec = result.mean.records[r];
        rec.t = result.trials.front().records[r].t;
        rec.state.r_b = sum[0] / m;
        rec.state.r_j = sum[1] / m;
        rec.state.r_bj = sum[2] / m;
        rec.state.len_b = sum[3] / m;
        rec.state.len_j = sum[4] / m;
        rec.eg_b = sum[5] / m;
        rec.eg_j = sum[6] / m;
        for (int k = 0; k < 7; ++k) {
            const double mean_k = sum[k] / m;
            result.stddev[r][k] = std::sqrt(std::max(sum_sq[k] / m - mean_k * mean_k, 0.0));
        }
    }
    return result;
}

} // namespace mtlab
