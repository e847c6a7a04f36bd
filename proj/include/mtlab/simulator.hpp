#ifndef MTLAB_SIMULATOR_HPP
#define MTLAB_SIMULATOR_HPP

#include <array>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "mtlab/model.hpp"
#include "mtlab/theory.hpp"

namespace mtlab {

// Finite-size realization: the fixed true teacher A and the evolving moving
// teacher B and student J, all N-dimensional.
struct MicroState {
    std::size_t n = 0;
    std::vector<double> a_vec;
    std::vector<double> b_vec;
    std::vector<double> j_vec;
    std::uint64_t step_count = 0;

    // Cached squared norms of B and J, kept in sync by step() through the
    // closed-form norm update and refreshed exactly at intervals; negative
    // means stale. measure() never trusts them.
    double b_norm_sq = -1.0;
    double j_norm_sq = -1.0;
};

struct SimConfig {
    std::size_t n = 2000;
    std::uint64_t seed = 1;
    double t_max = 50.0;
    double record_interval = 0.5;
    // 0: evaluate the analytic generalization error at the measured R instead
    // of counting test-input disagreements.
    std::size_t test_inputs = 0;
    std::size_t trials = 1;

    void validate() const;
};

// All three vectors i.i.d. unit normal from the seeded init stream; A stays
// fixed afterwards.
MicroState init_micro(std::size_t n, std::uint64_t seed);

// One on-line example: draw x with i.i.d. N(0, 1/N) components, present the
// true teacher's label to B and the PRE-update B's label to J (both machines
// update from the same input simultaneously), then apply both perceptron
// updates.
void step(MicroState& micro, const ModelParams& params, std::mt19937_64& train_rng);

// Exact dot-product evaluation of the five order parameters.
MacroState measure(const MicroState& micro);

// Empirical disagreement rates of sgn(v) and sgn(u) against the true
// teacher's nonmonotonic output on fresh random inputs.
std::pair<double, double> estimate_gen_errors(const MicroState& micro, const ModelParams& params,
                                              std::size_t test_inputs, std::mt19937_64& test_rng);

struct SimResult {
    std::vector<Trajectory> trials;
    // Pointwise mean over trials, plus the across-trial standard deviation of
    // (R_B, R_J, R_BJ, l_B, l_J, eg_B, eg_J) at each record.
    Trajectory mean;
    std::vector<std::array<double, 7>> stddev;
};

// N * t_max steps per trial, measured every record_interval of continuous
// time. Per-trial trajectories are deterministic for a fixed (seed, trial
// index); trials run concurrently on up to `threads` workers and the
// aggregate reduction is ordered by trial index.
SimResult run_simulation(const SimConfig& cfg, const ModelParams& params, unsigned threads = 1);

} // namespace mtlab

#endif // MTLAB_SIMULATOR_HPP
