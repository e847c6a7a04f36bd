#include "mtlab/theory.hpp"

#include <cmath>
#include <string>

#include "mtlab/generalization.hpp"

namespace mtlab {

namespace {

constexpr double kMinLength = 1e-6;

// Pull direction cosines hit by round-off back onto [-1, 1] so the Gaussian
// integrals stay defined; anything beyond kGramTol is a real failure.
void snap_cosine(double& r, double t) {
    if (std::abs(r) <= 1.0) return;
    if (std::abs(r) <= 1.0 + kGramTol) {
        r = std::copysign(1.0, r);
        return;
    }
    throw InfeasibleStateError("direction cosine " + std::to_string(r) + " left [-1, 1] at t = " +
                               std::to_string(t));
}

MacroState advanced(const MacroState& s, const StateRates& k, double h, double t) {
    MacroState out;
    out.r_b = s.r_b + h * k.dr_b;
    out.r_j = s.r_j + h * k.dr_j;
    out.r_bj = s.r_bj + h * k.dr_bj;
    out.len_b = s.len_b + h * k.dlen_b;
    out.len_j = s.len_j + h * k.dlen_j;
    snap_cosine(out.r_b, t);
    snap_cosine(out.r_j, t);
    snap_cosine(out.r_bj, t);
    if (out.len_b < kMinLength || out.len_j < kMinLength)
        throw NumericsError("length collapsed below 1e-6 at t = " + std::to_string(t));
    if (out.gram_det() < -kGramTol)
        throw InfeasibleStateError("state infeasible (Gram determinant " +
                                   std::to_string(out.gram_det()) + ") at t = " +
                                   std::to_string(t));
    return out;
}

} // namespace

MacroState standard_init() {
    return MacroState{0.0, 0.0, 0.0, 1.0, 1.0};
}

StateRates rates_from_averages(const MacroState& state, const AveragesSet& avg) {
    const double lb = state.len_b;
    const double lj = state.len_j;

    StateRates out;
    out.dlen_b = avg.gv + avg.g2 / (2.0 * lb);
    out.dlen_j = avg.fu + avg.f2 / (2.0 * lj);
    out.dr_bj = -state.r_bj * (out.dlen_j / lj + out.dlen_b / lb) + avg.gu / lb + avg.fv / lj +
                avg.gf / (lb * lj);
    out.dr_j = (-state.r_j * out.dlen_j + avg.fy) / lj;
    out.dr_b = (avg.gy - avg.gv * state.r_b) / lb - state.r_b * avg.g2 / (2.0 * lb * lb);
    return out;
}

StateRates rhs(const MacroState& state, const ModelParams& params, const QuadratureSpec& spec) {
    return rates_from_averages(state, compute_all(state, params, spec));
}

Trajectory integrate(const ModelParams& params, const MacroState& init, double dt, double t_max,
                     const IntegrateOptions& options) {
    params.validate();
    init.validate();
    if (!(dt > 0.0)) throw std::invalid_argument("integrate: dt must be > 0");
    if (t_max < 0.0) throw std::invalid_argument("integrate: t_max must be >= 0");
    if (!(options.record_interval > 0.0))
        throw std::invalid_argument("integrate: record_interval must be > 0");

    Trajectory traj;
    traj.params = params;
    traj.dt = dt;

    const long long n_steps = static_cast<long long>(std::llround(t_max / dt));
    const long long steps_per_record =
        std::max<long long>(1, std::llround(options.record_interval / dt));

    auto record = [&](long long step, const MacroState& s) {
        TrajectoryRecord rec;
        rec.t = static_cast<double>(step) * dt;
        rec.state = s;
        rec.eg_b = gen_error(s.r_b, params.a, options.quad).value;
        rec.eg_j = gen_error(s.r_j, params.a, options.quad).value;
        traj.records.push_back(rec);
    };

    MacroState s = init;
    record(0, s);
    for (long long step = 0; step < n_steps; ++step) {
        const double t = static_cast<double>(step) * dt;
        const StateRates k1 = rhs(s, params, options.quad);
        const StateRates k2 = rhs(advanced(s, k1, 0.5 * dt, t), params, options.quad);
        const StateRates k3 = rhs(advanced(s, k2, 0.5 * dt, t), params, options.quad);
        const StateRates k4 = rhs(advanced(s, k3, dt, t), params, options.quad);
        const StateRates combined{
            (k1.dr_b + 2.0 * k2.dr_b + 2.0 * k3.dr_b + k4.dr_b) / 6.0,
            (k1.dr_j + 2.0 * k2.dr_j + 2.0 * k3.dr_j + k4.dr_j) / 6.0,
            (k1.dr_bj + 2.0 * k2.dr_bj + 2.0 * k3.dr_bj + k4.dr_bj) / 6.0,
            (k1.dlen_b + 2.0 * k2.dlen_b + 2.0 * k3.dlen_b + k4.dlen_b) / 6.0,
            (k1.dlen_j + 2.0 * k2.dlen_j + 2.0 * k3.dlen_j + k4.dlen_j) / 6.0,
        };
        s = advanced(s, combined, dt, t + dt);
        if ((step + 1) % steps_per_record == 0 || step + 1 == n_steps) record(step + 1, s);
    }
    return traj;
}

} // namespace mtlab
