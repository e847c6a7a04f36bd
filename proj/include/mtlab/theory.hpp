#ifndef MTLAB_THEORY_HPP
#define MTLAB_THEORY_HPP

#include <vector>

#include "mtlab/averages.hpp"
#include "mtlab/model.hpp"

namespace mtlab {

// Time derivatives of the five order parameters at one state.
struct StateRates {
    double dr_b = 0.0;
    double dr_j = 0.0;
    double dr_bj = 0.0;
    double dlen_b = 0.0;
    double dlen_j = 0.0;
};

struct TrajectoryRecord {
    double t = 0.0;
    MacroState state;
    double eg_b = 0.0;
    double eg_j = 0.0;
};

struct Trajectory {
    ModelParams params;
    double dt = 0.0;
    std::vector<TrajectoryRecord> records;
};

// Thermodynamic-limit image of independent unit-variance random vectors:
// all overlaps zero, unit lengths.
MacroState standard_init();

// Right-hand side of the coupled order-parameter dynamics:
//
//   dl_B/dt  = <gv> + <g^2>/(2 l_B)
//   dl_J/dt  = <fu> + <f^2>/(2 l_J)
//   dR_BJ/dt = -R_BJ (l_J'/l_J + l_B'/l_B) + <gu>/l_B + <fv>/l_J + <gf>/(l_B l_J)
//   dR_J/dt  = (-R_J l_J' + <fy>)/l_J
//   dR_B/dt  = (<gy> - <gv> R_B)/l_B - R_B <g^2>/(2 l_B^2)
//
// The last term of dR_B/dt expands dl_B/dt through the chain rule
// dR_B/dt = <gy>/l_B - (R_B/l_B) dl_B/dt, which puts <g^2> (not <gy>) in the
// second-order piece.
StateRates rhs(const MacroState& state, const ModelParams& params, const QuadratureSpec& spec = {});

// The same assembly from an externally supplied set of averages (e.g. the
// Monte Carlo oracle's).
StateRates rates_from_averages(const MacroState& state, const AveragesSet& avg);

struct IntegrateOptions {
    double record_interval = 0.5;
    QuadratureSpec quad = {};
};

// Classical fixed-step RK4. Records the state every record_interval (snapped
// to a whole number of steps) plus the final time, attaching the analytic
// generalization errors of both machines. Aborts with InfeasibleStateError or
// NumericsError naming the offending time if the state leaves the feasible
// region or a length collapses below 1e-6.
Trajectory integrate(const ModelParams& params, const MacroState& init, double dt, double t_max,
                     const IntegrateOptions& options = {});

} // namespace mtlab

#endif // MTLAB_THEORY_HPP
