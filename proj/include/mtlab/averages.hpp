#ifndef MTLAB_AVERAGES_HPP
#define MTLAB_AVERAGES_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "mtlab/gaussmath.hpp"
#include "mtlab/model.hpp"

namespace mtlab {

// The nine expectations over the trivariate Gaussian (y, v, u) that drive the
// order-parameter dynamics.
struct AveragesSet {
    double gv = 0.0;
    double g2 = 0.0;
    double fu = 0.0;
    double f2 = 0.0;
    double gu = 0.0;
    double fv = 0.0;
    double gf = 0.0;
    double fy = 0.0;
    double gy = 0.0;
};

double avg_gv(const MacroState& state, const ModelParams& params);
double avg_g2(const MacroState& state, const ModelParams& params, const QuadratureSpec& spec = {});
double avg_fu(const MacroState& state, const ModelParams& params);
double avg_fv(const MacroState& state, const ModelParams& params);
double avg_f2(const MacroState& state, const ModelParams& params);
double avg_gu(const MacroState& state, const ModelParams& params);
double avg_fy(const MacroState& state, const ModelParams& params);
double avg_gy(const MacroState& state, const ModelParams& params);

// <g f> = -eta_B eta_J * P[v d < 0 and u v < 0], evaluated by nested
// quadrature:
//
//   <gf> = -2 eta_B eta_J * sum over y-ranges (0, a) and (-inf, -a) of
//          int Dy int_{-R_B y / sqrt(1-R_B^2)}^{inf} Dz
//              H( (y R_J sqrt(1-R_B^2) + z (R_BJ - R_B R_J)) / sqrt(det) )
//
// where det is the Gram determinant of the state. |R_BJ| = 1 reduces exactly
// (the student either never or always fires); other singular covariances
// throw DegenerateCovarianceError and are left to the Monte Carlo oracle.
double avg_gf(const MacroState& state, const ModelParams& params, const QuadratureSpec& spec = {});

struct OracleEstimate {
    double mean = 0.0;
    double std_error = 0.0;
};

using TrivariateFn = std::function<double(double y, double v, double u)>;

// Brute-force validator: sample mean and standard error of fn over n_samples
// trivariate normals drawn through the triangular factor of cov.
// Deterministic for a fixed seed (per standard-library build).
OracleEstimate oracle_average(const TrivariateFn& fn, const Covariance3& cov,
                              std::size_t n_samples, std::uint64_t seed);

// Same sampling pass shared across several integrands.
std::vector<OracleEstimate> oracle_averages(std::span<const TrivariateFn> fns,
                                            const Covariance3& cov, std::size_t n_samples,
                                            std::uint64_t seed);

// The nine update-function products as plain (y, v, u) integrands, in
// AveragesSet field order; the oracle side of every closed form above.
std::vector<TrivariateFn> average_integrands(const ModelParams& params);

AveragesSet compute_all(const MacroState& state, const ModelParams& params,
                        const QuadratureSpec& spec = {});

} // namespace mtlab

#endif // MTLAB_AVERAGES_HPP
