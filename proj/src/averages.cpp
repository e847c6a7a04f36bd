#include "mtlab/averages.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "mtlab/generalization.hpp"
#include "mtlab/rng.hpp"

namespace mtlab {

namespace {

// 2 exp(-a^2/2) - 1: correlation between the true teacher's label and y.
double label_y_gain(double a) {
    return 2.0 * std::exp(-0.5 * a * a) - 1.0;
}

} // namespace

double avg_gv(const MacroState& state, const ModelParams& params) {
    return params.eta_b * kInvSqrt2Pi * (state.r_b * label_y_gain(params.a) - 1.0);
}

double avg_g2(const MacroState& state, const ModelParams& params, const QuadratureSpec& spec) {
    // g^2 = eta_B^2 on every teacher error, so <g^2> is eta_B^2 times the
    // moving teacher's generalization error.
    return params.eta_b * params.eta_b * gen_error(state.r_b, params.a, spec).value;
}

double avg_fu(const MacroState& state, const ModelParams& params) {
    return params.eta_j * (state.r_bj - 1.0) * kInvSqrt2Pi;
}

double avg_fv(const MacroState& state, const ModelParams& params) {
    return params.eta_j * (1.0 - state.r_bj) * kInvSqrt2Pi;
}

double avg_f2(const MacroState& state, const ModelParams& params) {
    // Sign-disagreement probability of two unit normals with correlation
    // R_BJ; the arccos branch stays continuous through R_BJ <= 0.
    return params.eta_j * params.eta_j * std::acos(state.r_bj) / std::numbers::pi;
}

double avg_gu(const MacroState& state, const ModelParams& params) {
    return params.eta_b * kInvSqrt2Pi * (state.r_j * label_y_gain(params.a) - state.r_bj);
}

double avg_fy(const MacroState& state, const ModelParams& params) {
    return params.eta_j * (state.r_b - state.r_j) * kInvSqrt2Pi;
}

double avg_gy(const MacroState& state, const ModelParams& params) {
    return params.eta_b * kInvSqrt2Pi * (label_y_gain(params.a) - state.r_b);
}

double avg_gf(const MacroState& state, const ModelParams& params, const QuadratureSpec& spec) {
    state.validate();
    const double eta2 = params.eta_b * params.eta_j;
    if (eta2 == 0.0) return 0.0;

    // |R_BJ| = 1: u and v carry the same sign information, so the student
    // fires never (aligned) or always (anti-aligned).
    constexpr double kExactBand = 1e-12;
    if (state.r_bj >= 1.0 - kExactBand) return 0.0;
    if (state.r_bj <= -1.0 + kExactBand)
        return -eta2 * gen_error(state.r_b, params.a, spec).value;

    if (std::abs(state.r_b) >= 1.0 - kExactBand)
        throw DegenerateCovarianceError("avg_gf: |R_B| = 1 collapses the inner integral; "
                                        "use the Monte Carlo oracle for this state");

    const double rb = state.r_b;
    const double rj = state.r_j;
    const double rbj = state.r_bj;
    const double sb = std::sqrt((1.0 - rb) * (1.0 + rb));
    // Near-singular determinants make the H argument saturate to a step,
    // which is the correct limit; the floor only avoids 0/0.
    const double sdet = std::sqrt(std::max(state.gram_det(), 1e-300));
    const double slope_b = rb / sb;
    const double ky = rj * sb / sdet;
    const double kz = (rbj - rb * rj) / sdet;
    const double inf = std::numeric_limits<double>::infinity();

    auto inner = [&](double y) {
        return integrate_1d(
            [=](double z) { return std_normal_density(z) * h_tail(ky * y + kz * z); },
            -slope_b * y, inf, spec);
    };
    auto outer_integrand = [&](double y) { return std_normal_density(y) * inner(y); };

    const double wedge = integrate_1d(outer_integrand, 0.0, params.a, spec);
    const double tail = integrate_1d(outer_integrand, -inf, -params.a, spec);
    return -2.0 * eta2 * (wedge + tail);
}

std::vector<TrivariateFn> average_integrands(const ModelParams& params) {
    const ModelParams p = params;
    auto g = [p](double y, double v) { return teacher_update_magnitude(y, v, p); };
    auto f = [p](double u, double v) { return student_update_magnitude(u, v, p.eta_j); };
    return {
        [g](double y, double v, double) { return g(y, v) * v; },
        [g](double y, double v, double) { const double m = g(y, v); return m * m; },
        [f](double, double v, double u) { return f(u, v) * u; },
        [f](double, double v, double u) { const double m = f(u, v); return m * m; },
        [g](double y, double v, double u) { return g(y, v) * u; },
        [f](double, double v, double u) { return f(u, v) * v; },
        [g, f](double y, double v, double u) { return g(y, v) * f(u, v); },
        [f](double y, double v, double u) { return f(u, v) * y; },
        [g](double y, double v, double) { return g(y, v) * y; },
    };
}

std::vector<OracleEstimate> oracle_averages(std::span<const TrivariateFn> fns,
                                            const Covariance3& cov, std::size_t n_samples,
                                            std::uint64_t seed) {
    if (n_samples < 10'000)
        throw std::invalid_argument("oracle_averages: need at least 1e4 samples");
    const auto l = cov.cholesky_lower();

    std::mt19937_64 rng = make_stream(seed, 0, Stream::oracle);
    std::normal_distribution<double> normal(0.0, 1.0);

    std::vector<double> sum(fns.size(), 0.0);
    std::vector<double> sum_sq(fns.size(), 0.0);
    for (std::size_t i = 0; i < n_samples; ++i) {
        const double z1 = normal(rng);
        const double z2 = normal(rng);
        const double z3 = normal(rng);
        const double y = z1;
        const double v = l[1][0] * z1 + l[1][1] * z2;
        const double u = l[2][0] * z1 + l[2][1] * z2 + l[2][2] * z3;
        for (std::size_t k = 0; k < fns.size(); ++k) {
            const double val = fns[k](y, v, u);
            sum[k] += val;
            sum_sq[k] += val * val;
        }
    }

    std::vector<OracleEstimate> out(fns.size());
    const double n = static_cast<double>(n_samples);
    for (std::size_t k = 0; k < fns.size(); ++k) {
        const double mean = sum[k] / n;
        const double var = std::max(sum_sq[k] / n - mean * mean, 0.0);
        out[k] = {mean, std::sqrt(var / n)};
    }
    return out;
}

OracleEstimate oracle_average(const TrivariateFn& fn, const Covariance3& cov,
                              std::size_t n_samples, std::uint64_t seed) {
    return oracle_averages(std::span<const TrivariateFn>(&fn, 1), cov, n_samples, seed)[0];
}

AveragesSet compute_all(const MacroState& state, const ModelParams& params,
                        const QuadratureSpec& spec) {
    AveragesSet set;
    set.gv = avg_gv(state, params);
    set.g2 = avg_g2(state, params, spec);
    set.fu = avg_fu(state, params);
    set.f2 = avg_f2(state, params);
    set.gu = avg_gu(state, params);
    set.fv = avg_fv(state, params);
    set.gf = avg_gf(state, params, spec);
    set.fy = avg_fy(state, params);
    set.gy = avg_gy(state, params);
    return set;
}

} // namespace mtlab
