#include "mtlab/generalization.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace mtlab {

GenErrorResult gen_error(double r, double a, const QuadratureSpec& spec) {
    if (!(a > 0.0)) throw std::invalid_argument("gen_error: a must be > 0");
    if (std::abs(r) > 1.0) throw std::invalid_argument("gen_error: R must lie in [-1, 1]");

    // Indicator limits: at R = 1 the predictor errs exactly on |y| < a, at
    // R = -1 exactly on |y| > a.
    constexpr double kAnalyticBand = 1e-12;
    if (r >= 1.0 - kAnalyticBand) return {1.0 - 2.0 * h_tail(a), 0.0};
    if (r <= -1.0 + kAnalyticBand) return {2.0 * h_tail(a), 0.0};

    const double slope = r / std::sqrt((1.0 - r) * (1.0 + r));
    const auto wedge = integrate_1d_result(
        [slope](double y) { return std_normal_density(y) * h_tail(-slope * y); }, 0.0, a, spec);
    const auto tail = integrate_1d_result(
        [slope](double y) { return std_normal_density(y) * h_tail(slope * y); }, a,
        std::numeric_limits<double>::infinity(), spec);

    GenErrorResult out;
    out.value = 2.0 * (wedge.value + tail.value);
    out.quadrature_abs_err = 2.0 * (wedge.abs_err_bound + tail.abs_err_bound) + 4.0 * spec.abs_tol;
    return out;
}

OptimalR optimal_r(double a) {
    if (!(a > 0.0)) throw std::invalid_argument("optimal_r: a must be > 0");
    const double two_ln2 = 2.0 * std::numbers::ln2;
    if (a * a >= two_ln2) return {0.0, true};
    return {std::sqrt((two_ln2 - a * a) / two_ln2), false};
}

std::vector<std::pair<double, double>> gen_error_curve(double a, std::span<const double> grid,
                                                       const QuadratureSpec& spec) {
    std::vector<std::pair<double, double>> out;
    out.reserve(grid.size());
    for (double r : grid) out.emplace_back(r, gen_error(r, a, spec).value);
    return out;
}

} // namespace mtlab
