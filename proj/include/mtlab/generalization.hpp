#ifndef MTLAB_GENERALIZATION_HPP
#define MTLAB_GENERALIZATION_HPP

#include <span>
#include <utility>
#include <vector>

#include "mtlab/gaussmath.hpp"

namespace mtlab {

struct GenErrorResult {
    double value = 0.0;            // probability in [0, 1]
    double quadrature_abs_err = 0.0; // reported bound (0 on the analytic branches)
};

// Probability that a sign predictor with direction cosine R to the true
// teacher disagrees with the nonmonotonic output sgn((y-a)y(y+a)):
//
//   eps_g(R, a) = 2 * [ int_0^a H(-R y / sqrt(1-R^2)) Dy
//                     + int_a^inf H(R y / sqrt(1-R^2)) Dy ],
//
// with the R = +-1 limits evaluated in indicator form. Continuous in R.
GenErrorResult gen_error(double r, double a, const QuadratureSpec& spec = {});

struct OptimalR {
    double r = 0.0;
    bool monotone_regime = false;
};

// Location of the minimum of eps_g(., a) over R in [0, 1]. For
// a < sqrt(2 ln 2) this is the interior point sqrt((2 ln 2 - a^2)/(2 ln 2));
// past the threshold eps_g grows monotonically with R, so the best alignment
// on [0, 1] degenerates to R = 0 and the monotone flag is set.
OptimalR optimal_r(double a);

// Element-wise eps_g over a grid of direction cosines, in input order.
std::vector<std::pair<double, double>> gen_error_curve(double a, std::span<const double> grid,
                                                       const QuadratureSpec& spec = {});

} // namespace mtlab

#endif // MTLAB_GENERALIZATION_HPP
