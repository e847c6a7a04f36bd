#ifndef MTLAB_MODEL_HPP
#define MTLAB_MODEL_HPP

#include <array>

#include "mtlab/errors.hpp"

namespace mtlab {

// Gram determinants down to this value are treated as round-off and clamped;
// anything below is a genuinely infeasible set of direction cosines.
inline constexpr double kGramTol = 1e-9;

// a >= sqrt(2 ln 2): the generalization error is monotone in R and the
// interior optimum of the nonmonotonic regime disappears.
inline constexpr double kMonotoneThreshold = 1.17741002251547469101; // sqrt(2 ln 2)

// Static scalars of the system: the true teacher's threshold and the two
// learning rates.
struct ModelParams {
    double a = 0.5;
    double eta_b = 0.1;
    double eta_j = 0.2;

    void validate() const;
    bool monotone_regime() const { return a >= kMonotoneThreshold; }
};

// The five order parameters: direction cosines of (A,B), (A,J), (B,J) and the
// norm ratios of the moving teacher and the student.
struct MacroState {
    double r_b = 0.0;
    double r_j = 0.0;
    double r_bj = 0.0;
    double len_b = 1.0;
    double len_j = 1.0;

    // det of the (y, v, u) correlation matrix: 1 + 2*R_B*R_J*R_BJ - R_B^2 - R_J^2 - R_BJ^2.
    double gram_det() const;
    bool feasible(double tol = kGramTol) const;
    void validate(double tol = kGramTol) const;
};

// Correlation matrix of the internal potentials (y, v, u): unit diagonal,
// off-diagonals R_B, R_J, R_BJ.
struct Covariance3 {
    double r_b = 0.0;
    double r_j = 0.0;
    double r_bj = 0.0;

    std::array<std::array<double, 3>, 3> matrix() const {
        return {{{1.0, r_b, r_j}, {r_b, 1.0, r_bj}, {r_j, r_bj, 1.0}}};
    }
    double determinant() const;

    // Lower-triangular factor L with L*L^T equal to the matrix; semidefinite
    // inputs get their vanishing pivots clamped to zero. Throws
    // InfeasibleStateError when the matrix is indefinite beyond kGramTol.
    std::array<std::array<double, 3>, 3> cholesky_lower() const;
};

// Output of the nonmonotonic true teacher: sgn((y-a)*y*(y+a)), with the
// sgn(0) = +1 convention. +1 on [-a, 0] and [a, inf), -1 elsewhere.
int true_teacher_output(double y, double a);

// Perceptron update magnitude g of the moving teacher: eta_B on disagreement
// with the true teacher (signed toward its label), 0 otherwise. The step
// function takes the +1 branch at exactly zero.
double teacher_update_magnitude(double y, double v, const ModelParams& params);

// Perceptron update magnitude f of the student against the moving teacher's
// label sgn(v).
double student_update_magnitude(double u, double v, double eta_j);

// Covariance of Eq-level potentials for a macroscopic state. Throws
// InfeasibleStateError when the Gram condition fails beyond tolerance.
Covariance3 build_covariance(const MacroState& state);

} // namespace mtlab

#endif // MTLAB_MODEL_HPP
