#include "mtlab/model.hpp"

#include <cmath>
#include <string>

namespace mtlab {

namespace {

int sign_pm(double z) {
    return z >= 0.0 ? +1 : -1;
}

double step01(double z) {
    return z >= 0.0 ? 1.0 : 0.0;
}

} // namespace

void ModelParams::validate() const {
    if (!(a > 0.0)) throw std::invalid_argument("ModelParams: a must be > 0");
    if (!(eta_b > 0.0)) throw std::invalid_argument("ModelParams: eta_B must be > 0");
    if (!(eta_j > 0.0)) throw std::invalid_argument("ModelParams: eta_J must be > 0");
}

double MacroState::gram_det() const {
    return 1.0 + 2.0 * r_b * r_j * r_bj - r_b * r_b - r_j * r_j - r_bj * r_bj;
}

bool MacroState::feasible(double tol) const {
    const bool cosines_ok = std::abs(r_b) <= 1.0 && std::abs(r_j) <= 1.0 && std::abs(r_bj) <= 1.0;
    return cosines_ok && len_b > 0.0 && len_j > 0.0 && gram_det() >= -tol;
}

void MacroState::validate(double tol) const {
    if (std::abs(r_b) > 1.0 || std::abs(r_j) > 1.0 || std::abs(r_bj) > 1.0)
        throw InfeasibleStateError("MacroState: direction cosine outside [-1, 1]");
    if (!(len_b > 0.0) || !(len_j > 0.0))
        throw InfeasibleStateError("MacroState: lengths must be positive");
    if (gram_det() < -tol)
        throw InfeasibleStateError("MacroState: Gram determinant " + std::to_string(gram_det()) +
                                   " below feasibility tolerance");
}

double Covariance3::determinant() const {
    return 1.0 + 2.0 * r_b * r_j * r_bj - r_b * r_b - r_j * r_j - r_bj * r_bj;
}

std::array<std::array<double, 3>, 3> Covariance3::cholesky_lower() const {
    if (std::abs(r_b) > 1.0 + kGramTol || std::abs(r_j) > 1.0 + kGramTol ||
        std::abs(r_bj) > 1.0 + kGramTol || determinant() < -kGramTol) {
        throw InfeasibleStateError("Covariance3: matrix is not positive semidefinite");
    }

    std::array<std::array<double, 3>, 3> l{};
    l[0][0] = 1.0;
    l[1][0] = r_b;
    const double d22 = 1.0 - r_b * r_b;
    l[1][1] = std::sqrt(std::max(d22, 0.0));
    l[2][0] = r_j;
    if (l[1][1] > 1e-12) {
        l[2][1] = (r_bj - r_b * r_j) / l[1][1];
    } else {
        // v is collinear with y; feasibility forces R_BJ = R_B * R_J.
        if (std::abs(r_bj - r_b * r_j) > 1e-6)
            throw InfeasibleStateError("Covariance3: degenerate pivot with inconsistent R_BJ");
        l[2][1] = 0.0;
    }
    const double d33 = 1.0 - l[2][0] * l[2][0] - l[2][1] * l[2][1];
    if (d33 < -1e-7)
        throw InfeasibleStateError("Covariance3: trailing pivot negative beyond round-off");
    l[2][2] = std::sqrt(std::max(d33, 0.0));
    return l;
}

int true_teacher_output(double y, double a) {
    return sign_pm((y - a) * y * (y + a));
}

double teacher_update_magnitude(double y, double v, const ModelParams& params) {
    const int d = true_teacher_output(y, params.a);
    return params.eta_b * step01(-v * d) * d;
}

double student_update_magnitude(double u, double v, double eta_j) {
    return eta_j * step01(-u * v) * sign_pm(v);
}

Covariance3 build_covariance(const MacroState& state) {
    state.validate();
    return Covariance3{state.r_b, state.r_j, state.r_bj};
}

} // namespace mtlab
