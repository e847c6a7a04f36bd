#ifndef MTLAB_GAUSSMATH_HPP
#define MTLAB_GAUSSMATH_HPP

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mtlab/errors.hpp"

namespace mtlab {

inline constexpr double kInvSqrt2Pi = 0.39894228040143267794; // 1/sqrt(2*pi)
inline constexpr double kSqrt2Pi = 2.50662827463100050242;

// Policy for the adaptive quadrature: target absolute error, subdivision
// budget, and where to truncate semi-infinite ranges (in standard deviations;
// the tail mass beyond 10 sigma is < 1e-23, far below any tolerance in use).
struct QuadratureSpec {
    double abs_tol = 1e-10;
    int max_subdivisions = 2000;
    double infinite_cutoff = 10.0;

    void validate() const {
        if (!(abs_tol > 0.0)) throw std::invalid_argument("QuadratureSpec: abs_tol must be > 0");
        if (max_subdivisions < 1) throw std::invalid_argument("QuadratureSpec: max_subdivisions must be >= 1");
        if (!(infinite_cutoff >= 8.0)) throw std::invalid_argument("QuadratureSpec: infinite_cutoff must be >= 8");
    }
};

// Standard normal density exp(-y^2/2)/sqrt(2*pi).
inline double std_normal_density(double y) {
    return kInvSqrt2Pi * std::exp(-0.5 * y * y);
}

// Upper-tail probability H(u) of the standard normal, via the complementary
// error function; stable for large |u| where quadrature of the tail would
// cancel. Accepts +-infinity and returns the 0/1 limits.
inline double h_tail(double u) {
    return 0.5 * std::erfc(u * 0.70710678118654752440); // u / sqrt(2)
}

struct QuadratureResult {
    double value = 0.0;
    double abs_err_bound = 0.0;
};

namespace detail {

// 15-point Gauss-Legendre nodes (positive half) and weights on [-1, 1].
inline constexpr double kGl15Nodes[8] = {
    0.0,
    0.20119409399743452230,
    0.39415134707756336990,
    0.57097217260853884754,
    0.72441773136017004742,
    0.84820658341042721620,
    0.93727339240070590431,
    0.98799251802048542849,
};
inline constexpr double kGl15Weights[8] = {
    0.20257824192556127288,
    0.19843148532711157646,
    0.18616100001556221103,
    0.16626920581699393355,
    0.13957067792615431445,
    0.10715922046717193501,
    0.07036604748810812471,
    0.03075324199611726835,
};

template <typename F>
double gl15_panel(F&& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double sum = kGl15Weights[0] * f(c);
    for (int i = 1; i < 8; ++i) {
        const double dx = h * kGl15Nodes[i];
        sum += kGl15Weights[i] * (f(c + dx) + f(c - dx));
    }
    return h * sum;
}

} // namespace detail

// Adaptive quadrature of a continuous integrand over (lo, hi), either bound
// possibly infinite. A panel is accepted when bisecting it moves the
// Gauss-Legendre estimate by less than its share of abs_tol; otherwise the
// halves are pushed back onto the work stack. Deterministic for a fixed spec.
// Throws QuadratureError when the subdivision budget runs out first.
template <typename F>
QuadratureResult integrate_1d_result(F&& f, double lo, double hi, const QuadratureSpec& spec = {}) {
    spec.validate();
    if (!(lo < hi)) throw std::invalid_argument("integrate_1d: requires lo < hi");

    const double cut = spec.infinite_cutoff;
    double a = std::isinf(lo) ? -cut : lo;
    double b = std::isinf(hi) ? cut : hi;
    if (!(a < b)) return {0.0, 0.0}; // the finite bound already lies past the truncation point

    struct Segment {
        double a, b, estimate;
    };
    std::vector<Segment> work;
    work.push_back({a, b, detail::gl15_panel(f, a, b)});

    const double span = b - a;
    double total = 0.0;
    double err_bound = 0.0;
    int splits = 0;
    while (!work.empty()) {
        const Segment seg = work.back();
        work.pop_back();
        const double m = 0.5 * (seg.a + seg.b);
        const double left = detail::gl15_panel(f, seg.a, m);
        const double right = detail::gl15_panel(f, m, seg.b);
        const double delta = (left + right) - seg.estimate;
        const double local_tol = spec.abs_tol * (seg.b - seg.a) / span;
        if (std::abs(delta) <= local_tol || m <= seg.a || m >= seg.b) {
            total += left + right;
            err_bound += std::abs(delta);
            continue;
        }
        if (++splits > spec.max_subdivisions) {
            throw QuadratureError("integrate_1d: subdivision budget exhausted on [" +
                                  std::to_string(seg.a) + ", " + std::to_string(seg.b) + "]");
        }
        work.push_back({seg.a, m, left});
        work.push_back({m, seg.b, right});
    }
    return {total, err_bound};
}

template <typename F>
double integrate_1d(F&& f, double lo, double hi, const QuadratureSpec& spec = {}) {
    return integrate_1d_result(std::forward<F>(f), lo, hi, spec).value;
}

} // namespace mtlab

#endif // MTLAB_GAUSSMATH_HPP
