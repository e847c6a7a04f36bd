#ifndef MTLAB_TESTS_SUPPORT_HPP
#define MTLAB_TESTS_SUPPORT_HPP

#include <cmath>
#include <functional>

namespace mtlab::testing {

// Golden-section search for the minimizer of a unimodal function on [lo, hi].
inline double golden_section_minimize(const std::function<double(double)>& f, double lo, double hi,
                                      double tol = 1e-6) {
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - phi * (b - a);
    double d = a + phi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

} // namespace mtlab::testing

#endif // MTLAB_TESTS_SUPPORT_HPP
