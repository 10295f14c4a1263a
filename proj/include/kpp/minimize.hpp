#pragma once

#include <cmath>
#include <functional>
#include <utility>

namespace kpp {

/// Golden-section minimization of a unimodal function on [a, b].
/// Returns the midpoint of the final bracket and its value.
template <typename F>
std::pair<double, double> golden_section_min(F&& f, double a, double b, double xtol,
                                             int max_iter = 200) {
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < max_iter && (b - a) > xtol; ++it) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = f(d);
        }
    }
    const double x = 0.5 * (a + b);
    return {x, f(x)};
}

}  // namespace kpp
