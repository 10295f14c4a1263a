#pragma once

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "kpp/constraints.hpp"
#include "kpp/grid.hpp"

namespace kpp {

/// Smooth positive random field: base * (1 + sum of a few low trig modes with
/// 1/n-damped uniform coefficients). The deviation is rescaled if it would
/// drive the minimum below floor_frac * base.
inline CoefField random_smooth_positive(const PeriodicGrid& g, std::mt19937_64& rng,
                                        double base = 1.0, double rel_amp = 0.3, int modes = 4,
                                        double floor_frac = 0.05) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> ac(static_cast<size_t>(modes)), as(static_cast<size_t>(modes));
    for (int n = 0; n < modes; ++n) {
        ac[static_cast<size_t>(n)] = rel_amp * u(rng) / (n + 1);
        as[static_cast<size_t>(n)] = rel_amp * u(rng) / (n + 1);
    }
    std::vector<double> dev(static_cast<size_t>(g.size), 0.0);
    for (int i = 0; i < g.size; ++i) {
        const double x = g.x(i);
        for (int n = 0; n < modes; ++n) {
            const double w = 2.0 * std::numbers::pi * (n + 1) / g.length;
            dev[static_cast<size_t>(i)] += ac[static_cast<size_t>(n)] * std::cos(w * x) +
                                           as[static_cast<size_t>(n)] * std::sin(w * x);
        }
    }
    double worst = 0.0;
    for (double d : dev) worst = std::max(worst, -d);
    double scale = 1.0;
    if (worst > 1.0 - floor_frac) scale = (1.0 - floor_frac) / worst;
    std::vector<double> v(static_cast<size_t>(g.size));
    for (int i = 0; i < g.size; ++i)
        v[static_cast<size_t>(i)] = base * (1.0 + scale * dev[static_cast<size_t>(i)]);
    return CoefField(g, std::move(v));
}

/// Random feasible field of the given constraint class.
inline CoefField random_feasible(const PeriodicGrid& g, std::mt19937_64& rng,
                                 const ConstraintSpec& spec, double rel_amp = 0.35) {
    if (spec.is_box()) {
        const auto& bx = spec.box_params();
        std::uniform_real_distribution<double> u(0.0, bx.height);
        GridFunction raw(g);
        // piecewise-random plateau values over ~8 blocks, smoother than white noise
        const int blocks = 8;
        std::vector<double> level(static_cast<size_t>(blocks));
        for (double& l : level) l = u(rng);
        for (int i = 0; i < g.size; ++i) raw[i] = level[static_cast<size_t>((i * blocks) / g.size)];
        return project_box(raw, spec);
    }
    const CoefField base = random_smooth_positive(g, rng, spec.feasible_constant(), rel_amp);
    return project_scale(base, spec).first;
}

/// Mean-zero random band-limited direction with unit L2 norm.
inline GridFunction random_direction(const PeriodicGrid& g, std::mt19937_64& rng, int modes = 5) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    GridFunction v(g);
    for (int n = 1; n <= modes; ++n) {
        const double a = u(rng) / n, b = u(rng) / n;
        const double w = 2.0 * std::numbers::pi * n / g.length;
        for (int i = 0; i < g.size; ++i) {
            const double x = g.x(i);
            v[i] += a * std::cos(w * x) + b * std::sin(w * x);
        }
    }
    const double n2 = l2_norm(v);
    for (double& s : v.values) s /= n2 > 0.0 ? n2 : 1.0;
    return v;
}

}  // namespace kpp
