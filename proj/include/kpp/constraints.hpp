#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "kpp/grid.hpp"

namespace kpp {

struct PowerConstraint {
    double p;  // f(b) = b^p, p > 1
};

struct GeneralConstraint {
    std::function<double(double)> f;
    std::function<double(double)> fprime;
    std::function<double(double)> fsecond;  // optional; needed only for expansions
};

struct BoxConstraint {
    double level;   // alpha: prescribed mean
    double height;  // h: pointwise cap, 0 < alpha < h
};

/// Constraint class A_f: L-periodic b >= 0 with (1/L) int f(b) = beta
/// (or int f(b) = beta when normalized is false), or the box class A_1
/// {0 <= b <= height, mean b = level}.
struct ConstraintSpec {
    double period = 1.0;
    double beta = 1.0;
    bool normalized = true;
    std::variant<PowerConstraint, GeneralConstraint, BoxConstraint> kind;

    static ConstraintSpec power(double L, double beta, double p, bool normalized = true) {
        if (!(p > 1.0)) throw std::invalid_argument("ConstraintSpec: power constraint needs p > 1");
        if (!(beta > 0.0)) throw std::invalid_argument("ConstraintSpec: beta must be positive");
        ConstraintSpec s;
        s.period = L;
        s.beta = beta;
        s.normalized = normalized;
        s.kind = PowerConstraint{p};
        return s;
    }

    static ConstraintSpec general(double L, double beta, std::function<double(double)> f,
                                  std::function<double(double)> fp,
                                  std::function<double(double)> fpp = nullptr,
                                  bool normalized = true) {
        if (!f || !fp) throw std::invalid_argument("ConstraintSpec: general constraint needs f and f'");
        if (!(beta > 0.0)) throw std::invalid_argument("ConstraintSpec: beta must be positive");
        ConstraintSpec s;
        s.period = L;
        s.beta = beta;
        s.normalized = normalized;
        s.kind = GeneralConstraint{std::move(f), std::move(fp), std::move(fpp)};
        return s;
    }

    static ConstraintSpec box(double L, double alpha, double h) {
        if (!(0.0 < alpha && alpha < h))
            throw std::invalid_argument("ConstraintSpec: box constraint needs 0 < alpha < h");
        ConstraintSpec s;
        s.period = L;
        s.beta = alpha;
        s.kind = BoxConstraint{alpha, h};
        return s;
    }

    bool is_box() const { return std::holds_alternative<BoxConstraint>(kind); }
    const BoxConstraint& box_params() const { return std::get<BoxConstraint>(kind); }

    double f(double b) const {
        if (auto* pw = std::get_if<PowerConstraint>(&kind)) return std::pow(b, pw->p);
        if (auto* gn = std::get_if<GeneralConstraint>(&kind)) return gn->f(b);
        return b;  // box: f = id
    }
    double fprime(double b) const {
        if (auto* pw = std::get_if<PowerConstraint>(&kind)) return pw->p * std::pow(b, pw->p - 1.0);
        if (auto* gn = std::get_if<GeneralConstraint>(&kind)) return gn->fprime(b);
        throw std::invalid_argument("ConstraintSpec: box constraint has no smooth multiplier f'");
    }
    bool has_fsecond() const {
        if (std::holds_alternative<PowerConstraint>(kind)) return true;
        if (auto* gn = std::get_if<GeneralConstraint>(&kind)) return static_cast<bool>(gn->fsecond);
        return false;
    }
    double fsecond(double b) const {
        if (auto* pw = std::get_if<PowerConstraint>(&kind))
            return pw->p * (pw->p - 1.0) * std::pow(b, pw->p - 2.0);
        if (auto* gn = std::get_if<GeneralConstraint>(&kind)) {
            if (!gn->fsecond) throw std::invalid_argument("ConstraintSpec: f'' not supplied");
            return gn->fsecond(b);
        }
        throw std::invalid_argument("ConstraintSpec: box constraint has no f''");
    }

    /// Feasible constant f^{-1}(beta); for the box class, the level alpha.
    double feasible_constant() const {
        if (auto* pw = std::get_if<PowerConstraint>(&kind)) return std::pow(beta, 1.0 / pw->p);
        if (is_box()) return box_params().level;
        // monotone f: bisection on f(c) = beta
        double lo = 0.0, hi = 1.0;
        int guard = 0;
        while (f(hi) < beta && guard++ < 200) hi *= 2.0;
        for (int i = 0; i < 200; ++i) {
            const double mid = 0.5 * (lo + hi);
            (f(mid) < beta ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    }
};

/// (1/L) int f(b) (or int f(b) when the spec is unnormalized); mean of b for
/// the box class.
inline double constraint_value(const CoefField& b, const ConstraintSpec& spec) {
    double s = 0.0;
    for (double v : b.values) s += spec.f(v);
    s *= b.grid.spacing;
    return spec.normalized ? s / b.grid.length : s;
}

inline bool is_feasible(const CoefField& b, const ConstraintSpec& spec, double tol = 1e-9) {
    if (spec.is_box()) {
        const auto& bx = spec.box_params();
        if (max_value(b) > bx.height + tol) return false;
        return std::abs(mean(b) - bx.level) <= tol * (1.0 + bx.level);
    }
    return std::abs(constraint_value(b, spec) - spec.beta) <= tol * (1.0 + spec.beta);
}

/// Scaling projection P(b) = mu(b) b with int f(mu b) = beta L. The scalar
/// equation is strictly monotone in mu, solved by bracketing bisection with a
/// short Newton polish.
inline std::pair<CoefField, double> project_scale(const CoefField& b, const ConstraintSpec& spec) {
    if (spec.is_box())
        throw std::invalid_argument("project_scale: box constraints use project_box");
    if (!(max_value(b) > 0.0))
        throw std::invalid_argument("project_scale: b == 0 admits no feasible scaling");

    auto value = [&](double mu) {
        double s = 0.0;
        for (double v : b.values) s += spec.f(mu * v);
        s *= b.grid.spacing;
        return (spec.normalized ? s / b.grid.length : s) - spec.beta;
    };

    double lo = 1e-8, hi = 1.0;
    int guard = 0;
    while (value(hi) < 0.0 && guard++ < 200) hi *= 2.0;
    if (guard >= 200) throw convergence_error("project_scale: no feasible scaling found");
    if (value(lo) > 0.0) throw convergence_error("project_scale: constraint exceeded at mu -> 0");

    for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        (value(mid) < 0.0 ? lo : hi) = mid;
    }
    double mu = 0.5 * (lo + hi);
    for (int i = 0; i < 3; ++i) {
        double dv = 0.0;
        for (double v : b.values) dv += spec.fprime(mu * v) * v;
        dv *= b.grid.spacing;
        if (spec.normalized) dv /= b.grid.length;
        if (!(dv > 0.0)) break;
        const double next = mu - value(mu) / dv;
        if (next > lo && next < hi) mu = next;
    }

    std::vector<double> scaled(b.values);
    for (double& v : scaled) v *= mu;
    return {CoefField(b.grid, std::move(scaled)), mu};
}

/// Euclidean projection onto {0 <= b <= h, mean b = alpha}: clip(b - s, 0, h)
/// with the shift s chosen by bisection (water-filling).
inline CoefField project_box(const GridFunction& b, const ConstraintSpec& spec) {
    if (!spec.is_box()) throw std::invalid_argument("project_box: spec is not a box constraint");
    const auto& bx = spec.box_params();
    auto clipped_mean = [&](double s) {
        double acc = 0.0;
        for (double v : b.values) acc += std::clamp(v - s, 0.0, bx.height);
        return acc / b.grid.size;
    };
    double lo = min_value(b) - bx.height - 1.0;  // mean = height > alpha
    double hi = max_value(b) + 1.0;              // mean = 0 < alpha
    for (int i = 0; i < 100; ++i) {
        const double mid = 0.5 * (lo + hi);
        (clipped_mean(mid) > bx.level ? lo : hi) = mid;
    }
    const double s = 0.5 * (lo + hi);
    std::vector<double> v(b.values);
    for (double& x : v) x = std::clamp(x - s, 0.0, bx.height);
    return CoefField(b.grid, std::move(v));
}

/// The extremal step of the box class: height h, width alpha L / h, centered
/// at L/2. Edge cells carry fractional values so the discrete mean is exactly
/// alpha.
inline CoefField build_b1(const ConstraintSpec& spec, int N) {
    if (!spec.is_box()) throw std::invalid_argument("build_b1: spec is not a box constraint");
    const auto& bx = spec.box_params();
    const PeriodicGrid g(spec.period, N);
    const double width = bx.level * spec.period / bx.height;
    const double a = 0.5 * (spec.period - width);  // plateau = [a, a + width]
    const double h = g.spacing;
    auto cover = [&](double u, double v) {  // |[u,v] ∩ [a, a+width]|, no wrap needed
        return std::max(0.0, std::min(v, a + width) - std::max(u, a));
    };
    std::vector<double> vals(static_cast<size_t>(N));
    for (int i = 0; i < N; ++i) {
        const double u = g.x(i) - 0.5 * h;
        // the cell of sample 0 wraps; its halves both lie outside the centered plateau
        const double c = cover(u, u + h) + cover(u + spec.period, u + spec.period + h);
        vals[static_cast<size_t>(i)] = bx.height * c / h;
    }
    return CoefField(g, std::move(vals));
}

}  // namespace kpp
