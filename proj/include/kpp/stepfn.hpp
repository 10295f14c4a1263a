#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "kpp/grid.hpp"
#include "kpp/minimize.hpp"
#include "kpp/speed.hpp"

namespace kpp {

/// Two-valued periodic coefficient: mu_plus on [0, theta L), mu_minus on the
/// rest of the period.
struct StepProfile {
    double theta;
    double mu_plus;
    double mu_minus;
    double L;

    StepProfile(double theta_, double mu_plus_, double mu_minus_, double L_)
        : theta(theta_), mu_plus(mu_plus_), mu_minus(mu_minus_), L(L_) {
        if (!(theta > 0.0 && theta <= 1.0)) throw std::invalid_argument("StepProfile: theta in (0,1]");
        if (!(mu_plus >= 0.0) || !(mu_minus >= 0.0) || mu_minus > mu_plus)
            throw std::invalid_argument("StepProfile: need 0 <= mu_minus <= mu_plus");
        if (!(L > 0.0)) throw std::invalid_argument("StepProfile: period must be positive");
    }

    double alpha() const { return theta * mu_plus + (1.0 - theta) * mu_minus; }
};

namespace detail {

/// Propagator of w'' + q w = 0 over a cell of length len, stored as
/// e^s * [[a, b], [c, d]] so that hyperbolic growth never overflows.
struct ScaledMat {
    double s = 0.0;
    double a = 1.0, b = 0.0, c = 0.0, d = 1.0;
};

inline ScaledMat piece_propagator(double q, double len) {
    ScaledMat m;
    if (len <= 0.0) return m;
    if (q > 1e-12) {
        const double w = std::sqrt(q);
        m.a = std::cos(w * len);
        m.b = std::sin(w * len) / w;
        m.c = -w * std::sin(w * len);
        m.d = m.a;
    } else if (q < -1e-12) {
        const double g = std::sqrt(-q);
        m.s = g * len;
        const double e = std::exp(-2.0 * m.s);
        m.a = 0.5 * (1.0 + e);
        m.b = 0.5 * (1.0 - e) / g;
        m.c = 0.5 * (1.0 - e) * g;
        m.d = m.a;
    } else {
        m.b = len;  // removable singularity: linear-in-x branch
    }
    return m;
}

/// log(trace of the monodromy matrix) in scaled form; -inf when the trace is
/// nonpositive (then it is certainly below the Floquet target 2 cosh(lambda L)).
inline double log_trace_monodromy(const StepProfile& p, double k) {
    const ScaledMat m1 = piece_propagator(p.mu_plus + k, p.theta * p.L);
    const ScaledMat m2 = piece_propagator(p.mu_minus + k, (1.0 - p.theta) * p.L);
    const double tr = m2.a * m1.a + m2.b * m1.c + m2.c * m1.b + m2.d * m1.d;
    if (!(tr > 0.0)) return -std::numeric_limits<double>::infinity();
    return m1.s + m2.s + std::log(tr);
}

inline double log_floquet_target(double lambda, double L) {
    const double a = std::abs(lambda) * L;
    return a + std::log1p(std::exp(-2.0 * a));  // log(2 cosh(lambda L))
}

}  // namespace detail

/// Principal eigenvalue k(lambda, b) for a two-valued b, from the Hill-equation
/// trace condition trace(M(k)) = 2 cosh(lambda L). Below the first band edge
/// the trace is strictly decreasing in k, so the principal k is the first
/// crossing scanned from the a-priori lower bound upward.
inline double exact_k(const StepProfile& step, double lambda) {
    const double alpha = step.alpha();
    const double L = step.L;
    const double log_target = detail::log_floquet_target(lambda, L);
    auto F = [&](double k) { return detail::log_trace_monodromy(step, k) - log_target; };

    const double neg_k_hi = std::min(alpha + alpha * alpha * L * L, step.mu_plus) + lambda * lambda;
    double lo = -neg_k_hi - 1.0;
    double hi = -(alpha + lambda * lambda) + 1e-9 * (1.0 + alpha + lambda * lambda);

    for (int attempt = 0; attempt < 4; ++attempt) {
        if (F(lo) > 0.0) break;
        lo -= (hi - lo);  // should not happen: the estimate bounds k from below
        if (attempt == 3)
            throw convergence_error("exact_k: lower bracket end not above the Floquet target");
    }

    const int scan = 2048;
    double a = lo, fa = F(lo), b = hi;
    bool found = false;
    for (int i = 1; i <= scan; ++i) {
        const double x = lo + (hi - lo) * i / scan;
        const double fx = F(x);
        if (fa > 0.0 && fx <= 0.0) {
            b = x;
            found = true;
            break;
        }
        a = x;
        fa = fx;
    }
    if (!found)
        throw convergence_error("exact_k: no sign change in bracket (bound violation)");

    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (a + b);
        if (b - a <= 1e-14 * (1.0 + std::abs(mid))) break;
        if (F(mid) > 0.0)
            a = mid;
        else
            b = mid;
    }
    return 0.5 * (a + b);
}

/// Minimal speed for a step profile via the exact dispersion relation.
inline SpeedResult cstar_step(const StepProfile& step) {
    return detail::minimize_over_lambda([&](double lam) { return exact_k(step, lam); },
                                        step.alpha(), step.L);
}

/// Closed-form minimizer location for the L -> infinity limit with zero valley.
inline double hfr_mtheta(double theta, double mu) {
    const double den =
        3.0 * theta * theta + 2.0 * theta - 1.0 +
        (1.0 - theta) * std::sqrt(9.0 * theta * theta - 2.0 * theta + 1.0);
    return 8.0 * mu * theta * theta / den;
}

/// Large-period limit of c* for the two-valued profile:
///   lim c* = min_{m >= mu_plus} m / j(m),  j(m) = theta sqrt(m - mu_plus)
///                                                 + (1-theta) sqrt(m - mu_minus).
/// Minimizing in m avoids inverting j; the two parametrizations agree through
/// lambda = j(m).
inline double hfr_limit_speed(double theta, double mu_plus, double mu_minus) {
    if (!(mu_plus > 0.0) || mu_minus > mu_plus || !(theta > 0.0 && theta <= 1.0))
        throw std::invalid_argument("hfr_limit_speed: need mu_plus > 0, mu_minus <= mu_plus, theta in (0,1]");
    if (mu_plus == mu_minus) return 2.0 * std::sqrt(mu_plus);

    auto j = [&](double m) {
        return theta * std::sqrt(std::max(m - mu_plus, 0.0)) +
               (1.0 - theta) * std::sqrt(m - mu_minus);
    };
    auto R = [&](double m) { return m / j(m); };

    double a = mu_plus * (1.0 + 1e-13);
    if (theta == 1.0) a = mu_plus * (1.0 + 1e-9) + 1e-12;
    double b = std::max(4.0 * mu_plus, a * 2.0);
    for (int i = 0; i < 200 && R(b) <= R(0.5 * b) ; ++i) b *= 2.0;
    return golden_section_min(R, a, b, 1e-13 * (1.0 + b), 400).second;
}

/// Cell-averaged sampling of a step profile onto N grid points. Plateau edge
/// cells take fractional values so the discrete integral of b is exact, which
/// keeps the eigensolver cross-validation second order.
inline CoefField sample_step(const StepProfile& step, int N) {
    const PeriodicGrid g(step.L, N);
    const double h = g.spacing;
    const double plateau = step.theta * step.L;
    auto cum = [&](double x) {
        // measure of [0, x) inside the periodically extended plateau, x >= 0
        const double per = std::floor(x / step.L);
        const double r = x - per * step.L;
        return per * plateau + std::min(r, plateau);
    };
    std::vector<double> v(static_cast<size_t>(N));
    for (int i = 0; i < N; ++i) {
        const double u = g.x(i) - 0.5 * h + step.L;  // shift keeps the argument positive
        const double cover = cum(u + h) - cum(u);
        v[static_cast<size_t>(i)] =
            step.mu_minus + (step.mu_plus - step.mu_minus) * cover / h;
    }
    return CoefField(g, std::move(v));
}

struct SweepRow {
    double theta, L, beta, p, c_star, lambda_star, k;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    double theta_star = 0.0;
    double c_star = 0.0;
};

inline std::vector<double> log_theta_grid(int n = 60, double lo = 1e-3, double hi = 1.0) {
    std::vector<double> t(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
        t[static_cast<size_t>(i)] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
    return t;
}

/// Step profile of the theta-sweeps: height beta^{1/p} theta^{-1/p}, zero
/// valley, duty theta; it satisfies (1/L) int b^p = beta for every theta.
inline StepProfile sweep_profile(double theta, double L, double beta, double p) {
    return StepProfile(theta, std::pow(beta, 1.0 / p) * std::pow(theta, -1.0 / p), 0.0, L);
}

inline SweepResult sweep_theta(double L, double beta, double p, const std::vector<double>& thetas) {
    if (thetas.empty()) throw std::invalid_argument("sweep_theta: empty theta grid");
    SweepResult out;
    out.rows.reserve(thetas.size());
    size_t best = 0;
    for (size_t i = 0; i < thetas.size(); ++i) {
        const SpeedResult sr = cstar_step(sweep_profile(thetas[i], L, beta, p));
        out.rows.push_back({thetas[i], L, beta, p, sr.c_star, sr.lambda_star, sr.k_at_min});
        if (sr.c_star > out.rows[best].c_star) best = i;
    }
    // golden refinement in log(theta) around the discrete argmax
    const double t_lo = thetas[best > 0 ? best - 1 : best];
    const double t_hi = thetas[best + 1 < thetas.size() ? best + 1 : best];
    if (t_hi > t_lo) {
        auto neg_c = [&](double logt) {
            return -cstar_step(sweep_profile(std::exp(logt), L, beta, p)).c_star;
        };
        const auto [logt, negc] = golden_section_min(neg_c, std::log(t_lo), std::log(t_hi), 1e-10);
        out.theta_star = std::exp(logt);
        out.c_star = -negc;
    } else {
        out.theta_star = thetas[best];
        out.c_star = out.rows[best].c_star;
    }
    return out;
}

}  // namespace kpp
