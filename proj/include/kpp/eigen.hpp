#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "kpp/grid.hpp"
#include "kpp/tridiag.hpp"

namespace kpp {

/// Discrete action of -L_{lambda,b} = -d^2/dx^2 - 2 lambda d/dx - (b + lambda^2)
/// on the periodic grid, assembled with 2nd-order central differences. The
/// off-diagonals are constant, so the adjoint (drift sign flipped) is exactly
/// the matrix transpose and discrete duality identities close to roundoff.
struct PeriodicOperator {
    PeriodicGrid grid;
    double lambda = 0.0;
    std::vector<double> diag;  // 2/h^2 - (b_i + lambda^2)
    double sub = 0.0;          // coefficient of psi_{i-1}: -1/h^2 + lambda/h
    double sup = 0.0;          // coefficient of psi_{i+1}: -1/h^2 - lambda/h

    std::vector<double> apply(const std::vector<double>& x, bool adjoint = false) const {
        const int n = grid.size;
        const double lo = adjoint ? sup : sub;
        const double hi = adjoint ? sub : sup;
        std::vector<double> y(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) {
            const int im = grid.wrap(i - 1), ip = grid.wrap(i + 1);
            y[static_cast<size_t>(i)] = diag[static_cast<size_t>(i)] * x[static_cast<size_t>(i)] +
                                        lo * x[static_cast<size_t>(im)] + hi * x[static_cast<size_t>(ip)];
        }
        return y;
    }

    double op_norm_inf() const {
        double m = 0.0;
        for (double d : diag) m = std::max(m, std::abs(d));
        return m + std::abs(sub) + std::abs(sup);
    }
};

inline int required_grid_size(double L, double lambda) {
    const double scale = std::max(1.0, std::abs(lambda));
    int n = static_cast<int>(std::ceil(L * scale)) + 2;
    if (n % 2 != 0) ++n;
    return std::max(16, n);
}

inline PeriodicOperator assemble_operator(const CoefField& b, double lambda) {
    const PeriodicGrid& g = b.grid;
    if (g.spacing * std::max(1.0, std::abs(lambda)) >= 1.0)
        throw std::invalid_argument(
            "assemble_operator: grid too coarse for lambda=" + std::to_string(lambda) +
            "; need N >= " + std::to_string(required_grid_size(g.length, lambda)));
    PeriodicOperator op;
    op.grid = g;
    op.lambda = lambda;
    const double invh2 = 1.0 / (g.spacing * g.spacing);
    const double drift = lambda / g.spacing;
    op.sub = -invh2 + drift;
    op.sup = -invh2 - drift;
    op.diag.resize(static_cast<size_t>(g.size));
    for (int i = 0; i < g.size; ++i)
        op.diag[static_cast<size_t>(i)] = 2.0 * invh2 - (b[i] + lambda * lambda);
    return op;
}

/// Principal pair of -L_{lambda,b} and its adjoint under the normalization
/// ||psi||_2 = 1, <psi_tilde, psi> = 1.
struct EigenPair {
    double lambda = 0.0;
    double k = 0.0;
    GridFunction psi;
    GridFunction psi_tilde;
    double residual = 0.0;
};

struct EigenOptions {
    double increment_tol = 1e-12;  // relative eigenvalue increment
    double residual_tol = 1e-10;   // absolute target; floored by roundoff * ||A||
    int max_iterations = 10000;
};

namespace detail {

struct PowerResult {
    std::vector<double> vec;  // positive, quadrature-normalized to ||.||_2 = 1
    double k = 0.0;
    double residual = 0.0;
    int iterations = 0;
};

/// Inverse power iteration on the shifted matrix sigma*I + A. With
/// sigma = max(b) + lambda^2 + 1 and h|lambda| < 1 the shifted matrix is a
/// strictly diagonally dominant irreducible M-matrix, so its inverse is
/// positive and the iteration converges to the Perron vector, which is the
/// principal eigenvector of A itself.
inline PowerResult power_iterate(const PeriodicOperator& op, double sigma, bool adjoint,
                                 const EigenOptions& opt) {
    const int n = op.grid.size;
    const double h = op.grid.spacing;
    std::vector<double> shifted(op.diag);
    for (double& d : shifted) d += sigma;
    const double sub = adjoint ? op.sup : op.sub;
    const double sup = adjoint ? op.sub : op.sup;
    CyclicTridiag solver(shifted, sub, sup);

    const double res_floor = 16.0 * std::numeric_limits<double>::epsilon() * op.op_norm_inf();

    PowerResult r;
    r.vec.assign(static_cast<size_t>(n), 1.0);
    double norm = std::sqrt(h * static_cast<double>(n));
    for (double& v : r.vec) v /= norm;

    double k_prev = std::numeric_limits<double>::infinity();
    for (int it = 1; it <= opt.max_iterations; ++it) {
        std::vector<double> y = solver.solve(r.vec);
        double s = 0.0;
        for (double v : y) s += v * v;
        norm = std::sqrt(h * s);
        for (double& v : y) v /= norm;
        r.vec.swap(y);

        // Rayleigh estimate and max-norm residual of A psi = k psi.
        std::vector<double> av = op.apply(r.vec, adjoint);
        double num = 0.0;
        for (int i = 0; i < n; ++i) num += r.vec[static_cast<size_t>(i)] * av[static_cast<size_t>(i)];
        r.k = h * num;  // <psi, A psi> with ||psi||_2 = 1
        double res = 0.0, vmax = 0.0;
        for (int i = 0; i < n; ++i) {
            res = std::max(res, std::abs(av[static_cast<size_t>(i)] - r.k * r.vec[static_cast<size_t>(i)]));
            vmax = std::max(vmax, std::abs(r.vec[static_cast<size_t>(i)]));
        }
        r.residual = res;
        r.iterations = it;

        const bool inc_ok = std::abs(r.k - k_prev) <= opt.increment_tol * (1.0 + std::abs(r.k));
        const bool res_ok = res <= std::max(opt.residual_tol, res_floor) * std::max(1.0, vmax);
        // at the roundoff floor the eigenvalue increments are pure noise
        const bool at_floor = res <= 4.0 * res_floor * std::max(1.0, vmax);
        if (res_ok && (inc_ok || at_floor)) return r;
        k_prev = r.k;
    }
    throw convergence_error("principal eigenpair: no convergence after " +
                            std::to_string(opt.max_iterations) +
                            " iterations; last residual " + std::to_string(r.residual));
}

}  // namespace detail

/// Principal eigenvalue only (used by the wave-speed line searches).
inline double principal_eigenvalue(const CoefField& b, double lambda,
                                   const EigenOptions& opt = {}) {
    const PeriodicOperator op = assemble_operator(b, lambda);
    const double sigma = max_value(b) + lambda * lambda + 1.0;
    return detail::power_iterate(op, sigma, false, opt).k;
}

inline EigenPair principal_eigenpair(const CoefField& b, double lambda,
                                     const EigenOptions& opt = {}) {
    const PeriodicOperator op = assemble_operator(b, lambda);
    const double sigma = max_value(b) + lambda * lambda + 1.0;
    detail::PowerResult fwd = detail::power_iterate(op, sigma, false, opt);
    detail::PowerResult adj = detail::power_iterate(op, sigma, true, opt);

    for (double v : fwd.vec)
        if (!(v > 0.0)) throw std::logic_error("principal eigenpair: non-positive eigenvector component");
    for (double v : adj.vec)
        if (!(v > 0.0)) throw std::logic_error("principal eigenpair: non-positive adjoint component");

    EigenPair p;
    p.lambda = lambda;
    p.residual = std::max(fwd.residual, adj.residual);
    p.psi = GridFunction(b.grid, std::move(fwd.vec));
    p.psi_tilde = GridFunction(b.grid, std::move(adj.vec));
    // two-sided Rayleigh quotient: accurate to second order in the residuals
    const std::vector<double> apsi = op.apply(p.psi.values, false);
    double num = 0.0, den = 0.0;
    for (int i = 0; i < b.grid.size; ++i) {
        num += p.psi_tilde[i] * apsi[static_cast<size_t>(i)];
        den += p.psi_tilde[i] * p.psi[i];
    }
    p.k = num / den;
    const double ip = inner(p.psi_tilde, p.psi);
    for (double& v : p.psi_tilde.values) v /= ip;
    return p;
}

/// Product psi * psi_tilde, the kernel of every derivative formula.
inline GridFunction eigen_product(const EigenPair& p) {
    GridFunction out(p.psi.grid);
    for (int i = 0; i < out.size(); ++i) out[i] = p.psi[i] * p.psi_tilde[i];
    return out;
}

/// Both sides of k(lambda, b) = k(lambda L, L^2 b(L x)) / L^2, computed by two
/// independent eigensolves (the right-hand one on the unit-period grid).
inline std::pair<double, double> rescaling_check(const CoefField& b, double lambda,
                                                 const EigenOptions& opt = {}) {
    const double L = b.grid.length;
    const double lhs = principal_eigenvalue(b, lambda, opt);
    PeriodicGrid unit(1.0, b.grid.size);
    std::vector<double> scaled(b.values);
    for (double& v : scaled) v *= L * L;
    const double rhs = principal_eigenvalue(CoefField(unit, std::move(scaled)), lambda * L, opt) / (L * L);
    return {lhs, rhs};
}

}  // namespace kpp
