#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace kpp {

/// Convergence failure of an iterative solver; carries the last residual in the message.
struct convergence_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Uniform sampling of one period [0, L). Sample i sits at x_i = i*h, h = L/N.
/// N is kept even so that Fourier cos/sin mode pairs below the Nyquist index
/// are exactly representable.
struct PeriodicGrid {
    double length = 1.0;
    int size = 256;
    double spacing = 1.0 / 256.0;

    PeriodicGrid() = default;
    PeriodicGrid(double L, int N) : length(L), size(N), spacing(L / N) {
        if (!(L > 0.0)) throw std::invalid_argument("PeriodicGrid: period must be positive");
        if (N < 16 || N % 2 != 0) throw std::invalid_argument("PeriodicGrid: N must be even and >= 16");
    }

    double x(int i) const { return spacing * i; }
    int wrap(int i) const {
        int m = i % size;
        return m < 0 ? m + size : m;
    }
    bool operator==(const PeriodicGrid& o) const { return length == o.length && size == o.size; }
};

/// One period of a real L-periodic grid function. values[N] == values[0] is
/// implied by periodic extension and never stored.
struct GridFunction {
    PeriodicGrid grid;
    std::vector<double> values;

    GridFunction() = default;
    explicit GridFunction(const PeriodicGrid& g, double fill = 0.0) : grid(g), values(g.size, fill) {}
    GridFunction(const PeriodicGrid& g, std::vector<double> v) : grid(g), values(std::move(v)) {
        if (static_cast<int>(values.size()) != g.size)
            throw std::invalid_argument("GridFunction: sample count does not match grid");
    }

    double operator[](int i) const { return values[static_cast<size_t>(i)]; }
    double& operator[](int i) { return values[static_cast<size_t>(i)]; }
    int size() const { return grid.size; }
};

/// Nonnegative L-periodic coefficient field b(x); the optimization variable.
struct CoefField {
    PeriodicGrid grid;
    std::vector<double> values;

    CoefField() = default;
    explicit CoefField(const PeriodicGrid& g, double fill = 0.0) : grid(g), values(g.size, fill) {
        if (fill < 0.0) throw std::invalid_argument("CoefField: negative fill value");
    }
    CoefField(const PeriodicGrid& g, std::vector<double> v) : grid(g), values(std::move(v)) {
        if (static_cast<int>(values.size()) != g.size)
            throw std::invalid_argument("CoefField: sample count does not match grid");
        for (double s : values)
            if (!(s >= 0.0)) throw std::invalid_argument("CoefField: samples must be nonnegative");
    }

    double operator[](int i) const { return values[static_cast<size_t>(i)]; }
    int size() const { return grid.size; }
    GridFunction as_function() const { return GridFunction(grid, values); }
};

template <typename F>
GridFunction make_function(const PeriodicGrid& g, F&& f) {
    GridFunction out(g);
    for (int i = 0; i < g.size; ++i) out[i] = f(g.x(i));
    return out;
}

template <typename F>
CoefField make_coef(const PeriodicGrid& g, F&& f) {
    std::vector<double> v(static_cast<size_t>(g.size));
    for (int i = 0; i < g.size; ++i) v[static_cast<size_t>(i)] = f(g.x(i));
    return CoefField(g, std::move(v));
}

// ---------------------------------------------------------------------------
// Quadrature and norms. The periodic rectangle rule (== trapezoid on periodic
// data) is spectrally accurate for smooth integrands and exact for
// trigonometric polynomials of degree < N/2.
// ---------------------------------------------------------------------------

inline double integrate(const GridFunction& f) {
    double s = 0.0;
    for (double v : f.values) s += v;
    return f.grid.spacing * s;
}

inline double inner(const GridFunction& a, const GridFunction& b) {
    if (!(a.grid == b.grid)) throw std::invalid_argument("inner: grid mismatch");
    double s = 0.0;
    for (int i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return a.grid.spacing * s;
}

inline double mean(const GridFunction& f) { return integrate(f) / f.grid.length; }
inline double mean(const CoefField& b) { return mean(b.as_function()); }

inline double l2_norm(const GridFunction& f) {
    double s = 0.0;
    for (double v : f.values) s += v * v;
    return std::sqrt(f.grid.spacing * s);
}

inline double max_norm(const GridFunction& f) {
    double m = 0.0;
    for (double v : f.values) m = std::max(m, std::abs(v));
    return m;
}

inline double min_value(const GridFunction& f) {
    return *std::min_element(f.values.begin(), f.values.end());
}
inline double max_value(const GridFunction& f) {
    return *std::max_element(f.values.begin(), f.values.end());
}
inline double min_value(const CoefField& b) {
    return *std::min_element(b.values.begin(), b.values.end());
}
inline double max_value(const CoefField& b) {
    return *std::max_element(b.values.begin(), b.values.end());
}

inline GridFunction shift_samples(const GridFunction& f, int k) {
    GridFunction out(f.grid);
    for (int i = 0; i < f.size(); ++i) out[i] = f[f.grid.wrap(i - k)];
    return out;
}

// ---------------------------------------------------------------------------
// Differentiation stencils: 2nd-order central differences with periodic wrap,
// the same stencil the eigenvalue module assembles.
// ---------------------------------------------------------------------------

inline GridFunction derivative(const GridFunction& f) {
    const int n = f.size();
    const double inv2h = 1.0 / (2.0 * f.grid.spacing);
    GridFunction out(f.grid);
    for (int i = 0; i < n; ++i) out[i] = (f[f.grid.wrap(i + 1)] - f[f.grid.wrap(i - 1)]) * inv2h;
    return out;
}

inline GridFunction second_derivative(const GridFunction& f) {
    const int n = f.size();
    const double invh2 = 1.0 / (f.grid.spacing * f.grid.spacing);
    GridFunction out(f.grid);
    for (int i = 0; i < n; ++i)
        out[i] = (f[f.grid.wrap(i + 1)] - 2.0 * f[i] + f[f.grid.wrap(i - 1)]) * invh2;
    return out;
}

/// Discrete Dirichlet energy sum h*((f_{i+1}-f_i)/h)^2. This is exactly the
/// quadratic form of the central second-difference operator, so energy
/// identities close against the eigenvalue stencil.
inline double dirichlet_energy(const GridFunction& f) {
    const int n = f.size();
    const double invh = 1.0 / f.grid.spacing;
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
        const double d = (f[f.grid.wrap(i + 1)] - f[i]) * invh;
        s += d * d;
    }
    return f.grid.spacing * s;
}

// ---------------------------------------------------------------------------
// Fourier coefficients against the orthonormal periodic basis
//   phi_n = sqrt(2/L) cos(2 pi n x / L),  chi_n = sqrt(2/L) sin(2 pi n x / L),
// plus the normalized mean channel 1/sqrt(L). Quadrature inner products are
// exact for band-limited grid functions (modes below N/2).
// ---------------------------------------------------------------------------

struct FourierCoeffs {
    double mean_channel = 0.0;        // <1/sqrt(L), f>
    std::vector<double> cos_coeffs;   // u_n, n = 1..n_max
    std::vector<double> sin_coeffs;   // v_n, n = 1..n_max

    int n_max() const { return static_cast<int>(cos_coeffs.size()); }
    double parseval_sum() const {
        double s = mean_channel * mean_channel;
        for (double u : cos_coeffs) s += u * u;
        for (double v : sin_coeffs) s += v * v;
        return s;
    }
};

inline GridFunction cos_mode(const PeriodicGrid& g, int n) {
    const double a = std::sqrt(2.0 / g.length);
    const double w = 2.0 * std::numbers::pi * n / g.length;
    return make_function(g, [=](double x) { return a * std::cos(w * x); });
}

inline GridFunction sin_mode(const PeriodicGrid& g, int n) {
    const double a = std::sqrt(2.0 / g.length);
    const double w = 2.0 * std::numbers::pi * n / g.length;
    return make_function(g, [=](double x) { return a * std::sin(w * x); });
}

inline FourierCoeffs fourier_coeffs(const GridFunction& f, int n_max) {
    const int n = f.size();
    if (n_max >= n / 2)
        throw std::invalid_argument("fourier_coeffs: n_max >= N/2 would alias; refine the grid");
    FourierCoeffs out;
    out.mean_channel = integrate(f) / std::sqrt(f.grid.length);
    out.cos_coeffs.resize(static_cast<size_t>(n_max));
    out.sin_coeffs.resize(static_cast<size_t>(n_max));
    const double a = std::sqrt(2.0 / f.grid.length) * f.grid.spacing;
    for (int m = 1; m <= n_max; ++m) {
        const double w = 2.0 * std::numbers::pi * m / f.grid.length;
        double cu = 0.0, sv = 0.0;
        for (int i = 0; i < n; ++i) {
            const double xi = f.grid.x(i);
            cu += f[i] * std::cos(w * xi);
            sv += f[i] * std::sin(w * xi);
        }
        out.cos_coeffs[static_cast<size_t>(m - 1)] = a * cu;
        out.sin_coeffs[static_cast<size_t>(m - 1)] = a * sv;
    }
    return out;
}

inline GridFunction synthesize(const PeriodicGrid& g, const FourierCoeffs& c) {
    GridFunction out(g, c.mean_channel / std::sqrt(g.length));
    for (int m = 1; m <= c.n_max(); ++m) {
        const GridFunction cm = cos_mode(g, m), sm = sin_mode(g, m);
        const double u = c.cos_coeffs[static_cast<size_t>(m - 1)];
        const double v = c.sin_coeffs[static_cast<size_t>(m - 1)];
        for (int i = 0; i < g.size; ++i) out[i] += u * cm[i] + v * sm[i];
    }
    return out;
}

// ---------------------------------------------------------------------------
// Norm chain report: for smooth nonnegative b with (1/L) int b^2 = beta,
//   ||b - sqrt(beta)||_inf <= L ||b'||_inf <= L ||b''||_L1 <= L^2 ||b''||_inf.
// Finite-difference derivative norms are meaningless for rough fields, so the
// report carries a smoothness flag based on the largest sample-to-sample jump.
// ---------------------------------------------------------------------------

struct NormBoundsReport {
    double beta = 0.0;        // (1/L) int b^2
    double deviation = 0.0;   // ||b - sqrt(beta)||_inf
    double grad_term = 0.0;   // L ||b'||_inf
    double curv_l1 = 0.0;     // L ||b''||_L1
    double curv_inf = 0.0;    // L^2 ||b''||_inf
    bool chain_ok = false;
    bool smooth = false;      // false: derivative norms are discretization artifacts
};

inline NormBoundsReport norm_bounds_check(const CoefField& b) {
    NormBoundsReport r;
    const GridFunction f = b.as_function();
    const double L = b.grid.length;
    r.beta = inner(f, f) / L;
    const double root = std::sqrt(r.beta);
    for (double s : b.values) r.deviation = std::max(r.deviation, std::abs(s - root));
    const GridFunction d1 = derivative(f);
    const GridFunction d2 = second_derivative(f);
    r.grad_term = L * max_norm(d1);
    double l1 = 0.0;
    for (double s : d2.values) l1 += std::abs(s);
    r.curv_l1 = L * (b.grid.spacing * l1);
    r.curv_inf = L * L * max_norm(d2);

    const double range = max_value(b) - min_value(b);
    double jump = 0.0;
    for (int i = 0; i < b.size(); ++i)
        jump = std::max(jump, std::abs(b[b.grid.wrap(i + 1)] - b[i]));
    r.smooth = jump <= 20.0 * range / b.grid.size + 1e-14;

    const double tol = 1e-9 + (10.0 / b.grid.size) * (1.0 + r.curv_inf);
    r.chain_ok = r.deviation <= r.grad_term + tol && r.grad_term <= r.curv_l1 + tol &&
                 r.curv_l1 <= r.curv_inf + tol;
    return r;
}

}  // namespace kpp
