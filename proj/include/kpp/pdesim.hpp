#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "kpp/grid.hpp"
#include "kpp/tridiag.hpp"

namespace kpp {

/// Direct time integration of u_t = u_xx + b(x) u (1 - u) on a truncated line
/// with the periodic coefficient tiled across it. Operator-split IMEX step:
/// explicit logistic reaction, implicit diffusion (Neumann far boundaries).
/// The combination is monotone and keeps u in [0, 1] as long as
/// dt * max(b) <= 1.
struct SimConfig {
    CoefField b;
    double t_final = 60.0;
    double dt = 0.0;                 // 0: min(0.25 dx^2, 0.05), capped by 0.9/max(b)
    double domain_half_width = 0.0;  // 0: max(30 L, 1.25 c_hint T + 10 L + 30)
    double c_star_hint = 0.0;        // 0: 2 sqrt(max b), an upper bound for c*
    int pts_per_unit = 32;           // raised so each period holds >= 32 points
    double record_dt = 1.0;
    double level = 0.5;
    double init_half_width = 0.0;    // 0: one period L
};

struct FrontRecord {
    double t;
    double x_half;  // rightmost x with u >= level (NaN once the front dissolves)
    double u_max;
};

struct FrontResult {
    double speed_estimate = 0.0;
    std::vector<FrontRecord> track;
    double boundary_clearance = 0.0;  // min distance of the front to the right boundary
};

class FrontSim {
  public:
    explicit FrontSim(const SimConfig& cfg) : cfg_(cfg) {
        const double L = cfg.b.grid.length;
        const double bmax = max_value(cfg.b);
        const double c_hint = cfg.c_star_hint > 0.0 ? cfg.c_star_hint
                                                    : 2.0 * std::sqrt(std::max(bmax, 1e-12));
        double X = cfg.domain_half_width > 0.0
                       ? cfg.domain_half_width
                       : std::max(30.0 * L, 1.25 * c_hint * cfg.t_final + 10.0 * L + 30.0);

        const double dx_req = std::min(1.0 / cfg.pts_per_unit, L / 32.0);
        half_cells_ = static_cast<int>(std::ceil(X / dx_req));
        dx_ = X / half_cells_;
        n_ = 2 * half_cells_ + 1;

        double dt = cfg.dt > 0.0 ? cfg.dt : std::min(0.25 * dx_ * dx_, 0.05);
        if (bmax > 0.0) dt = std::min(dt, 0.9 / bmax);
        steps_per_record_ = std::max(1, static_cast<int>(std::ceil(cfg.record_dt / dt)));
        dt_ = cfg.record_dt / steps_per_record_;

        // tile the coefficient by periodic linear interpolation
        bline_.resize(static_cast<size_t>(n_));
        const PeriodicGrid& g = cfg.b.grid;
        for (int j = 0; j < n_; ++j) {
            double s = std::fmod(x(j), L);
            if (s < 0.0) s += L;
            const double pos = s / g.spacing;
            const int i0 = std::min(static_cast<int>(pos), g.size - 1);
            const double f = pos - i0;
            bline_[static_cast<size_t>(j)] = (1.0 - f) * cfg.b[i0] + f * cfg.b[g.wrap(i0 + 1)];
        }

        const double r = dt_ / (dx_ * dx_);
        diffusion_ = std::make_unique<Tridiag>(n_, 1.0 + 2.0 * r, -r, -r, 1.0 + 2.0 * r,
                                               -2.0 * r, 1.0 + 2.0 * r, -2.0 * r);

        u_.assign(static_cast<size_t>(n_), 0.0);
        const double w0 = cfg.init_half_width > 0.0 ? cfg.init_half_width : L;
        for (int j = 0; j < n_; ++j)
            if (std::abs(x(j)) <= w0) u_[static_cast<size_t>(j)] = 1.0;
    }

    double x(int j) const { return dx_ * (j - half_cells_); }
    double dx() const { return dx_; }
    double dt() const { return dt_; }
    double time() const { return t_; }
    double right_boundary() const { return x(n_ - 1); }
    const std::vector<double>& state() const { return u_; }
    std::vector<double>& state() { return u_; }

    void step() {
        for (int j = 0; j < n_; ++j) {
            double& u = u_[static_cast<size_t>(j)];
            u += dt_ * bline_[static_cast<size_t>(j)] * u * (1.0 - u);
        }
        diffusion_->solve_in_place(u_);
        t_ += dt_;
    }

    void advance_one_record() {
        for (int s = 0; s < steps_per_record_; ++s) step();
    }

    double front_position() const {
        for (int j = n_ - 1; j > 0; --j) {
            if (u_[static_cast<size_t>(j)] >= cfg_.level) {
                if (j == n_ - 1) return x(j);
                const double uj = u_[static_cast<size_t>(j)], un = u_[static_cast<size_t>(j + 1)];
                return x(j) + dx_ * (uj - cfg_.level) / std::max(uj - un, 1e-300);
            }
        }
        return std::numeric_limits<double>::quiet_NaN();
    }

    double u_max() const { return *std::max_element(u_.begin(), u_.end()); }

    void check_bounds() const {
        for (double v : u_)
            if (v < -1e-8 || v > 1.0 + 1e-8)
                throw convergence_error("pdesim: solution left [0,1]; step too large");
    }

  private:
    SimConfig cfg_;
    int n_ = 0, half_cells_ = 0, steps_per_record_ = 0;
    double dx_ = 0.0, dt_ = 0.0, t_ = 0.0;
    std::vector<double> u_, bline_;
    std::unique_ptr<Tridiag> diffusion_;
};

/// Least-squares slope over the last half of the recorded front positions.
inline double fit_front_speed(const std::vector<FrontRecord>& track) {
    std::vector<const FrontRecord*> tail;
    double t_max = 0.0;
    for (const auto& r : track)
        if (std::isfinite(r.x_half)) t_max = std::max(t_max, r.t);
    for (const auto& r : track)
        if (std::isfinite(r.x_half) && r.t >= 0.5 * t_max) tail.push_back(&r);
    if (tail.size() < 3) return 0.0;
    double st = 0.0, sx = 0.0, stt = 0.0, stx = 0.0;
    const double n = static_cast<double>(tail.size());
    for (const auto* r : tail) {
        st += r->t;
        sx += r->x_half;
        stt += r->t * r->t;
        stx += r->t * r->x_half;
    }
    return (n * stx - st * sx) / (n * stt - st * st);
}

inline FrontResult run_front(const SimConfig& cfg) {
    FrontSim sim(cfg);
    const double L = cfg.b.grid.length;
    FrontResult out;
    out.boundary_clearance = sim.right_boundary();

    out.track.push_back({0.0, sim.front_position(), sim.u_max()});
    const int n_records = static_cast<int>(std::round(cfg.t_final / cfg.record_dt));
    for (int rec = 1; rec <= n_records; ++rec) {
        sim.advance_one_record();
        sim.check_bounds();
        const double xf = sim.front_position();
        out.track.push_back({sim.time(), xf, sim.u_max()});
        if (std::isfinite(xf)) {
            const double clearance = sim.right_boundary() - xf;
            out.boundary_clearance = std::min(out.boundary_clearance, clearance);
            if (clearance < 5.0 * L)
                throw convergence_error(
                    "pdesim: front reached within 5 periods of the boundary; "
                    "enlarge domain_half_width");
        }
    }
    out.speed_estimate = fit_front_speed(out.track);
    return out;
}

}  // namespace kpp
