#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace kpp {

/// Periodic (cyclic) tridiagonal solver with constant off-diagonals:
///   M x = r,  M[i][i] = diag[i],  M[i][i-1] = sub,  M[i][i+1] = sup,
///   M[0][N-1] = sub,  M[N-1][0] = sup.
/// The corner entries are folded into a rank-one correction of a plain Thomas
/// sweep (Sherman-Morrison). The Thomas factorization is precomputed so each
/// solve costs O(N) with two passes. Valid without pivoting for the diagonally
/// dominant matrices assembled here.
class CyclicTridiag {
  public:
    CyclicTridiag(std::vector<double> diag, double sub, double sup)
        : n_(static_cast<int>(diag.size())), sub_(sub), sup_(sup) {
        if (n_ < 3) throw std::invalid_argument("CyclicTridiag: need at least 3 rows");
        const double gamma = -diag[0];
        gamma_ = gamma;
        t_ = std::move(diag);
        t_[0] -= gamma;
        t_[static_cast<size_t>(n_ - 1)] -= sub_ * sup_ / gamma;

        // Thomas factorization of the corrected tridiagonal T.
        mul_.resize(static_cast<size_t>(n_));
        inv_piv_.resize(static_cast<size_t>(n_));
        double piv = t_[0];
        inv_piv_[0] = 1.0 / piv;
        for (int i = 1; i < n_; ++i) {
            const double m = sub_ * inv_piv_[static_cast<size_t>(i - 1)];
            mul_[static_cast<size_t>(i)] = m;
            piv = t_[static_cast<size_t>(i)] - m * sup_;
            if (piv == 0.0) throw std::runtime_error("CyclicTridiag: zero pivot");
            inv_piv_[static_cast<size_t>(i)] = 1.0 / piv;
        }

        // z = T^{-1} u with u = (gamma, 0, ..., 0, sup).
        std::vector<double> u(static_cast<size_t>(n_), 0.0);
        u[0] = gamma;
        u[static_cast<size_t>(n_ - 1)] = sup_;
        z_ = thomas(u);
        vz_ = 1.0 + z_[0] + (sub_ / gamma_) * z_[static_cast<size_t>(n_ - 1)];
        if (vz_ == 0.0) throw std::runtime_error("CyclicTridiag: singular correction");
    }

    int size() const { return n_; }

    std::vector<double> solve(const std::vector<double>& rhs) const {
        std::vector<double> y = thomas(rhs);
        const double vy = y[0] + (sub_ / gamma_) * y[static_cast<size_t>(n_ - 1)];
        const double c = vy / vz_;
        for (int i = 0; i < n_; ++i) y[static_cast<size_t>(i)] -= c * z_[static_cast<size_t>(i)];
        return y;
    }

  private:
    std::vector<double> thomas(const std::vector<double>& rhs) const {
        std::vector<double> x(rhs);
        for (int i = 1; i < n_; ++i)
            x[static_cast<size_t>(i)] -= mul_[static_cast<size_t>(i)] * x[static_cast<size_t>(i - 1)];
        x[static_cast<size_t>(n_ - 1)] *= inv_piv_[static_cast<size_t>(n_ - 1)];
        for (int i = n_ - 2; i >= 0; --i)
            x[static_cast<size_t>(i)] = (x[static_cast<size_t>(i)] - sup_ * x[static_cast<size_t>(i + 1)]) *
                                        inv_piv_[static_cast<size_t>(i)];
        return x;
    }

    int n_;
    double sub_, sup_, gamma_, vz_;
    std::vector<double> t_, mul_, inv_piv_, z_;
};

/// Plain tridiagonal solver with constant coefficients except at the two
/// boundary rows (used by the time stepper's implicit diffusion solve).
class Tridiag {
  public:
    /// Rows: [d0 s0 0 ...; sub d sup; ...; 0 sN eN].
    Tridiag(int n, double diag, double sub, double sup, double d_first, double sup_first,
            double d_last, double sub_last)
        : n_(n), sub_(sub), sup_(sup), sup_first_(sup_first), sub_last_(sub_last) {
        if (n_ < 3) throw std::invalid_argument("Tridiag: need at least 3 rows");
        mul_.resize(static_cast<size_t>(n_));
        inv_piv_.resize(static_cast<size_t>(n_));
        double piv = d_first;
        inv_piv_[0] = 1.0 / piv;
        for (int i = 1; i < n_; ++i) {
            const double upper = (i == 1) ? sup_first_ : sup_;
            const double lower = (i == n_ - 1) ? sub_last_ : sub_;
            const double d = (i == n_ - 1) ? d_last : diag;
            const double m = lower * inv_piv_[static_cast<size_t>(i - 1)];
            mul_[static_cast<size_t>(i)] = m;
            piv = d - m * upper;
            inv_piv_[static_cast<size_t>(i)] = 1.0 / piv;
        }
    }

    void solve_in_place(std::vector<double>& x) const {
        for (int i = 1; i < n_; ++i)
            x[static_cast<size_t>(i)] -= mul_[static_cast<size_t>(i)] * x[static_cast<size_t>(i - 1)];
        x[static_cast<size_t>(n_ - 1)] *= inv_piv_[static_cast<size_t>(n_ - 1)];
        for (int i = n_ - 2; i >= 0; --i) {
            const double upper = (i == 0) ? sup_first_ : sup_;
            x[static_cast<size_t>(i)] = (x[static_cast<size_t>(i)] - upper * x[static_cast<size_t>(i + 1)]) *
                                        inv_piv_[static_cast<size_t>(i)];
        }
    }

  private:
    int n_;
    double sub_, sup_, sup_first_, sub_last_;
    std::vector<double> mul_, inv_piv_;
};

}  // namespace kpp
