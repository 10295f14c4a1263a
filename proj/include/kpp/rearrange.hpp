#pragma once

#include <algorithm>
#include <utility>
#include <vector>

#include "kpp/grid.hpp"

namespace kpp {

namespace detail {

/// Discrete Schwarz periodic rearrangement of the sample multiset: sort
/// ascending, put the largest at index N/2, then alternate the remaining
/// values left/right outward. Equimeasurability is exact; symmetry about N/2
/// holds up to the one-sample parity ambiguity of an even grid.
inline std::vector<double> rearrange_samples(std::vector<double> v) {
    const int n = static_cast<int>(v.size());
    std::sort(v.begin(), v.end());
    std::vector<double> out(static_cast<size_t>(n));
    const int mid = n / 2;
    out[static_cast<size_t>(mid)] = v[static_cast<size_t>(n - 1)];
    int left = mid - 1, right = mid + 1;
    int rank = n - 2;
    while (rank >= 0) {
        out[static_cast<size_t>(left--)] = v[static_cast<size_t>(rank--)];
        if (rank >= 0 && right < n) out[static_cast<size_t>(right++)] = v[static_cast<size_t>(rank--)];
    }
    return out;
}

}  // namespace detail

inline CoefField schwarz_rearrange(const CoefField& b) {
    return CoefField(b.grid, detail::rearrange_samples(b.values));
}

inline GridFunction schwarz_rearrange(const GridFunction& f) {
    return GridFunction(f.grid, detail::rearrange_samples(f.values));
}

/// Discrete Polya inequality int (phi*)'^2 <= int phi'^2.
/// Returns (rearranged energy, original energy).
inline std::pair<double, double> polya_check(const GridFunction& phi) {
    for (double v : phi.values)
        if (v < 0.0) throw std::invalid_argument("polya_check: phi must be nonnegative");
    return {dirichlet_energy(schwarz_rearrange(phi)), dirichlet_energy(phi)};
}

/// Discrete Hardy-Littlewood inequality int b phi^2 <= int b* (phi*)^2.
/// Returns (int b phi^2, int b* (phi*)^2). Exact at the sample level: both
/// rearrangements use the same placement, so the factors end up similarly
/// ordered.
inline std::pair<double, double> hardy_littlewood_check(const CoefField& b,
                                                        const GridFunction& phi) {
    if (!(phi.grid == b.grid)) throw std::invalid_argument("hardy_littlewood_check: grid mismatch");
    for (double v : phi.values)
        if (v < 0.0) throw std::invalid_argument("hardy_littlewood_check: phi must be nonnegative");
    const CoefField br = schwarz_rearrange(b);
    const GridFunction pr = schwarz_rearrange(phi);
    double lhs = 0.0, rhs = 0.0;
    for (int i = 0; i < b.size(); ++i) {
        lhs += b[i] * phi[i] * phi[i];
        rhs += br[i] * pr[i] * pr[i];
    }
    return {b.grid.spacing * lhs, b.grid.spacing * rhs};
}

}  // namespace kpp
