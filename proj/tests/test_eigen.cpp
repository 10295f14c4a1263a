#include <doctest.h>

#include <cmath>
#include <random>

#include "kpp/eigen.hpp"
#include "kpp/fields.hpp"
#include "kpp/stepfn.hpp"

using namespace kpp;

TEST_SUITE("eigen") {

TEST_CASE("operator assembly") {
    const PeriodicGrid g(1.0, 64);

    SUBCASE("b = 0, lambda = 0: discrete Laplacian rows sum to zero") {
        const PeriodicOperator op = assemble_operator(CoefField(g, 0.0), 0.0);
        const auto y = op.apply(std::vector<double>(64, 1.0));
        for (double v : y) CHECK(std::abs(v) < 1e-10);
    }

    SUBCASE("constant input: derivative terms vanish") {
        const double c = 1.7, lam = 0.4;
        const PeriodicOperator op = assemble_operator(CoefField(g, c), lam);
        const auto y = op.apply(std::vector<double>(64, 1.0));
        for (double v : y) CHECK(v == doctest::Approx(-(c + lam * lam)).epsilon(1e-11));
    }

    SUBCASE("adjoint is the transpose: <Au, w> = <u, A*w>") {
        std::mt19937_64 rng(3);
        const CoefField b = random_smooth_positive(g, rng);
        const PeriodicOperator op = assemble_operator(b, 0.8);
        const GridFunction u = random_direction(g, rng, 20);
        const GridFunction w = random_direction(g, rng, 20);
        const GridFunction au(g, op.apply(u.values, false));
        const GridFunction atw(g, op.apply(w.values, true));
        CHECK(inner(au, w) == doctest::Approx(inner(u, atw)).epsilon(1e-12));
    }

    SUBCASE("coarse grid is refused with a usable N hint") {
        CHECK_THROWS_AS(assemble_operator(CoefField(PeriodicGrid(10.0, 16), 1.0), 2.0),
                        std::invalid_argument);
        CHECK(required_grid_size(10.0, 2.0) >= 20);
    }
}

TEST_CASE("constant-coefficient principal pairs are exact") {
    const PeriodicGrid g(1.0, 256);

    SUBCASE("b = 1, lambda = 0.5") {
        const EigenPair p = principal_eigenpair(CoefField(g, 1.0), 0.5);
        CHECK(p.k == doctest::Approx(-1.25).epsilon(1e-10));
        const double flat = 1.0 / std::sqrt(g.length);
        for (int i = 0; i < g.size; ++i) {
            CHECK(p.psi[i] == doctest::Approx(flat).epsilon(1e-8));
            CHECK(p.psi_tilde[i] == doctest::Approx(flat).epsilon(1e-8));
        }
        CHECK(l2_norm(p.psi) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(inner(p.psi_tilde, p.psi) == doctest::Approx(1.0).epsilon(1e-12));
    }

    SUBCASE("b = 0, lambda = 2") {
        CHECK(principal_eigenvalue(CoefField(g, 0.0), 2.0) == doctest::Approx(-4.0).epsilon(1e-10));
    }
}

TEST_CASE("step coefficient cross-validates against the transfer-matrix oracle") {
    const StepProfile step(0.5, 2.0, 0.0, 1.0);
    const double oracle = exact_k(step, 1.0);
    const double grid_k = principal_eigenvalue(sample_step(step, 512), 1.0);
    CHECK(grid_k == doctest::Approx(oracle).epsilon(1e-4));
}

TEST_CASE("positivity and normalization invariants") {
    std::mt19937_64 rng(17);
    const PeriodicGrid g(1.0, 256);
    for (int t = 0; t < 5; ++t) {
        const CoefField b = random_smooth_positive(g, rng, 0.6 + 0.4 * t, 0.4);
        const EigenPair p = principal_eigenpair(b, 0.3 + 0.4 * t);
        CHECK(min_value(p.psi) > 0.0);
        CHECK(min_value(p.psi_tilde) > 0.0);
        CHECK(l2_norm(p.psi) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(inner(p.psi_tilde, p.psi) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(p.residual < 1e-8 * max_norm(p.psi));
    }
}

TEST_CASE("spectral symmetry, concavity, monotonicity") {
    std::mt19937_64 rng(23);
    const PeriodicGrid g(1.0, 256);
    const CoefField b = random_smooth_positive(g, rng, 1.0, 0.45);

    SUBCASE("k(lambda, b) = k(-lambda, b)") {
        for (double lam : {0.4, 1.1, 2.0})
            CHECK(principal_eigenvalue(b, lam) ==
                  doctest::Approx(principal_eigenvalue(b, -lam)).epsilon(1e-11));
    }

    SUBCASE("lambda -> k is concave and k(0,b) < 0") {
        std::vector<double> ks;
        for (int i = 0; i <= 16; ++i) ks.push_back(principal_eigenvalue(b, -1.6 + 0.2 * i));
        for (size_t i = 2; i < ks.size(); ++i)
            CHECK(ks[i - 2] - 2.0 * ks[i - 1] + ks[i] <= 1e-8);
        CHECK(principal_eigenvalue(b, 0.0) < 0.0);
    }

    SUBCASE("pointwise larger b lowers k") {
        std::vector<double> bigger(b.values);
        for (double& v : bigger) v += 0.3;
        CHECK(principal_eigenvalue(b, 0.7) >= principal_eigenvalue(CoefField(g, bigger), 0.7));
    }

    SUBCASE("a priori bounds on -k") {
        const double alpha = mean(b);
        for (double lam : {0.0, 0.5, 1.5}) {
            const double mk = -principal_eigenvalue(b, lam);
            CHECK(mk >= alpha + lam * lam - 1e-9);
            CHECK(mk <= alpha + alpha * alpha * g.length * g.length + lam * lam + 1e-9);
        }
    }
}

TEST_CASE("rescaling identity k(lambda,b) = k(lambda L, L^2 b(L.))/L^2") {
    SUBCASE("constant is exact") {
        const auto [lhs, rhs] = rescaling_check(CoefField(PeriodicGrid(3.0, 256), 0.8), 0.6);
        CHECK(lhs == doctest::Approx(-(0.8 + 0.36)).epsilon(1e-10));
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
    }

    SUBCASE("smooth cosine, L = 2") {
        const PeriodicGrid g(2.0, 512);
        const CoefField b = make_coef(g, [&](double x) {
            return 1.0 + 0.5 * std::cos(2.0 * std::numbers::pi * x / g.length);
        });
        const auto [lhs, rhs] = rescaling_check(b, 0.7);
        CHECK(std::abs(lhs - rhs) < 1e-6);
    }

    SUBCASE("step coefficient, L = 3") {
        const CoefField b = sample_step(StepProfile(0.4, 1.5, 0.2, 3.0), 1024);
        const auto [lhs, rhs] = rescaling_check(b, 1.0);
        CHECK(std::abs(lhs - rhs) < 1e-4);
    }
}

}  // TEST_SUITE
