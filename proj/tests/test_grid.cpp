#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "kpp/fields.hpp"
#include "kpp/grid.hpp"

using namespace kpp;

TEST_SUITE("grid") {

TEST_CASE("periodic rectangle rule") {
    const PeriodicGrid g2(2.0, 64);
    CHECK(integrate(GridFunction(g2, 1.0)) == doctest::Approx(2.0).epsilon(1e-14));

    const GridFunction c1 = make_function(g2, [&](double x) { return std::cos(2.0 * std::numbers::pi * x / 2.0); });
    CHECK(std::abs(integrate(c1)) < 1e-13);

    // closed-form antiderivative: int_0^1 cos^2(2 pi x) dx = 1/2
    const PeriodicGrid g1(1.0, 256);
    const GridFunction c2 = make_function(g1, [](double x) {
        const double c = std::cos(2.0 * std::numbers::pi * x);
        return c * c;
    });
    CHECK(integrate(c2) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("integrate is linear and shift-invariant") {
    const PeriodicGrid g(1.5, 128);
    std::mt19937_64 rng(7);
    const GridFunction f = random_direction(g, rng, 12);
    const GridFunction w = random_direction(g, rng, 12);
    GridFunction lin(g);
    for (int i = 0; i < g.size; ++i) lin[i] = 3.0 * f[i] - 0.5 * w[i];
    CHECK(integrate(lin) == doctest::Approx(3.0 * integrate(f) - 0.5 * integrate(w)).epsilon(1e-13));
    for (int s : {1, 31, 100})
        CHECK(integrate(shift_samples(f, s)) == doctest::Approx(integrate(f)).epsilon(1e-13));
}

TEST_CASE("fourier coefficients against the orthonormal basis") {
    const PeriodicGrid g(2.0, 128);

    SUBCASE("pure mode") {
        const FourierCoeffs fc = fourier_coeffs(cos_mode(g, 1), 10);
        CHECK(fc.cos_coeffs[0] == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(std::abs(fc.mean_channel) < 1e-12);
        for (int n = 2; n <= 10; ++n) {
            CHECK(std::abs(fc.cos_coeffs[size_t(n - 1)]) < 1e-12);
            CHECK(std::abs(fc.sin_coeffs[size_t(n - 1)]) < 1e-12);
        }
    }

    SUBCASE("constant carries only the mean channel") {
        const double c = 0.7;
        const FourierCoeffs fc = fourier_coeffs(GridFunction(g, c), 10);
        CHECK(fc.mean_channel == doctest::Approx(c * std::sqrt(g.length)).epsilon(1e-13));
        for (int n = 1; n <= 10; ++n) {
            CHECK(std::abs(fc.cos_coeffs[size_t(n - 1)]) < 1e-13);
            CHECK(std::abs(fc.sin_coeffs[size_t(n - 1)]) < 1e-13);
        }
    }

    SUBCASE("parseval and synthesis round-trip on band-limited fields") {
        std::mt19937_64 rng(11);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        GridFunction f(g, u(rng));
        for (int n = 1; n <= 32; ++n) {
            const GridFunction cm = cos_mode(g, n), sm = sin_mode(g, n);
            const double a = u(rng), b = u(rng);
            for (int i = 0; i < g.size; ++i) f[i] += a * cm[i] + b * sm[i];
        }
        const FourierCoeffs fc = fourier_coeffs(f, 32);
        const double n2 = l2_norm(f);
        CHECK(fc.parseval_sum() == doctest::Approx(n2 * n2).epsilon(1e-10));
        const GridFunction back = synthesize(g, fc);
        double err = 0.0;
        for (int i = 0; i < g.size; ++i) err = std::max(err, std::abs(back[i] - f[i]));
        CHECK(err < 1e-10);
    }

    SUBCASE("aliasing request is rejected") {
        CHECK_THROWS_AS(fourier_coeffs(GridFunction(g, 1.0), g.size / 2), std::invalid_argument);
    }
}

TEST_CASE("norm bound chain") {
    const PeriodicGrid g(2.0, 256);
    const double beta = 2.25;

    SUBCASE("constant: all derivative norms vanish") {
        const NormBoundsReport r = norm_bounds_check(CoefField(g, std::sqrt(beta)));
        CHECK(r.deviation < 1e-12);
        CHECK(r.grad_term < 1e-12);
        CHECK(r.chain_ok);
        CHECK(r.smooth);
    }

    SUBCASE("smooth cosine satisfies the chain") {
        CoefField b = make_coef(g, [&](double x) {
            return std::sqrt(beta) * (1.0 + 0.1 * std::cos(2.0 * std::numbers::pi * x / g.length));
        });
        const NormBoundsReport r = norm_bounds_check(b);
        CHECK(r.smooth);
        CHECK(r.chain_ok);
        // analytic max |b'| = sqrt(beta) * 0.1 * 2 pi / L
        const double bp = std::sqrt(beta) * 0.1 * 2.0 * std::numbers::pi / g.length;
        CHECK(r.grad_term == doctest::Approx(g.length * bp).epsilon(1e-3));
    }

    SUBCASE("sharp step is flagged as non-smooth") {
        const CoefField b = make_coef(g, [&](double x) { return x < g.length / 2.0 ? 2.0 : 0.0; });
        CHECK_FALSE(norm_bounds_check(b).smooth);
    }
}

TEST_CASE("type invariants") {
    CHECK_THROWS_AS(PeriodicGrid(1.0, 15), std::invalid_argument);
    CHECK_THROWS_AS(PeriodicGrid(1.0, 18 + 1), std::invalid_argument);
    CHECK_THROWS_AS(PeriodicGrid(-1.0, 64), std::invalid_argument);
    const PeriodicGrid g(1.0, 16);
    std::vector<double> v(16, 1.0);
    v[3] = -0.25;
    CHECK_THROWS_AS(CoefField(g, v), std::invalid_argument);
    CHECK_THROWS_AS(GridFunction(g, std::vector<double>(15, 0.0)), std::invalid_argument);
    CHECK(g.spacing * g.size == doctest::Approx(g.length).epsilon(1e-15));
}

}  // TEST_SUITE
