#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "kpp/constraints.hpp"
#include "kpp/eigen.hpp"
#include "kpp/fields.hpp"
#include "kpp/grid.hpp"
#include "kpp/optimize.hpp"
#include "kpp/pdesim.hpp"
#include "kpp/rearrange.hpp"
#include "kpp/speed.hpp"
#include "kpp/stepfn.hpp"

namespace kpp {

struct Check {
    std::string name;
    bool pass = false;
    std::string detail;
};

namespace verify_detail {

inline void add(std::vector<Check>& out, const std::string& name, bool pass, double worst,
                double tol) {
    std::ostringstream os;
    os << "worst " << worst << " vs tol " << tol;
    out.push_back({name, pass, os.str()});
}

}  // namespace verify_detail

inline std::vector<Check> verify_grid(std::uint64_t seed) {
    using verify_detail::add;
    std::vector<Check> out;
    std::mt19937_64 rng(seed);
    const PeriodicGrid g(2.0, 128);

    GridFunction f = random_direction(g, rng, 10);
    GridFunction w = random_direction(g, rng, 10);
    double worst = 0.0;
    {
        GridFunction lin(g);
        for (int i = 0; i < g.size; ++i) lin[i] = 2.5 * f[i] - 0.75 * w[i];
        worst = std::abs(integrate(lin) - (2.5 * integrate(f) - 0.75 * integrate(w)));
        for (int s : {1, 17, 64})
            worst = std::max(worst, std::abs(integrate(shift_samples(f, s)) - integrate(f)));
        add(out, "grid.integrate linear and shift-invariant", worst <= 1e-12, worst, 1e-12);
    }
    {
        FourierCoeffs fc = fourier_coeffs(f, g.size / 2 - 1);
        GridFunction back = synthesize(g, fc);
        double err = 0.0;
        for (int i = 0; i < g.size; ++i) err = std::max(err, std::abs(back[i] - f[i]));
        add(out, "grid.fourier round-trip on band-limited fields", err <= 1e-10, err, 1e-10);
    }
    {
        const CoefField b = random_smooth_positive(g, rng);
        add(out, "grid.coef fields stay nonnegative", min_value(b) >= 0.0, min_value(b), 0.0);
    }
    return out;
}

inline std::vector<Check> verify_eigen(std::uint64_t seed) {
    using verify_detail::add;
    std::vector<Check> out;
    std::mt19937_64 rng(seed);
    const PeriodicGrid g(1.0, 256);

    double worst_low = 0.0, worst_up = 0.0, worst_sym = 0.0, worst_res = 0.0;
    for (int t = 0; t < 12; ++t) {
        const CoefField b = random_smooth_positive(g, rng, 0.5 + 1.5 * (t % 4) / 3.0, 0.4);
        const double lam = 0.2 + 0.25 * t;
        const double alpha = mean(b);
        const EigenPair p = principal_eigenpair(b, lam);
        worst_low = std::max(worst_low, (alpha + lam * lam) - (-p.k));
        worst_up = std::max(worst_up, (-p.k) - (alpha + alpha * alpha + lam * lam));
        worst_sym = std::max(worst_sym, std::abs(p.k - principal_eigenvalue(b, -lam)));
        const PeriodicOperator op = assemble_operator(b, lam);
        const auto av = op.apply(p.psi.values, false);
        double res = 0.0;
        for (int i = 0; i < g.size; ++i) res = std::max(res, std::abs(av[size_t(i)] - p.k * p.psi[i]));
        worst_res = std::max(worst_res, res / max_norm(p.psi));
    }
    add(out, "eigen.bounds alpha+l^2 <= -k <= alpha+a^2L^2+l^2", worst_low <= 1e-9 && worst_up <= 1e-9,
        std::max(worst_low, worst_up), 1e-9);
    add(out, "eigen.symmetry k(l,b) = k(-l,b)", worst_sym <= 1e-9, worst_sym, 1e-9);
    add(out, "eigen.residual <= 1e-8 ||psi||_inf", worst_res <= 1e-8, worst_res, 1e-8);

    {
        const CoefField b = random_smooth_positive(g, rng, 1.0, 0.4);
        double worst = -1e300;
        double prev2 = 0.0, prev1 = 0.0;
        for (int i = 0; i <= 20; ++i) {
            const double lam = -2.0 + 0.2 * i;
            const double k = principal_eigenvalue(b, lam);
            if (i >= 2) worst = std::max(worst, prev2 - 2.0 * prev1 + k);
            prev2 = prev1;
            prev1 = k;
        }
        const bool k0_neg = principal_eigenvalue(b, 0.0) < 0.0;
        add(out, "eigen.concavity in lambda and k(0,b) < 0", worst <= 1e-8 && k0_neg, worst, 1e-8);
    }
    {
        const CoefField b1 = random_smooth_positive(g, rng, 1.0, 0.3);
        std::vector<double> bigger(b1.values);
        for (double& v : bigger) v += 0.5;
        const double k1 = principal_eigenvalue(b1, 0.8);
        const double k2 = principal_eigenvalue(CoefField(g, bigger), 0.8);
        add(out, "eigen.monotone: b1 <= b2 => k(b1) >= k(b2)", k1 >= k2, k2 - k1, 0.0);
    }
    return out;
}

inline std::vector<Check> verify_speed(std::uint64_t seed) {
    using verify_detail::add;
    std::vector<Check> out;
    std::mt19937_64 rng(seed);
    const PeriodicGrid g(1.0, 256);
    const ConstraintSpec spec = ConstraintSpec::power(1.0, 1.0, 2.0);

    double worst_bound = 0.0, worst_lambda = 0.0, worst_kbrack = 0.0;
    for (int t = 0; t < 100; ++t) {
        const CoefField b = random_feasible(g, rng, spec);
        const SpeedResult sr = minimal_speed(b);
        worst_bound = std::max({worst_bound, sr.lower_bound - sr.c_star, sr.c_star - sr.upper_bound});
        const double s = std::sqrt(sr.alpha + sr.alpha * sr.alpha);
        worst_lambda = std::max({worst_lambda, (s - sr.alpha) - sr.lambda_star,
                                 sr.lambda_star - (s + sr.alpha)});
        const double lo = sr.alpha + (s - sr.alpha) * (s - sr.alpha);
        const double hi = sr.alpha + sr.alpha * sr.alpha + (s + sr.alpha) * (s + sr.alpha);
        worst_kbrack = std::max({worst_kbrack, lo - (-sr.k_at_min), (-sr.k_at_min) - hi});
    }
    add(out, "speed.bounds on c* and lambda(b), 100 random fields",
        worst_bound <= 1e-9 && worst_lambda <= 1e-9, std::max(worst_bound, worst_lambda), 1e-9);
    add(out, "speed.bracket on -k(lambda(b),b)", worst_kbrack <= 1e-9, worst_kbrack, 1e-9);

    {
        const CoefField b = random_feasible(g, rng, spec);
        const SpeedResult sr = minimal_speed(b);
        const double d = 1e-4 * (1.0 + sr.lambda_star);
        const double kp = principal_eigenvalue(b, sr.lambda_star + d);
        const double km = principal_eigenvalue(b, sr.lambda_star - d);
        const double envelope = sr.lambda_star * (kp - km) / (2.0 * d) - sr.k_at_min;
        const double rel = std::abs(envelope) / (1.0 + std::abs(sr.k_at_min));
        add(out, "speed.envelope identity lambda k' = k at the minimizer", rel <= 1e-4, rel, 1e-4);
    }
    {
        double worst = 0.0;
        for (double c : {0.25, 1.0, 4.0}) {
            const SpeedResult sr = minimal_speed(CoefField(g, c));
            worst = std::max(worst, std::abs(sr.c_star - 2.0 * std::sqrt(c)));
        }
        add(out, "speed.constant closed form c*(c) = 2 sqrt(c)", worst <= 1e-8, worst, 1e-8);
    }
    {
        bool mono = true;
        double prev = 0.0;
        for (double L : {0.5, 1.0, 2.0, 4.0}) {
            const double c = cstar_step(StepProfile(0.5, 2.0, 0.0, L)).c_star;
            if (c < prev - 1e-10) mono = false;
            prev = c;
        }
        add(out, "speed.monotone in the period for the dilated step family", mono, 0.0, 0.0);
    }
    return out;
}

inline std::vector<Check> verify_rearrange(std::uint64_t seed) {
    using verify_detail::add;
    std::vector<Check> out;
    std::mt19937_64 rng(seed);
    const PeriodicGrid g(1.0, 256);
    const ConstraintSpec spec = ConstraintSpec::power(1.0, 1.0, 2.0);

    {
        const CoefField b = random_feasible(g, rng, spec);
        const CoefField r1 = schwarz_rearrange(b);
        const CoefField r2 = schwarz_rearrange(r1);
        double worst = 0.0;
        for (int i = 0; i < g.size; ++i) worst = std::max(worst, std::abs(r1[i] - r2[i]));
        add(out, "rearrange.idempotent", worst == 0.0, worst, 0.0);

        std::vector<double> s1(b.values), s2(r1.values);
        std::sort(s1.begin(), s1.end());
        std::sort(s2.begin(), s2.end());
        add(out, "rearrange.equimeasurable (exact sample multiset)", s1 == s2, 0.0, 0.0);

        double fb = 0.0, fr = 0.0;
        for (int i = 0; i < g.size; ++i) {
            fb += b[i] * b[i] * b[i];
            fr += r1[i] * r1[i] * r1[i];
        }
        add(out, "rearrange.int f(b*) = int f(b) exactly", std::abs(fb - fr) <= 1e-12 * std::abs(fb),
            std::abs(fb - fr), 1e-12);
    }
    {
        double worst = 0.0;
        for (int t = 0; t < 10; ++t) {
            const CoefField b = random_feasible(g, rng, spec);
            const double c0 = minimal_speed(b).c_star;
            const double c1 = minimal_speed(schwarz_rearrange(b)).c_star;
            worst = std::max(worst, c0 - c1);
        }
        add(out, "rearrange.speed monotone c*(b*) >= c*(b) - 1e-6", worst <= 1e-6, worst, 1e-6);
    }
    return out;
}

inline std::vector<Check> verify_constraints(std::uint64_t seed) {
    using verify_detail::add;
    std::vector<Check> out;
    std::mt19937_64 rng(seed);
    const PeriodicGrid g(1.0, 256);

    for (double p : {2.0, 3.0}) {
        const ConstraintSpec spec = ConstraintSpec::power(1.0, 1.0, p);
        const CoefField raw = random_smooth_positive(g, rng, 1.3, 0.4);
        const auto [b, mu] = project_scale(raw, spec);
        const auto [b2, mu2] = project_scale(b, spec);
        const double feas = std::abs(constraint_value(b, spec) - spec.beta);
        const double idem = std::abs(mu2 - 1.0);
        add(out, "constraints.project_scale feasible+idempotent p=" + std::to_string(int(p)),
            feas <= 1e-9 && idem <= 1e-9, std::max(feas, idem), 1e-9);
        const double feas_r = std::abs(constraint_value(schwarz_rearrange(b), spec) - spec.beta);
        add(out, "constraints.rearrangement preserves feasibility p=" + std::to_string(int(p)),
            feas_r <= 1e-9, feas_r, 1e-9);

        // mu-expansion: mu(b0 + v) = 1 - f''(b0)/(2 f'(b0) b0 L) ||v||_2^2 + o
        const double b0 = spec.feasible_constant();
        const double expected = spec.fsecond(b0) / (2.0 * spec.fprime(b0) * b0 * g.length);
        GridFunction dir = random_direction(g, rng, 3);
        double worst_rel = 0.0;
        for (double t : {1e-2, 1e-3}) {
            std::vector<double> v(static_cast<size_t>(g.size));
            for (int i = 0; i < g.size; ++i) v[size_t(i)] = b0 + t * dir[i];
            const double mu_t = project_scale(CoefField(g, std::move(v)), spec).second;
            const double fitted = (1.0 - mu_t) / (t * t);
            worst_rel = std::max(worst_rel, std::abs(fitted - expected) / std::abs(expected));
        }
        add(out, "constraints.mu expansion coefficient within 5% p=" + std::to_string(int(p)),
            worst_rel <= 0.05, worst_rel, 0.05);
    }
    {
        const ConstraintSpec box = ConstraintSpec::box(1.0, 1.0, 2.0);
        const CoefField b = random_feasible(g, rng, box);
        const double feas = std::abs(mean(b) - 1.0);
        const bool inside = max_value(b) <= 2.0 + 1e-12 && min_value(b) >= 0.0;
        add(out, "constraints.project_box feasible", feas <= 1e-10 && inside, feas, 1e-10);
        const CoefField b1 = build_b1(box, g.size);
        add(out, "constraints.build_b1 exact mass", std::abs(mean(b1) - 1.0) <= 1e-12,
            std::abs(mean(b1) - 1.0), 1e-12);
    }
    return out;
}

inline std::vector<Check> verify_optimize(std::uint64_t seed) {
    using verify_detail::add;
    std::vector<Check> out;
    std::mt19937_64 rng(seed);

    {
        const ConstraintSpec spec = ConstraintSpec::power(0.5, 1.0, 2.0);
        AscentOptions opt;
        opt.seed = seed;
        const AscentReport rep = maximize_cstar(spec, 192, opt);
        bool mono = true;
        for (size_t i = 1; i < rep.c_history.size(); ++i)
            if (rep.c_history[i] < rep.c_history[i - 1] - 1e-10) mono = false;
        add(out, "optimize.ascent c-history nondecreasing", mono, 0.0, 1e-10);
        add(out, "optimize.criticality gap <= 1e-3 at convergence", rep.criticality_gap <= 1e-3,
            rep.criticality_gap, 1e-3);
        const CoefField re = schwarz_rearrange(rep.b_final);
        double fixed = 0.0;
        for (int i = 0; i < re.size(); ++i) fixed = std::max(fixed, std::abs(re[i] - rep.b_final[i]));
        add(out, "optimize.maximizer is a rearrangement fixed point", fixed == 0.0, fixed, 0.0);
    }
    {
        const PeriodicGrid g(1.0, 256);
        double worst = 0.0;
        bool zero_mean_only = true;
        for (int t = 0; t < 5; ++t) {
            GridFunction v = random_direction(g, rng, 6);
            const double val = second_variation_k(1.0, v);
            worst = std::max(worst, val);
            if (val > -1e-10) zero_mean_only = false;
        }
        const double flat = second_variation_k(1.0, GridFunction(g, 0.7));
        add(out, "optimize.second variation of k negative semidefinite",
            worst <= 0.0 && zero_mean_only && std::abs(flat) <= 1e-12, worst, 0.0);
    }
    {
        bool agree = true;
        const ConstraintSpec a = ConstraintSpec::power(1.0, 1.0, 2.0);
        agree &= local_maximality_criterion(a).verdict == Maximality::local_max;
        agree &= saddle_direction_check(a, 1, 128).delta_large < 0.0;
        const ConstraintSpec b = ConstraintSpec::power(std::numbers::pi, 4.0, 1.25);
        agree &= local_maximality_criterion(b).verdict == Maximality::saddle;
        agree &= saddle_direction_check(b, 1, 128).delta_large > 0.0;
        add(out, "optimize.D(beta) sign matches measured saddle directions", agree, 0.0, 0.0);
    }
    {
        const ConstraintSpec spec = ConstraintSpec::power(5.0, 1.0, 2.0);
        AscentOptions opt;
        opt.seed = seed;
        const AscentReport rep = maximize_cstar(spec, 512, opt);
        add(out, "optimize.euler-lagrange residual of the ascent output (L=5)",
            rep.el_residual <= 1e-2, rep.el_residual, 1e-2);
    }
    return out;
}

inline std::vector<Check> verify_stepfn(std::uint64_t seed) {
    using verify_detail::add;
    std::vector<Check> out;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);

    {
        double worst = 0.0, worst_ratio = 0.0;
        for (int t = 0; t < 20; ++t) {
            const double theta = 0.2 + 0.7 * u(rng);
            const double mup = 0.5 + 3.5 * u(rng);
            const double mum = 0.5 * mup * u(rng);
            const double L = 0.5 + 1.5 * u(rng);
            const double lam = 0.3 + 1.2 * u(rng);
            const StepProfile s(theta, mup, mum, L);
            const double ke = exact_k(s, lam);
            const double e1 = std::abs(principal_eigenvalue(sample_step(s, 512), lam) - ke);
            const double e2 = std::abs(principal_eigenvalue(sample_step(s, 2048), lam) - ke);
            worst = std::max(worst, e2);
            // the ratio is only meaningful while the h^2 term dominates solver noise
            if (e1 > 1e-7) worst_ratio = std::max(worst_ratio, e2 / e1);
        }
        add(out, "stepfn.exact_k matches grid eigensolver at N=2048", worst <= 1e-4, worst, 1e-4);
        add(out, "stepfn.error drops under two N-doublings (2nd order)", worst_ratio <= 0.25,
            worst_ratio, 0.25);
    }
    {
        const StepProfile s(0.4, 2.5, 0.3, 2.0);
        const double lam = 0.9;
        const double alpha = s.alpha();
        const double lo = -(std::min(alpha + alpha * alpha * 4.0, s.mu_plus) + lam * lam) - 1.0;
        const double hi = -(alpha + lam * lam);
        double prev = std::numeric_limits<double>::infinity();
        bool mono = true;
        for (int i = 0; i <= 40; ++i) {
            const double k = lo + (hi - lo) * i / 40.0;
            const double f = detail::log_trace_monodromy(s, k);
            if (f > prev + 1e-12) mono = false;
            prev = f;
        }
        add(out, "stepfn.trace strictly monotone on the principal bracket", mono, 0.0, 0.0);
    }
    {
        double worst = 0.0;
        for (double mu : {0.5, 1.0, 3.0})
            worst = std::max(worst, std::abs(hfr_limit_speed(1.0, mu, 0.0) - 2.0 * std::sqrt(mu)));
        add(out, "stepfn.hfr limit at theta=1 equals 2 sqrt(mu)", worst <= 1e-10, worst, 1e-10);
        bool cont = true;
        double prev = hfr_limit_speed(1e-3, std::pow(1e-3, -0.5), 0.0);
        for (double th = 2e-3; th <= 1.0; th *= 1.6) {
            const double c = hfr_limit_speed(th, std::pow(th, -0.5), 0.0);
            if (!(std::isfinite(c) && c > 0.0)) cont = false;
            prev = c;
        }
        (void)prev;
        add(out, "stepfn.hfr limit finite and positive across theta", cont, 0.0, 0.0);
    }
    {
        const auto grid60 = log_theta_grid(40, 5e-3, 1.0);
        const auto grid120 = log_theta_grid(80, 5e-3, 1.0);
        const SweepResult a = sweep_theta(10.0, 1.0, 2.0, grid60);
        const SweepResult b = sweep_theta(10.0, 1.0, 2.0, grid120);
        const double cell = std::log(grid60[1] / grid60[0]);
        const double moved = std::abs(std::log(a.theta_star / b.theta_star));
        add(out, "stepfn.argmax stable under theta-grid refinement", moved <= cell, moved, cell);
    }
    return out;
}

inline std::vector<Check> verify_pdesim(std::uint64_t seed) {
    using verify_detail::add;
    std::vector<Check> out;
    (void)seed;
    const PeriodicGrid g(1.0, 64);

    {
        SimConfig cfg;
        cfg.b = CoefField(g, 1.0);
        cfg.t_final = 30.0;
        const FrontResult r = run_front(cfg);
        const double lower = 2.0 * std::sqrt(1.0);
        add(out, "pdesim.speed >= 2 sqrt(alpha) - tol", r.speed_estimate >= lower - 0.2,
            r.speed_estimate, lower - 0.2);
        double umax = 0.0;
        for (const auto& rec : r.track) umax = std::max(umax, rec.u_max);
        add(out, "pdesim.solution stays in [0,1]", umax <= 1.0 + 1e-8, umax, 1.0 + 1e-8);

        SimConfig half = cfg;
        half.dt = 0.5 * std::min(0.25 / (32.0 * 32.0), 0.05);
        const FrontResult r2 = run_front(half);
        const double rel = std::abs(r2.speed_estimate - r.speed_estimate) /
                           std::max(1e-12, std::abs(r.speed_estimate));
        add(out, "pdesim.speed insensitive (<1%) to halving dt", rel <= 0.01, rel, 0.01);
        SimConfig lvl = cfg;
        lvl.level = 0.1;
        const FrontResult r3 = run_front(lvl);
        const double rel3 = std::abs(r3.speed_estimate - r.speed_estimate) /
                            std::max(1e-12, std::abs(r.speed_estimate));
        add(out, "pdesim.speed insensitive (<1%) to level 1/2 -> 1/10", rel3 <= 0.01, rel3, 0.01);
    }
    {
        SimConfig lo, hi;
        lo.b = CoefField(g, 1.5);
        hi.b = CoefField(g, 1.5);
        lo.init_half_width = 0.5;
        hi.init_half_width = 1.0;
        lo.t_final = hi.t_final = 6.0;
        lo.domain_half_width = hi.domain_half_width = 40.0;
        FrontSim a(lo), b(hi);
        double worst = 0.0;
        for (int rec = 0; rec < 6; ++rec) {
            a.advance_one_record();
            b.advance_one_record();
            for (size_t i = 0; i < a.state().size(); ++i)
                worst = std::max(worst, a.state()[i] - b.state()[i]);
        }
        add(out, "pdesim.comparison principle u1 <= u2 preserved", worst <= 1e-10, worst, 1e-10);
    }
    return out;
}

inline std::vector<Check> run_verify_suite(const std::string& suite, std::uint64_t seed) {
    std::vector<Check> out;
    auto append = [&](const std::vector<Check>& v) { out.insert(out.end(), v.begin(), v.end()); };
    const bool all = suite == "all";
    if (all || suite == "grid") append(verify_grid(seed));
    if (all || suite == "eigen") append(verify_eigen(seed));
    if (all || suite == "speed") append(verify_speed(seed));
    if (all || suite == "rearrange") append(verify_rearrange(seed));
    if (all || suite == "constraints") append(verify_constraints(seed));
    if (all || suite == "optimize") append(verify_optimize(seed));
    if (all || suite == "stepfn") append(verify_stepfn(seed));
    if (all || suite == "pdesim") append(verify_pdesim(seed));
    if (out.empty()) throw std::invalid_argument("unknown verify suite: " + suite);
    return out;
}

}  // namespace kpp
