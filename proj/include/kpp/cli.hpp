#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "kpp/constraints.hpp"
#include "kpp/fields.hpp"
#include "kpp/io.hpp"
#include "kpp/optimize.hpp"
#include "kpp/pdesim.hpp"
#include "kpp/speed.hpp"
#include "kpp/stepfn.hpp"
#include "kpp/verify.hpp"

namespace kpp::cli {

using nlohmann::json;

/// Resolved run configuration; every field has a default and the full set is
/// echoed into each summary.json for provenance.
struct RunConfig {
    std::string command;
    double L = 1.0;
    double beta = 1.0;
    int N = 256;
    std::uint64_t seed = 42;
    std::string out_dir = "out";
    std::string coef_path;
    std::string constraint = "p:2";
    double constant = 0.0;  // speed/eigen/simulate: constant coefficient if > 0
    double lambda = 1.0;    // eigen
    double gap_tol = 1e-3;  // maximize
    int max_iters = 5000;   // maximize
    double theta_min = 1e-3, theta_max = 1.0;  // sweeps
    int theta_points = 60;
    std::string L_list = "5,10,20,50";  // sweep-L
    double p = 2.0;                     // sweeps
    double T = 60.0, dt = 0.0, domain_half = 0.0, level = 0.5;  // simulate
    int pts_per_unit = 32;
    std::string suite = "all";  // verify
};

inline ConstraintSpec parse_constraint(const RunConfig& c) {
    const std::string& s = c.constraint;
    if (s.rfind("p:", 0) == 0) return ConstraintSpec::power(c.L, c.beta, std::stod(s.substr(2)));
    if (s.rfind("box:", 0) == 0) {
        const auto comma = s.find(',', 4);
        if (comma == std::string::npos)
            throw std::invalid_argument("--constraint: box form is box:<alpha>,<h>");
        return ConstraintSpec::box(c.L, std::stod(s.substr(4, comma - 4)),
                                   std::stod(s.substr(comma + 1)));
    }
    throw std::invalid_argument("--constraint: expected p:<float> or box:<alpha>,<h>");
}

inline json config_json(const RunConfig& c) {
    return json{{"command", c.command},
                {"L", c.L},
                {"beta", c.beta},
                {"N", c.N},
                {"seed", c.seed},
                {"out", c.out_dir},
                {"coef", c.coef_path},
                {"constraint", c.constraint},
                {"constant", c.constant},
                {"lambda", c.lambda},
                {"gap_tol", c.gap_tol},
                {"max_iters", c.max_iters},
                {"theta_min", c.theta_min},
                {"theta_max", c.theta_max},
                {"theta_points", c.theta_points},
                {"L_list", c.L_list},
                {"p", c.p},
                {"T", c.T},
                {"dt", c.dt},
                {"domain_half_width", c.domain_half},
                {"level", c.level},
                {"pts_per_unit", c.pts_per_unit},
                {"suite", c.suite}};
}

inline CoefField load_coefficient(const RunConfig& c) {
    if (!c.coef_path.empty()) return read_coef_csv(c.coef_path);
    if (c.constant > 0.0) return CoefField(PeriodicGrid(c.L, c.N), c.constant);
    throw std::invalid_argument("no coefficient given: pass --coef <csv> or --constant <value>");
}

inline void write_summary(const RunConfig& c, json body) {
    std::filesystem::create_directories(c.out_dir);
    body["config"] = config_json(c);
    std::ofstream out(std::filesystem::path(c.out_dir) / "summary.json");
    out << body.dump(2) << "\n";
}

inline json speed_json(const SpeedResult& sr) {
    return json{{"c_star", sr.c_star},
                {"lambda_star", sr.lambda_star},
                {"k_at_min", sr.k_at_min},
                {"alpha", sr.alpha},
                {"lower_bound", sr.lower_bound},
                {"upper_bound", sr.upper_bound},
                {"lambda_defined", sr.lambda_defined}};
}

inline int cmd_speed(const RunConfig& cfg) {
    const CoefField b = load_coefficient(cfg);
    const SpeedResult sr = minimal_speed(b);
    json body{{"speed", speed_json(sr)}};
    if (sr.lambda_defined) {
        const EigenPair pair = principal_eigenpair(b, sr.lambda_star);
        body["eigen"] = {{"k", pair.k}, {"residual", pair.residual}};
    }
    write_summary(cfg, body);
    write_coef_csv(std::filesystem::path(cfg.out_dir) / "coef.csv", b);
    return 0;
}

inline int cmd_eigen(const RunConfig& cfg) {
    const CoefField b = load_coefficient(cfg);
    const EigenPair pair = principal_eigenpair(b, cfg.lambda);
    write_summary(cfg, json{{"eigen",
                             {{"lambda", pair.lambda},
                              {"k", pair.k},
                              {"residual", pair.residual},
                              {"psi_min", min_value(pair.psi)},
                              {"psi_l2", l2_norm(pair.psi)},
                              {"pairing", inner(pair.psi_tilde, pair.psi)}}}});
    const std::filesystem::path dir(cfg.out_dir);
    write_coef_csv(dir / "coef.csv", b);
    write_coef_csv(dir / "psi.csv", pair.psi);
    write_coef_csv(dir / "psi_tilde.csv", pair.psi_tilde);
    return 0;
}

inline int cmd_maximize(const RunConfig& cfg) {
    const ConstraintSpec spec = parse_constraint(cfg);
    AscentOptions opt;
    opt.gap_tol = cfg.gap_tol;
    opt.max_iterations = cfg.max_iters;
    opt.seed = cfg.seed;
    AscentReport rep;
    if (!cfg.coef_path.empty())
        rep = maximize_cstar(spec, read_coef_csv(cfg.coef_path), opt);
    else
        rep = maximize_cstar(spec, cfg.N, opt);
    write_summary(cfg, json{{"maximize",
                             {{"c_star", rep.c_star},
                              {"criticality_gap", rep.criticality_gap},
                              {"el_residual", rep.el_residual},
                              {"iterations", rep.iterations},
                              {"converged", rep.converged},
                              {"c_history", rep.c_history}}}});
    write_coef_csv(std::filesystem::path(cfg.out_dir) / "coef.csv", rep.b_final);
    return rep.converged ? 0 : 1;
}

inline int cmd_sweep_theta(const RunConfig& cfg) {
    const auto grid = log_theta_grid(cfg.theta_points, cfg.theta_min, cfg.theta_max);
    const SweepResult sw = sweep_theta(cfg.L, cfg.beta, cfg.p, grid);
    write_summary(cfg, json{{"sweep_theta", {{"theta_star", sw.theta_star}, {"c_star", sw.c_star}}}});
    write_sweep_csv(std::filesystem::path(cfg.out_dir) / "sweep.csv", sw.rows);
    return 0;
}

inline int cmd_sweep_L(const RunConfig& cfg) {
    std::vector<double> Ls;
    std::stringstream ss(cfg.L_list);
    for (std::string tok; std::getline(ss, tok, ',');)
        if (!tok.empty()) Ls.push_back(std::stod(tok));
    if (Ls.empty()) throw std::invalid_argument("sweep-L: empty --L-list");
    const auto grid = log_theta_grid(cfg.theta_points, cfg.theta_min, cfg.theta_max);
    std::vector<SweepRow> rows;
    json arr = json::array();
    for (double L : Ls) {
        const SweepResult sw = sweep_theta(L, cfg.beta, cfg.p, grid);
        const SpeedResult sr = cstar_step(sweep_profile(sw.theta_star, L, cfg.beta, cfg.p));
        rows.push_back({sw.theta_star, L, cfg.beta, cfg.p, sr.c_star, sr.lambda_star, sr.k_at_min});
        arr.push_back({{"L", L}, {"theta_star", sw.theta_star}, {"c_star", sr.c_star}});
    }
    write_summary(cfg, json{{"sweep_L", arr}});
    write_sweep_csv(std::filesystem::path(cfg.out_dir) / "sweep.csv", rows);
    return 0;
}

inline int cmd_simulate(const RunConfig& cfg) {
    SimConfig sim;
    sim.b = load_coefficient(cfg);
    sim.t_final = cfg.T;
    sim.dt = cfg.dt;
    sim.domain_half_width = cfg.domain_half;
    sim.level = cfg.level;
    sim.pts_per_unit = cfg.pts_per_unit;
    const SpeedResult sr = minimal_speed(sim.b);
    sim.c_star_hint = sr.lambda_defined ? sr.upper_bound : 0.0;
    const FrontResult fr = run_front(sim);
    const double rel = sr.c_star > 0.0 ? std::abs(fr.speed_estimate - sr.c_star) / sr.c_star : 0.0;
    write_summary(cfg, json{{"simulate",
                             {{"speed_estimate", fr.speed_estimate},
                              {"c_star", sr.c_star},
                              {"relative_gap", rel},
                              {"boundary_clearance", fr.boundary_clearance},
                              {"records", fr.track.size()}}}});
    write_front_csv(std::filesystem::path(cfg.out_dir) / "front.csv", fr.track);
    return 0;
}

inline int cmd_verify(const RunConfig& cfg) {
    const std::vector<Check> checks = run_verify_suite(cfg.suite, cfg.seed);
    bool all_pass = true;
    json arr = json::array();
    for (const Check& c : checks) {
        all_pass &= c.pass;
        std::printf("%s %s (%s)\n", c.pass ? "PASS" : "FAIL", c.name.c_str(), c.detail.c_str());
        arr.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    }
    write_summary(cfg, json{{"verify", arr}, {"all_pass", all_pass}});
    return all_pass ? 0 : 1;
}

inline int run(int argc, const char* const* argv) {
    RunConfig cfg;
    CLI::App app{"Minimal pulsating-front speeds in periodic media: computation, "
                 "coefficient optimization, sweeps and direct simulation"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand
    app.set_config("--config")->description("flat key=value config file; flags win");
    app.allow_config_extras(false);

    app.add_option("--L", cfg.L, "period length")->capture_default_str();
    app.add_option("--beta", cfg.beta, "constraint level")->capture_default_str();
    app.add_option("--N", cfg.N, "grid samples per period")->capture_default_str();
    app.add_option("--seed", cfg.seed, "seed for randomized studies")->capture_default_str();
    app.add_option("--out", cfg.out_dir, "output directory")->capture_default_str();
    app.add_option("--coef", cfg.coef_path, "coefficient CSV (header L=<float>,N=<int>)");
    // config files split "box:<alpha>,<h>" on the comma; accept both pieces and rejoin
    std::vector<std::string> constraint_parts;
    app.add_option("--constraint", constraint_parts, "p:<float> or box:<alpha>,<h>")
        ->expected(1, 2);

    CLI::App* speed = app.add_subcommand("speed", "compute c*(b) and its minimizer");
    speed->add_option("--constant", cfg.constant, "use the constant coefficient b == value");

    CLI::App* eigen = app.add_subcommand("eigen", "principal eigenpair at fixed lambda");
    eigen->add_option("--lambda", cfg.lambda, "drift parameter")->capture_default_str();
    eigen->add_option("--constant", cfg.constant, "use the constant coefficient b == value");

    CLI::App* maximize = app.add_subcommand("maximize", "maximize c*(b) over the constraint class");
    maximize->add_option("--gap-tol", cfg.gap_tol, "criticality-gap stopping tolerance")
        ->capture_default_str();
    maximize->add_option("--max-iters", cfg.max_iters, "ascent iteration cap")->capture_default_str();

    CLI::App* sweept = app.add_subcommand("sweep-theta", "duty-cycle sweep of the step family");
    sweept->add_option("--p", cfg.p, "constraint exponent")->capture_default_str();
    sweept->add_option("--theta-min", cfg.theta_min)->capture_default_str();
    sweept->add_option("--theta-max", cfg.theta_max)->capture_default_str();
    sweept->add_option("--theta-points", cfg.theta_points)->capture_default_str();

    CLI::App* sweepl = app.add_subcommand("sweep-L", "period sweep of the optimal duty cycle");
    sweepl->add_option("--p", cfg.p, "constraint exponent")->capture_default_str();
    sweepl->add_option("--L-list", cfg.L_list, "comma-separated periods")->capture_default_str();
    sweepl->add_option("--theta-points", cfg.theta_points)->capture_default_str();

    CLI::App* simulate = app.add_subcommand("simulate", "direct front propagation run");
    simulate->add_option("--constant", cfg.constant, "use the constant coefficient b == value");
    simulate->add_option("--T", cfg.T, "final time")->capture_default_str();
    simulate->add_option("--dt", cfg.dt, "time step (0: automatic)")->capture_default_str();
    simulate->add_option("--domain-half-width", cfg.domain_half, "0: automatic")
        ->capture_default_str();
    simulate->add_option("--level", cfg.level, "front tracking level")->capture_default_str();
    simulate->add_option("--pts-per-unit", cfg.pts_per_unit)->capture_default_str();

    CLI::App* verify = app.add_subcommand("verify", "run the property suites");
    verify->add_option("--suite", cfg.suite,
                       "all|grid|eigen|speed|rearrange|constraints|optimize|stepfn|pdesim")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    if (!constraint_parts.empty()) {
        cfg.constraint = constraint_parts[0];
        for (size_t i = 1; i < constraint_parts.size(); ++i) cfg.constraint += "," + constraint_parts[i];
    }

    try {
        if (speed->parsed()) {
            cfg.command = "speed";
            return cmd_speed(cfg);
        }
        if (eigen->parsed()) {
            cfg.command = "eigen";
            return cmd_eigen(cfg);
        }
        if (maximize->parsed()) {
            cfg.command = "maximize";
            return cmd_maximize(cfg);
        }
        if (sweept->parsed()) {
            cfg.command = "sweep-theta";
            return cmd_sweep_theta(cfg);
        }
        if (sweepl->parsed()) {
            cfg.command = "sweep-L";
            return cmd_sweep_L(cfg);
        }
        if (simulate->parsed()) {
            cfg.command = "simulate";
            return cmd_simulate(cfg);
        }
        cfg.command = "verify";
        return cmd_verify(cfg);
    } catch (const io_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 1;
    }
}

inline int run(const std::vector<std::string>& args) {
    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("kppspeed");
    for (const auto& a : args) argv.push_back(a.c_str());
    return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace kpp::cli
