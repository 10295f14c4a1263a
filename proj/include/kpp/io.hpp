#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "kpp/grid.hpp"
#include "kpp/pdesim.hpp"
#include "kpp/stepfn.hpp"

namespace kpp {

struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Full-precision decimal formatting (17 significant digits round-trips doubles).
inline std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Coefficient file format: first line "L=<float>,N=<int>", then one sample per
// line in x-order.

inline void write_coef_csv(const std::filesystem::path& path, const GridFunction& f) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot open " + path.string() + " for writing");
    out << "L=" << format_g17(f.grid.length) << ",N=" << f.grid.size << "\n";
    for (double v : f.values) out << format_g17(v) << "\n";
    if (!out) throw io_error("write failed: " + path.string());
}

inline void write_coef_csv(const std::filesystem::path& path, const CoefField& b) {
    write_coef_csv(path, b.as_function());
}

inline CoefField read_coef_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw io_error(path.string() + ":1: empty file");
    double L = 0.0;
    int N = 0;
    if (std::sscanf(line.c_str(), "L=%lf,N=%d", &L, &N) != 2)
        throw io_error(path.string() + ":1: expected header 'L=<float>,N=<int>'");
    std::vector<double> vals;
    vals.reserve(static_cast<size_t>(N));
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            size_t pos = 0;
            const double v = std::stod(line, &pos);
            vals.push_back(v);
        } catch (const std::exception&) {
            throw io_error(path.string() + ":" + std::to_string(lineno) + ": not a number: " + line);
        }
    }
    if (static_cast<int>(vals.size()) != N)
        throw io_error(path.string() + ": header says N=" + std::to_string(N) + " but " +
                       std::to_string(vals.size()) + " samples follow");
    try {
        return CoefField(PeriodicGrid(L, N), std::move(vals));
    } catch (const std::invalid_argument& e) {
        throw io_error(path.string() + ": " + e.what());
    }
}

inline void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepRow>& rows) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot open " + path.string() + " for writing");
    out << "theta,L,beta,p,c_star,lambda_star,k\n";
    for (const auto& r : rows)
        out << format_g17(r.theta) << ',' << format_g17(r.L) << ',' << format_g17(r.beta) << ','
            << format_g17(r.p) << ',' << format_g17(r.c_star) << ',' << format_g17(r.lambda_star)
            << ',' << format_g17(r.k) << "\n";
}

inline void write_front_csv(const std::filesystem::path& path,
                            const std::vector<FrontRecord>& track) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot open " + path.string() + " for writing");
    out << "t,x_half,u_max\n";
    for (const auto& r : track)
        out << format_g17(r.t) << ',' << format_g17(r.x_half) << ',' << format_g17(r.u_max)
            << "\n";
}

}  // namespace kpp
