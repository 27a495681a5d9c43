#pragma once

// File emission and ingestion. All writes go through a temp-file-plus-rename
// so readers never observe a partial file. Floats are printed with 17
// significant digits so a written value round-trips to the identical double,
// and nothing in a data file depends on when or where it was produced.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "gpwave/field.hpp"
#include "gpwave/harness/config.hpp"
#include "gpwave/spectral.hpp"
#include "gpwave/variational.hpp"

namespace gpwave::harness {

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_text_atomic(const std::filesystem::path& path,
                              const std::string& body) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        os << body;
        os.flush();
        if (!os) throw std::runtime_error("write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

// ---------------------------------------------------------------------------
// CSV bodies
// ---------------------------------------------------------------------------

inline std::string variational_csv(const VariationalSeries& series) {
    std::string body = "t,q,p,sigma,sigma_dot,s0\n";
    for (const auto& s : series) {
        body += format_double(s.t) + ',' + format_double(s.q) + ',' +
                format_double(s.p) + ',' + format_double(s.sigma) + ',' +
                format_double(s.sigma_dot) + ',' + format_double(s.s0) + '\n';
    }
    return body;
}

inline std::string observables_csv(const ObservableSeries& series) {
    std::string body = "t,norm,mean_x,var_x,energy\n";
    for (const auto& o : series) {
        body += format_double(o.t) + ',' + format_double(o.norm) + ',' +
                format_double(o.mean_x) + ',' + format_double(o.var_x) + ',' +
                format_double(o.energy) + '\n';
    }
    return body;
}

inline std::string trajectories_csv(const BohmianTrajectories& traj) {
    std::string body = "# seeds = ";
    for (std::size_t k = 0; k < traj.x0.size(); ++k)
        body += (k ? "," : "") + format_double(traj.x0[k]);
    body += "\nt";
    for (std::size_t k = 0; k < traj.x0.size(); ++k)
        body += ",x_" + std::to_string(k);
    body += '\n';
    for (std::size_t i = 0; i < traj.t.size(); ++i) {
        body += format_double(traj.t[i]);
        for (std::size_t k = 0; k < traj.x0.size(); ++k)
            body += ',' + format_double(traj.x[k][i]);
        body += '\n';
    }
    return body;
}

// ---------------------------------------------------------------------------
// Snapshot format: two header lines (grid spec, time stamp), then one
// "x,re_psi,im_psi" row per grid point.
// ---------------------------------------------------------------------------

inline std::string snapshot_text(const WaveField& field) {
    const Grid& g = field.grid;
    std::string body = "# grid x_min=" + format_double(g.x_min) +
                       " x_max=" + format_double(g.x_max) +
                       " n=" + std::to_string(g.n) + '\n';
    body += "# t=" + format_double(field.t) + '\n';
    for (int j = 0; j < g.n; ++j) {
        const auto& v = field.psi[std::size_t(j)];
        body += format_double(g.x(j)) + ',' + format_double(v.real()) + ',' +
                format_double(v.imag()) + '\n';
    }
    return body;
}

inline void write_snapshot(const std::filesystem::path& path,
                           const WaveField& field) {
    write_text_atomic(path, snapshot_text(field));
}

inline WaveField read_snapshot(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error(path.string() + ": cannot open snapshot file");
    std::string line;
    double x_min = 0.0, x_max = 0.0, t = 0.0;
    int n = 0;
    if (!std::getline(in, line) ||
        std::sscanf(line.c_str(), "# grid x_min=%lf x_max=%lf n=%d", &x_min,
                    &x_max, &n) != 3)
        throw std::runtime_error(path.string() + ": malformed snapshot grid header");
    if (!std::getline(in, line) || std::sscanf(line.c_str(), "# t=%lf", &t) != 1)
        throw std::runtime_error(path.string() + ": malformed snapshot time header");

    WaveField field;
    field.grid = Grid(x_min, x_max, n);
    field.t = t;
    field.psi.reserve(std::size_t(n));
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        double x = 0.0, re = 0.0, im = 0.0;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &x, &re, &im) != 3)
            throw std::runtime_error(path.string() + ": malformed snapshot row '" +
                                     line + "'");
        field.psi.emplace_back(re, im);
    }
    if (field.psi.size() != std::size_t(n))
        throw std::runtime_error(path.string() + ": snapshot row count " +
                                 std::to_string(field.psi.size()) +
                                 " does not match header n=" + std::to_string(n));
    return field;
}

// ---------------------------------------------------------------------------
// Run metadata sidecar: resolved raw config echo, no timestamps, so data
// files stay byte-identical across reruns.
// ---------------------------------------------------------------------------

inline std::string meta_text(const RunConfig& cfg,
                             const std::vector<std::string>& extra = {}) {
    std::string body = "format = gpwave-run-v1\n";
    body += "mode = " + std::string(to_string(cfg.mode)) + '\n';
    body += "config = " + cfg.origin + '\n';
    for (const auto& [section, keys] : cfg.raw)
        for (const auto& [key, value] : keys)
            body += section + '.' + key + " = " + value + '\n';
    for (const auto& line : extra) body += line + '\n';
    return body;
}

inline void write_meta(const std::filesystem::path& dir, const RunConfig& cfg,
                       const std::vector<std::string>& extra = {}) {
    write_text_atomic(dir / "meta.txt", meta_text(cfg, extra));
}

}  // namespace gpwave::harness
