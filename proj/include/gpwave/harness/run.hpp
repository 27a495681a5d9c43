#pragma once

// Mode dispatch: executes a validated RunConfig, writes its artifacts, and
// maps failures onto the process exit contract (0 success, 2 configuration,
// 3 numerical). Also hosts the solver-vs-oracle comparison and the
// convergence studies, which are pure functions over series.

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <limits>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "gpwave/harness/config.hpp"
#include "gpwave/harness/io.hpp"
#include "gpwave/madelung.hpp"
#include "gpwave/spectral.hpp"
#include "gpwave/variational.hpp"

namespace gpwave::harness {

// ---------------------------------------------------------------------------
// Comparison of the reduced solver against the spectral oracle
// ---------------------------------------------------------------------------

struct ComparisonRow {
    double t = 0.0;
    double q_var = 0.0;
    double mean_x_pde = 0.0;
    double abs_err_x = 0.0;
    double half_sigma_var = 0.0;
    double var_x_pde = 0.0;
    double abs_err_var = 0.0;
};

struct ComparisonReport {
    std::vector<ComparisonRow> rows;
    double max_abs_err_x = 0.0;
    double max_abs_err_var = 0.0;
    double c_int = 2.0;  // interaction variant the reduced series was run with
};

namespace detail {

struct SampledPair {
    std::vector<double> t;
    std::vector<double> center;  // q or <x>
    std::vector<double> width;   // sigma/2 or var_x
};

inline SampledPair sampled(const VariationalSeries& series) {
    SampledPair out;
    for (const auto& s : series) {
        out.t.push_back(s.t);
        out.center.push_back(s.q);
        out.width.push_back(0.5 * s.sigma);
    }
    return out;
}

inline SampledPair sampled(const ObservableSeries& series) {
    SampledPair out;
    for (const auto& o : series) {
        out.t.push_back(o.t);
        out.center.push_back(o.mean_x);
        out.width.push_back(o.var_x);
    }
    return out;
}

inline double linear_at(const std::vector<double>& ts, const std::vector<double>& ys,
                        double t) {
    if (t <= ts.front()) return ys.front();
    if (t >= ts.back()) return ys.back();
    const auto it = std::lower_bound(ts.begin(), ts.end(), t);
    const std::size_t hi = std::size_t(it - ts.begin());
    if (ts[hi] == t) return ys[hi];
    const double alpha = (t - ts[hi - 1]) / (ts[hi] - ts[hi - 1]);
    return ys[hi - 1] + alpha * (ys[hi] - ys[hi - 1]);
}

inline double mean_step(const SampledPair& s) {
    if (s.t.size() < 2) return std::numeric_limits<double>::infinity();
    return (s.t.back() - s.t.front()) / double(s.t.size() - 1);
}

}  // namespace detail

/// Align the two series on the coarser of the two time bases (linear
/// interpolation for the finer one) and tabulate center and width errors.
inline ComparisonReport compare(const VariationalSeries& var_series,
                                const ObservableSeries& pde_series,
                                double c_int = 2.0) {
    if (var_series.empty() || pde_series.empty())
        throw std::invalid_argument("compare: series must be non-empty");
    const detail::SampledPair var = detail::sampled(var_series);
    const detail::SampledPair pde = detail::sampled(pde_series);

    const double lo = std::max(var.t.front(), pde.t.front());
    const double hi = std::min(var.t.back(), pde.t.back());
    const double eps = 1e-12 * std::max(1.0, std::abs(hi));
    if (lo > hi + eps)
        throw std::invalid_argument("compare: series time ranges are disjoint");

    const bool var_is_base = detail::mean_step(var) >= detail::mean_step(pde);
    const detail::SampledPair& base = var_is_base ? var : pde;
    const detail::SampledPair& other = var_is_base ? pde : var;

    ComparisonReport report;
    report.c_int = c_int;
    for (std::size_t i = 0; i < base.t.size(); ++i) {
        const double t = base.t[i];
        if (t < lo - eps || t > hi + eps) continue;
        const double oc = detail::linear_at(other.t, other.center, t);
        const double ow = detail::linear_at(other.t, other.width, t);
        ComparisonRow row;
        row.t = t;
        row.q_var = var_is_base ? base.center[i] : oc;
        row.mean_x_pde = var_is_base ? oc : base.center[i];
        row.half_sigma_var = var_is_base ? base.width[i] : ow;
        row.var_x_pde = var_is_base ? ow : base.width[i];
        row.abs_err_x = std::abs(row.q_var - row.mean_x_pde);
        row.abs_err_var = std::abs(row.half_sigma_var - row.var_x_pde);
        report.rows.push_back(row);
        report.max_abs_err_x = std::max(report.max_abs_err_x, row.abs_err_x);
        report.max_abs_err_var = std::max(report.max_abs_err_var, row.abs_err_var);
    }
    if (report.rows.empty())
        throw std::invalid_argument("compare: no common sample times in overlap");
    return report;
}

inline std::string comparison_csv(const ComparisonReport& report) {
    std::string body =
        "t,q_var,mean_x_pde,abs_err_x,half_sigma_var,var_x_pde,abs_err_var\n";
    for (const auto& r : report.rows) {
        body += format_double(r.t) + ',' + format_double(r.q_var) + ',' +
                format_double(r.mean_x_pde) + ',' + format_double(r.abs_err_x) +
                ',' + format_double(r.half_sigma_var) + ',' +
                format_double(r.var_x_pde) + ',' + format_double(r.abs_err_var) +
                '\n';
    }
    return body;
}

inline std::string comparison_summary_csv(const ComparisonReport& report) {
    return "c_int,max_abs_err_x,max_abs_err_var\n" + format_double(report.c_int) +
           ',' + format_double(report.max_abs_err_x) + ',' +
           format_double(report.max_abs_err_var) + '\n';
}

// ---------------------------------------------------------------------------
// Convergence studies
// ---------------------------------------------------------------------------

struct ConvergenceRow {
    std::string study;
    double h = 0.0;      // step size of the rung
    double error = 0.0;  // difference against the next-finer rung (or residual)
    double order = std::numeric_limits<double>::quiet_NaN();
};

struct ConvergenceTable {
    std::vector<ConvergenceRow> rows;
    std::vector<std::string> warnings;
};

namespace detail {

/// Turn an error ladder e(h), e(h/2), ... into table rows with per-rung
/// estimated order log2(e_i / e_{i+1}); flags non-monotone ladders.
inline void append_ladder(ConvergenceTable& table, const std::string& study,
                          const std::vector<double>& h,
                          const std::vector<double>& e) {
    for (std::size_t i = 0; i < e.size(); ++i) {
        ConvergenceRow row;
        row.study = study;
        row.h = h[i];
        row.error = e[i];
        if (i + 1 < e.size() && e[i] > 0.0 && e[i + 1] > 0.0)
            row.order = std::log2(e[i] / e[i + 1]);
        table.rows.push_back(row);
    }
    for (std::size_t i = 0; i + 1 < e.size(); ++i)
        if (!(e[i] > e[i + 1])) {
            table.warnings.push_back(study + ": non-monotone error ladder");
            break;
        }
}

}  // namespace detail

/// Self-convergence ladders for the reduced integrator (4th order expected),
/// the split-step propagator (2nd order), and the hydrodynamic residual
/// operators (2nd order, halving dx and dt together). Errors are differences
/// between successive rungs, so the leading error constant cancels and the
/// estimated order is unbiased.
inline ConvergenceTable convergence_study(const RunConfig& cfg) {
    ConvergenceTable table;
    const PhysicsParams& params = cfg.physics;
    const VariationalState init =
        VariationalState::initial(cfg.initial.x0, cfg.initial.v0, cfg.initial.sigma0,
                                  cfg.initial.sigma_dot0, params);

    {  // reduced ODE system, fixed-step RK4
        const double T = std::min(cfg.t_final, 2.0 * std::numbers::pi);
        const double h0 = T / 64.0;
        const int rungs = 5;
        std::vector<VariationalSeries> runs;
        for (int i = 0; i < rungs; ++i)
            runs.push_back(propagate(init, params, cfg.variant, init.t + T,
                                     h0 / double(1 << i), IntegratorMethod::rk4(),
                                     1L << i));
        std::vector<double> h, e;
        for (int i = 0; i + 1 < rungs; ++i) {
            const auto& a = runs[std::size_t(i)];
            const auto& b = runs[std::size_t(i + 1)];
            const std::size_t len = std::min(a.size(), b.size());
            double err = 0.0;
            for (std::size_t k = 0; k < len; ++k)
                err = std::max(err, std::max(std::abs(a[k].q - b[k].q),
                                             std::abs(a[k].sigma - b[k].sigma)));
            h.push_back(h0 / double(1 << i));
            e.push_back(err);
        }
        detail::append_ladder(table, "rk4", h, e);
    }

    {  // split-step propagator, fixed grid, dt halving
        const double T = std::min(cfg.t_final, 1.0);
        const double h0 = T / 16.0;
        const int rungs = 5;
        const WaveField psi0 = initial_field_from_state(init, params, cfg.grid.grid());
        std::vector<WaveField> finals;
        for (int i = 0; i < rungs; ++i) {
            WaveField f = psi0;
            evolve(f, params, init.t + T, h0 / double(1 << i),
                   std::numeric_limits<long>::max(),
                   [&](long, const WaveField& snap) { f = snap; });
            finals.push_back(f);
        }
        std::vector<double> h, e;
        for (int i = 0; i + 1 < rungs; ++i) {
            double err = 0.0;
            for (std::size_t j = 0; j < finals[std::size_t(i)].psi.size(); ++j)
                err = std::max(err, std::abs(finals[std::size_t(i)].psi[j] -
                                             finals[std::size_t(i + 1)].psi[j]));
            h.push_back(h0 / double(1 << i));
            e.push_back(err);
        }
        detail::append_ladder(table, "strang", h, e);
    }

    {  // residual operators, dx and dt halved together
        const double T = std::min(cfg.t_final, 0.5);
        const double dt0 = 4.0 * cfg.dt;
        const int rungs = 3;
        std::vector<double> h, e_cont, e_hj, e_euler;
        for (int k = 0; k < rungs; ++k) {
            const Grid grid(cfg.grid.x_min, cfg.grid.x_max, cfg.grid.n * (1 << k));
            const double dt = dt0 / double(1 << k);
            WaveField prev, cur;
            cur = initial_field_from_state(init, params, grid);
            evolve(cur, params, init.t + T, dt, 1L,
                   [&](long, const WaveField& snap) {
                       prev = cur;
                       cur = snap;
                   });
            h.push_back(dt);
            e_cont.push_back(
                continuity_residual(prev, cur, params, cfg.eps_mask).max_norm);
            e_hj.push_back(
                hamilton_jacobi_residual(prev, cur, params, cfg.eps_mask).max_norm);
            e_euler.push_back(
                euler_residual(prev, cur, params, cfg.eps_mask).max_norm);
        }
        detail::append_ladder(table, "residual_continuity", h, e_cont);
        detail::append_ladder(table, "residual_hamilton_jacobi", h, e_hj);
        detail::append_ladder(table, "residual_euler", h, e_euler);
    }

    return table;
}

inline std::string convergence_csv(const ConvergenceTable& table) {
    std::string body = "study,h,error,order\n";
    for (const auto& r : table.rows)
        body += r.study + ',' + format_double(r.h) + ',' + format_double(r.error) +
                ',' + format_double(r.order) + '\n';
    return body;
}

// ---------------------------------------------------------------------------
// Mode execution
// ---------------------------------------------------------------------------

namespace detail {

inline VariationalState initial_state(const RunConfig& cfg) {
    return VariationalState::initial(cfg.initial.x0, cfg.initial.v0,
                                     cfg.initial.sigma0, cfg.initial.sigma_dot0,
                                     cfg.physics);
}

/// 11 pathline seeds spanning +-3 standard deviations around the start center.
inline std::vector<double> default_seeds(const RunConfig& cfg) {
    const double stddev = std::sqrt(cfg.initial.sigma0 / 2.0);
    std::vector<double> seeds;
    for (int k = -5; k <= 5; ++k)
        seeds.push_back(cfg.initial.x0 + double(k) * 3.0 * stddev / 5.0);
    return seeds;
}

inline void run_variational(const RunConfig& cfg,
                            const std::filesystem::path& dir) {
    const VariationalSeries series =
        propagate(initial_state(cfg), cfg.physics, cfg.variant, cfg.t_final, cfg.dt,
                  cfg.method, cfg.output_every);
    write_text_atomic(dir / "variational.csv", variational_csv(series));
    write_text_atomic(dir / "trajectories.csv",
                      trajectories_csv(bohmian_trajectories(default_seeds(cfg),
                                                            series)));
    write_meta(dir, cfg);
}

inline void run_spectral(const RunConfig& cfg, const std::filesystem::path& dir) {
    WaveField field =
        initial_field_from_state(initial_state(cfg), cfg.physics, cfg.grid.grid());
    write_snapshot(dir / "snapshot_initial.csv", field);
    WaveField last = field;
    const ObservableSeries series =
        evolve(field, cfg.physics, cfg.t_final, cfg.dt, cfg.output_every,
               [&](long, const WaveField& snap) { last = snap; });
    write_text_atomic(dir / "observables.csv", observables_csv(series));
    write_snapshot(dir / "snapshot_final.csv", last);
    write_meta(dir, cfg);
}

inline void run_compare(const RunConfig& cfg, const std::filesystem::path& dir) {
    const VariationalState init = initial_state(cfg);
    const VariationalSeries var_series =
        propagate(init, cfg.physics, cfg.variant, cfg.t_final, cfg.dt, cfg.method,
                  cfg.output_every);
    WaveField field = initial_field_from_state(init, cfg.physics, cfg.grid.grid());
    const ObservableSeries pde_series =
        evolve(field, cfg.physics, cfg.t_final, cfg.dt, cfg.output_every);
    const ComparisonReport report =
        compare(var_series, pde_series, cfg.variant.c_int);
    write_text_atomic(dir / "variational.csv", variational_csv(var_series));
    write_text_atomic(dir / "observables.csv", observables_csv(pde_series));
    write_text_atomic(dir / "comparison.csv", comparison_csv(report));
    write_text_atomic(dir / "comparison_summary.csv",
                      comparison_summary_csv(report));
    write_meta(dir, cfg);
}

inline void run_residuals(const RunConfig& cfg, const std::filesystem::path& dir) {
    WaveField field =
        initial_field_from_state(initial_state(cfg), cfg.physics, cfg.grid.grid());
    const long n_steps =
        std::max<long>(1, std::lround((cfg.t_final - field.t) / cfg.dt));

    std::string body = "t_mid,continuity_max,hamilton_jacobi_max,euler_max\n";
    WaveField prev, cur = field, pair_before, pair_after;
    evolve(field, cfg.physics, cfg.t_final, cfg.dt, 1L,
           [&](long step, const WaveField& snap) {
               prev = cur;
               cur = snap;
               if (step < 1) return;
               if (step % cfg.output_every != 0 && step != n_steps) return;
               const auto cont =
                   continuity_residual(prev, cur, cfg.physics, cfg.eps_mask);
               const auto hj =
                   hamilton_jacobi_residual(prev, cur, cfg.physics, cfg.eps_mask);
               const auto euler =
                   euler_residual(prev, cur, cfg.physics, cfg.eps_mask);
               body += format_double(cont.t_mid) + ',' +
                       format_double(cont.max_norm) + ',' +
                       format_double(hj.max_norm) + ',' +
                       format_double(euler.max_norm) + '\n';
               pair_before = prev;
               pair_after = cur;
           });
    write_text_atomic(dir / "residuals.csv", body);
    write_snapshot(dir / "snapshot_before.csv", pair_before);
    write_snapshot(dir / "snapshot_after.csv", pair_after);
    write_meta(dir, cfg);
}

inline void run_converge(const RunConfig& cfg, const std::filesystem::path& dir) {
    const ConvergenceTable table = convergence_study(cfg);
    write_text_atomic(dir / "convergence.csv", convergence_csv(table));
    write_meta(dir, cfg, table.warnings);
    for (const auto& w : table.warnings)
        std::cerr << "warning: " << w << '\n';
}

}  // namespace detail

inline int run(const RunConfig& cfg);  // forward declaration for sweep recursion

namespace detail {

inline std::string point_dir_name(std::size_t index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "point_%03zu", index);
    return buf;
}

inline RunConfig sweep_point_config(const RunConfig& cfg, std::size_t index) {
    RawConfig raw = cfg.raw;
    const auto dot = cfg.sweep.key.find('.');
    raw[cfg.sweep.key.substr(0, dot)][cfg.sweep.key.substr(dot + 1)] =
        cfg.sweep.values[index];
    raw["run"]["mode"] = to_string(cfg.sweep.mode);
    raw["run"]["out_dir"] =
        (std::filesystem::path(cfg.out_dir) / point_dir_name(index)).string();
    RunConfig point = config_from_raw(raw, cfg.origin);
    point.workers = 1;
    return point;
}

inline int run_sweep(const RunConfig& cfg, const std::filesystem::path& dir) {
    const std::size_t count = cfg.sweep.values.size();
    std::vector<std::string> status(count);
    std::mutex io_mutex;

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
            const std::filesystem::path point_dir = dir / point_dir_name(i);
            std::filesystem::create_directories(point_dir);
            try {
                const RunConfig point = sweep_point_config(cfg, i);
                const int code = run(point);
                status[i] = (code == 0) ? "ok" : "numerical_failure";
            } catch (const ConfigError& e) {
                status[i] = "config_error";
                write_text_atomic(point_dir / "failure.txt",
                                  std::string("status = config_error\nmessage = ") +
                                      e.what() + '\n');
            }
            std::lock_guard<std::mutex> lock(io_mutex);
            std::cout << point_dir_name(i) << " (" << cfg.sweep.key << " = "
                      << cfg.sweep.values[i] << "): " << status[i] << '\n';
        }
    };

    const std::size_t n_workers =
        std::min<std::size_t>(std::max(1, cfg.workers), count);
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w + 1 < n_workers; ++w) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    std::string index = "point,dir,value,status\n";
    for (std::size_t i = 0; i < count; ++i)
        index += std::to_string(i) + ',' + point_dir_name(i) + ',' +
                 cfg.sweep.values[i] + ',' + status[i] + '\n';
    write_text_atomic(dir / "index.csv", index);

    for (const auto& s : status)
        if (s == "config_error") return 2;
    for (const auto& s : status)
        if (s == "numerical_failure") return 3;
    return 0;
}

}  // namespace detail

/// Execute a validated config. Writes all artifacts under cfg.out_dir and
/// returns the process exit code. A numerical failure leaves a failure.txt
/// diagnostic in the output directory.
inline int run(const RunConfig& cfg) {
    const std::filesystem::path dir(cfg.out_dir);
    std::filesystem::create_directories(dir);
    try {
        switch (cfg.mode) {
            case RunMode::variational: detail::run_variational(cfg, dir); break;
            case RunMode::spectral: detail::run_spectral(cfg, dir); break;
            case RunMode::compare: detail::run_compare(cfg, dir); break;
            case RunMode::residuals: detail::run_residuals(cfg, dir); break;
            case RunMode::converge: detail::run_converge(cfg, dir); break;
            case RunMode::sweep: return detail::run_sweep(cfg, dir);
        }
        return 0;
    } catch (const NumericalFailure& e) {
        write_text_atomic(dir / "failure.txt",
                          "status = numerical_failure\nt = " + format_double(e.t) +
                              "\nmessage = " + e.what() + '\n');
        std::cerr << "numerical failure at t = " << e.t << ": " << e.what() << '\n';
        return 3;
    }
}

}  // namespace gpwave::harness
