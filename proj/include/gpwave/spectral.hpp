#pragma once

// Full solver of the 1D mean-field Schroedinger equation with cubic term and
// time-dependent harmonic trap, by Strang-split step Fourier stepping. Serves
// as the brute-force oracle for the reduced Gaussian dynamics. The nonlinear
// term is grouped with the trap potential in the diagonal-in-x factor, so
// every sub-step is exactly unitary; omega^2 is frozen at the step midpoint.

#include <cmath>
#include <complex>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "gpwave/core.hpp"
#include "gpwave/field.hpp"
#include "gpwave/variational.hpp"

namespace gpwave {

/// Scalar diagnostics of a field: norm, center, spatial variance, and the
/// mean-field energy functional.
struct Observables {
    double t = 0.0;
    double norm = 0.0;
    double mean_x = 0.0;
    double var_x = 0.0;
    double energy = 0.0;
};

using ObservableSeries = std::vector<Observables>;

inline double field_norm(const WaveField& field) {
    long double acc = 0.0L;
    for (const auto& v : field.psi) acc += (long double)std::norm(v);
    return double(acc * (long double)field.grid.dx());
}

/// Riemann-sum moments (exact for smooth periodic integrands) and the energy
/// functional with a spectral gradient, evaluated at the field's time stamp.
inline Observables observables(const WaveField& field, const PhysicsParams& params,
                               const Fft& fft) {
    const Grid& g = field.grid;
    const double dx = g.dx();
    long double norm_acc = 0.0L, mean_acc = 0.0L;
    for (int j = 0; j < g.n; ++j) {
        const long double rho = std::norm(field.psi[std::size_t(j)]);
        norm_acc += rho;
        mean_acc += rho * (long double)g.x(j);
    }
    const double norm = double(norm_acc * dx);
    const double mean = double(mean_acc / norm_acc);

    long double var_acc = 0.0L, quartic_acc = 0.0L, trap_acc = 0.0L;
    const double w2 = params.omega2(field.t);
    for (int j = 0; j < g.n; ++j) {
        const long double rho = std::norm(field.psi[std::size_t(j)]);
        const long double u = g.x(j) - mean;
        var_acc += rho * u * u;
        quartic_acc += rho * rho;
        trap_acc += rho * (long double)(0.5 * params.mass * w2 * g.x(j) * g.x(j));
    }

    auto dpsi = spectral_derivative(g, field.psi, 1, fft);
    long double kin_acc = 0.0L;
    for (const auto& v : dpsi) kin_acc += (long double)std::norm(v);
    const double kin_coef = params.hbar * params.hbar / (2.0 * params.mass);

    Observables obs;
    obs.t = field.t;
    obs.norm = norm;
    obs.mean_x = mean;
    obs.var_x = double(var_acc / norm_acc);
    obs.energy =
        double((kin_coef * kin_acc + trap_acc + 0.5 * params.g * quartic_acc) * dx);
    return obs;
}

inline Observables observables(const WaveField& field, const PhysicsParams& params) {
    return observables(field, params, Fft(std::size_t(field.grid.n)));
}

/// One Strang step: local phase half-step, full kinetic step in Fourier
/// space, second local half-step with the updated density. Advances the time
/// stamp by dt and preserves the norm to roundoff.
inline WaveField split_step(const WaveField& field, const PhysicsParams& params,
                            double dt, const Fft& fft) {
    if (!(dt > 0.0) || !std::isfinite(dt))
        throw std::invalid_argument("split_step: dt must be finite and > 0");
    const Grid& g = field.grid;
    const double w2 = params.omega2(field.t + dt / 2.0);
    const double local_coef = dt / (2.0 * params.hbar);

    WaveField out;
    out.grid = g;
    out.t = field.t + dt;
    out.psi = field.psi;

    auto local_half_step = [&](std::vector<std::complex<double>>& psi) {
        for (int j = 0; j < g.n; ++j) {
            const double x = g.x(j);
            const double v_local = 0.5 * params.mass * w2 * x * x +
                                   params.g * std::norm(psi[std::size_t(j)]);
            psi[std::size_t(j)] *= std::polar(1.0, -v_local * local_coef);
        }
    };

    local_half_step(out.psi);
    fft.forward(out.psi);
    const double kin_coef = params.hbar * dt / (2.0 * params.mass);
    for (int j = 0; j < g.n; ++j) {
        const double k = g.wavenumber(j);
        out.psi[std::size_t(j)] *= std::polar(1.0, -kin_coef * k * k);
    }
    fft.inverse(out.psi);
    local_half_step(out.psi);

    if (!out.finite()) {
        std::ostringstream msg;
        msg << "split step produced non-finite samples (t = " << field.t
            << ", dt = " << dt << ")";
        throw NumericalFailure(msg.str(), field.t);
    }
    return out;
}

inline WaveField split_step(const WaveField& field, const PhysicsParams& params,
                            double dt) {
    return split_step(field, params, dt, Fft(std::size_t(field.grid.n)));
}

/// Repeated split stepping from field.t to t_final (snapped to a whole number
/// of steps). Observables are recorded every snapshot_every steps, first and
/// last included; the observer, when given, receives the field at the same
/// instants. Step failures are rethrown with the failing step index.
template <class Observer>
ObservableSeries evolve(WaveField field, const PhysicsParams& params, double t_final,
                        double dt, long snapshot_every, Observer&& observer) {
    if (!(t_final > field.t))
        throw std::invalid_argument("evolve: t_final must exceed the field time");
    if (!(dt > 0.0)) throw std::invalid_argument("evolve: dt must be > 0");
    if (snapshot_every < 1)
        throw std::invalid_argument("evolve: snapshot_every must be >= 1");

    const double t0 = field.t;
    const long n_steps = std::max<long>(1, std::lround((t_final - t0) / dt));
    const Fft fft(std::size_t(field.grid.n));

    ObservableSeries series;
    series.push_back(observables(field, params, fft));
    observer(0L, static_cast<const WaveField&>(field));
    for (long i = 1; i <= n_steps; ++i) {
        try {
            field = split_step(field, params, dt, fft);
        } catch (const NumericalFailure& e) {
            std::ostringstream msg;
            msg << e.what() << " (step " << i << " of " << n_steps << ")";
            throw NumericalFailure(msg.str(), e.t);
        }
        field.t = t0 + double(i) * dt;
        if (i % snapshot_every == 0 || i == n_steps) {
            series.push_back(observables(field, params, fft));
            observer(i, static_cast<const WaveField&>(field));
        }
    }
    return series;
}

inline ObservableSeries evolve(WaveField field, const PhysicsParams& params,
                               double t_final, double dt, long snapshot_every = 1) {
    return evolve(std::move(field), params, t_final, dt, snapshot_every,
                  [](long, const WaveField&) {});
}

/// Synthesize the Gaussian packet for a reduced state and normalize it to
/// exactly unit norm, so both solvers start from the identical field.
inline WaveField initial_field_from_state(const VariationalState& state,
                                          const PhysicsParams& params,
                                          const Grid& grid) {
    WaveField field = synthesize(state, params, grid);
    const double scale = 1.0 / std::sqrt(field_norm(field));
    for (auto& v : field.psi) v *= scale;
    return field;
}

/// Fraction of spectral power carried by the top octave of wavenumbers
/// (|k| >= 7/8 of Nyquist). A resolved run keeps this near roundoff.
inline double tail_spectral_fraction(const WaveField& field) {
    const Grid& g = field.grid;
    Fft fft(std::size_t(g.n));
    std::vector<std::complex<double>> a = field.psi;
    fft.forward(a);
    const double k_nyq = std::numbers::pi * g.n / g.length();
    long double total = 0.0L, tail = 0.0L;
    for (int j = 0; j < g.n; ++j) {
        const long double p = std::norm(a[std::size_t(j)]);
        total += p;
        if (std::abs(g.wavenumber(j)) >= 7.0 / 8.0 * k_nyq) tail += p;
    }
    if (total == 0.0L) return 0.0;
    return double(tail / total);
}

}  // namespace gpwave
