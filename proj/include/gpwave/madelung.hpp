#pragma once

// Polar decomposition of a sampled wavefunction into hydrodynamic fields
// (density, unwrapped phase, velocity, quantum potential, mean-field
// potential) and evaluation of the continuity, Hamilton-Jacobi, and Euler
// equations as numerical residuals over a snapshot pair.
//
// Numerical policy: spectral differentiation is applied only to smooth global
// fields (psi, phi = |psi|, rho); every ratio (velocity, quantum potential,
// their x-derivatives) is formed pointwise afterwards and never fed back into
// a transform. Ratio denominators are clamped at the mask floor, which leaves
// every in-mask value exact and keeps the untrusted tail values finite.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "gpwave/core.hpp"
#include "gpwave/field.hpp"

namespace gpwave {

/// Hydrodynamic fields on a grid. Entries where mask is false lie below the
/// relative density threshold and are flagged, not trusted.
struct MadelungFields {
    Grid grid;
    double t = 0.0;
    std::vector<double> rho;    // |psi|^2
    std::vector<double> S;      // unwrapped phase, continuous from the peak outward
    std::vector<double> v_qu;   // (hbar/m) * Im(conj(psi) dpsi) / rho
    std::vector<double> V_qu;   // -(hbar^2/2m) * phi'' / phi, phi = sqrt(rho)
    std::vector<double> V_GP;   // g * rho, pointwise exact
    std::vector<std::uint8_t> mask;
};

namespace detail {

inline double clamped(double value, double floor_value) {
    return std::max(value, floor_value);
}

/// Phase unwrap anchored at the density peak, proceeding outward both ways.
inline std::vector<double> unwrap_phase(const WaveField& field, int peak) {
    const int n = field.grid.n;
    std::vector<double> S(static_cast<std::size_t>(n));
    S[std::size_t(peak)] = std::arg(field.psi[std::size_t(peak)]);
    for (int j = peak + 1; j < n; ++j)
        S[std::size_t(j)] =
            S[std::size_t(j - 1)] +
            std::arg(field.psi[std::size_t(j)] * std::conj(field.psi[std::size_t(j - 1)]));
    for (int j = peak - 1; j >= 0; --j)
        S[std::size_t(j)] =
            S[std::size_t(j + 1)] +
            std::arg(field.psi[std::size_t(j)] * std::conj(field.psi[std::size_t(j + 1)]));
    return S;
}

inline int density_peak(const WaveField& field) {
    int peak = 0;
    double best = -1.0;
    for (int j = 0; j < field.grid.n; ++j) {
        const double r = std::norm(field.psi[std::size_t(j)]);
        if (r > best) {
            best = r;
            peak = j;
        }
    }
    return peak;
}

}  // namespace detail

/// Decompose a field into hydrodynamic components. eps_mask is the relative
/// density threshold for the validity mask. Rejects an identically zero field.
inline MadelungFields decompose(const WaveField& field, const PhysicsParams& params,
                                double eps_mask = 1e-6) {
    if (!(eps_mask > 0.0 && eps_mask < 1.0))
        throw std::invalid_argument("decompose: eps_mask must lie in (0, 1)");
    if (!field.finite())
        throw std::invalid_argument("decompose: field has non-finite samples");
    const Grid& g = field.grid;
    const int n = g.n;
    const Fft fft(static_cast<std::size_t>(n));

    MadelungFields out;
    out.grid = g;
    out.t = field.t;
    out.rho.resize(std::size_t(n));
    double rho_max = 0.0;
    for (int j = 0; j < n; ++j) {
        out.rho[std::size_t(j)] = std::norm(field.psi[std::size_t(j)]);
        rho_max = std::max(rho_max, out.rho[std::size_t(j)]);
    }
    if (rho_max == 0.0)
        throw std::invalid_argument("decompose: field is identically zero (all masked)");

    const double rho_floor = eps_mask * rho_max;
    out.mask.resize(std::size_t(n));
    for (int j = 0; j < n; ++j)
        out.mask[std::size_t(j)] = out.rho[std::size_t(j)] >= rho_floor ? 1 : 0;

    out.S = detail::unwrap_phase(field, detail::density_peak(field));

    // velocity from the probability current, not the phase gradient: the two
    // agree analytically and the current stays well behaved near nodes
    const auto dpsi = spectral_derivative(g, field.psi, 1, fft);
    out.v_qu.resize(std::size_t(n));
    const double hbar_over_m = params.hbar / params.mass;
    for (int j = 0; j < n; ++j) {
        const double current =
            std::imag(std::conj(field.psi[std::size_t(j)]) * dpsi[std::size_t(j)]);
        out.v_qu[std::size_t(j)] =
            hbar_over_m * current / detail::clamped(out.rho[std::size_t(j)], rho_floor);
    }

    std::vector<double> phi(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) phi[std::size_t(j)] = std::abs(field.psi[std::size_t(j)]);
    const auto d2phi = spectral_derivative_real(g, phi, 2, fft);
    const double phi_floor = std::sqrt(rho_floor);
    const double vqu_coef = -params.hbar * params.hbar / (2.0 * params.mass);
    out.V_qu.resize(std::size_t(n));
    for (int j = 0; j < n; ++j)
        out.V_qu[std::size_t(j)] = vqu_coef * d2phi[std::size_t(j)] /
                                   detail::clamped(phi[std::size_t(j)], phi_floor);

    out.V_GP.resize(std::size_t(n));
    for (int j = 0; j < n; ++j)
        out.V_GP[std::size_t(j)] = params.g * out.rho[std::size_t(j)];

    return out;
}

/// A residual field at the midpoint time of a snapshot pair; max_norm is the
/// largest magnitude inside the joint mask.
struct ResidualField {
    Grid grid;
    double t_mid = 0.0;
    std::vector<double> values;
    std::vector<std::uint8_t> mask;
    double max_norm = 0.0;
};

namespace detail {

inline void check_pair(const WaveField& before, const WaveField& after) {
    if (!(before.grid == after.grid))
        throw std::invalid_argument("residual: snapshot grids differ");
    if (!(after.t > before.t))
        throw std::invalid_argument("residual: snapshots must be time-ordered");
}

inline std::vector<std::uint8_t> joint_mask(const std::vector<double>& rho_b,
                                            const std::vector<double>& rho_a,
                                            double eps_mask, double& floor_b,
                                            double& floor_a) {
    const double max_b = *std::max_element(rho_b.begin(), rho_b.end());
    const double max_a = *std::max_element(rho_a.begin(), rho_a.end());
    if (max_b == 0.0 || max_a == 0.0)
        throw std::invalid_argument("residual: field is identically zero");
    floor_b = eps_mask * max_b;
    floor_a = eps_mask * max_a;
    std::vector<std::uint8_t> mask(rho_b.size());
    for (std::size_t j = 0; j < rho_b.size(); ++j)
        mask[j] = (rho_b[j] >= floor_b && rho_a[j] >= floor_a) ? 1 : 0;
    return mask;
}

inline double masked_max(const std::vector<double>& values,
                         const std::vector<std::uint8_t>& mask) {
    double m = 0.0;
    for (std::size_t j = 0; j < values.size(); ++j)
        if (mask[j]) m = std::max(m, std::abs(values[j]));
    return m;
}

inline std::vector<double> density_of(const WaveField& f) {
    std::vector<double> rho(f.psi.size());
    for (std::size_t j = 0; j < f.psi.size(); ++j) rho[j] = std::norm(f.psi[j]);
    return rho;
}

}  // namespace detail

/// d rho/dt + d(rho v)/dx across the pair: centered time difference plus the
/// spectral divergence of the time-averaged current.
inline ResidualField continuity_residual(const WaveField& before, const WaveField& after,
                                         const PhysicsParams& params,
                                         double eps_mask = 1e-6) {
    detail::check_pair(before, after);
    const Grid& g = before.grid;
    const Fft fft(std::size_t(g.n));
    const double dt = after.t - before.t;
    const double hbar_over_m = params.hbar / params.mass;

    const auto rho_b = detail::density_of(before);
    const auto rho_a = detail::density_of(after);
    double floor_b = 0.0, floor_a = 0.0;
    auto mask = detail::joint_mask(rho_b, rho_a, eps_mask, floor_b, floor_a);

    // rho * v equals (hbar/m) Im(conj(psi) dpsi) identically, so the flux is a
    // smooth field and one spectral derivative of its time average suffices
    const auto dpsi_b = spectral_derivative(g, before.psi, 1, fft);
    const auto dpsi_a = spectral_derivative(g, after.psi, 1, fft);
    std::vector<double> flux(std::size_t(g.n));
    for (int j = 0; j < g.n; ++j) {
        const double jb = std::imag(std::conj(before.psi[std::size_t(j)]) *
                                    dpsi_b[std::size_t(j)]);
        const double ja = std::imag(std::conj(after.psi[std::size_t(j)]) *
                                    dpsi_a[std::size_t(j)]);
        flux[std::size_t(j)] = hbar_over_m * 0.5 * (jb + ja);
    }
    const auto div_flux = spectral_derivative_real(g, flux, 1, fft);

    ResidualField res;
    res.grid = g;
    res.t_mid = 0.5 * (before.t + after.t);
    res.mask = std::move(mask);
    res.values.resize(std::size_t(g.n));
    for (int j = 0; j < g.n; ++j)
        res.values[std::size_t(j)] =
            (rho_a[std::size_t(j)] - rho_b[std::size_t(j)]) / dt +
            div_flux[std::size_t(j)];
    res.max_norm = detail::masked_max(res.values, res.mask);
    return res;
}

/// hbar dS/dt + m v^2/2 + m omega^2 x^2/2 + V_qu + V_GP across the pair. The
/// two unwrapped phases are anchored to each other at the density peak so the
/// time difference is free of branch jumps.
inline ResidualField hamilton_jacobi_residual(const WaveField& before,
                                              const WaveField& after,
                                              const PhysicsParams& params,
                                              double eps_mask = 1e-6) {
    detail::check_pair(before, after);
    const Grid& g = before.grid;
    const double dt = after.t - before.t;
    const double t_mid = 0.5 * (before.t + after.t);

    MadelungFields mb = decompose(before, params, eps_mask);
    MadelungFields ma = decompose(after, params, eps_mask);

    // re-anchor the after phase to the before phase at before's peak; assumes
    // the per-point phase advance over dt stays below pi
    const int peak = detail::density_peak(before);
    const double delta = std::arg(after.psi[std::size_t(peak)] *
                                  std::conj(before.psi[std::size_t(peak)]));
    const double shift = mb.S[std::size_t(peak)] + delta - ma.S[std::size_t(peak)];
    for (auto& s : ma.S) s += shift;

    const double w2 = params.omega2(t_mid);
    ResidualField res;
    res.grid = g;
    res.t_mid = t_mid;
    res.mask.resize(std::size_t(g.n));
    for (int j = 0; j < g.n; ++j)
        res.mask[std::size_t(j)] = (mb.mask[std::size_t(j)] && ma.mask[std::size_t(j)]);
    res.values.resize(std::size_t(g.n));
    for (int j = 0; j < g.n; ++j) {
        auto hamiltonian = [&](const MadelungFields& f) {
            const double v = f.v_qu[std::size_t(j)];
            return 0.5 * params.mass * v * v + f.V_qu[std::size_t(j)] +
                   f.V_GP[std::size_t(j)];
        };
        const double x = g.x(j);
        res.values[std::size_t(j)] =
            params.hbar * (ma.S[std::size_t(j)] - mb.S[std::size_t(j)]) / dt +
            0.5 * (hamiltonian(mb) + hamiltonian(ma)) +
            0.5 * params.mass * w2 * x * x;
    }
    res.max_norm = detail::masked_max(res.values, res.mask);
    return res;
}

namespace detail {

struct EulerSnapshot {
    std::vector<double> v;        // clamped velocity ratio
    std::vector<double> advect;   // v dv/dx
    std::vector<double> force;    // (1/m) d(V_qu + V_GP)/dx
};

inline EulerSnapshot euler_terms(const WaveField& f, const PhysicsParams& params,
                                 double rho_floor, const Fft& fft) {
    const Grid& g = f.grid;
    const int n = g.n;
    const auto dpsi = spectral_derivative(g, f.psi, 1, fft);
    const auto d2psi = spectral_derivative(g, f.psi, 2, fft);

    std::vector<double> phi(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) phi[std::size_t(j)] = std::abs(f.psi[std::size_t(j)]);
    const auto dphi = spectral_derivative_real(g, phi, 1, fft);
    const auto d2phi = spectral_derivative_real(g, phi, 2, fft);
    const auto d3phi = spectral_derivative_real(g, phi, 3, fft);

    const double hbar_over_m = params.hbar / params.mass;
    const double vqu_coef = -params.hbar * params.hbar / (2.0 * params.mass);
    const double phi_floor = std::sqrt(rho_floor);

    EulerSnapshot out;
    out.v.resize(std::size_t(n));
    out.advect.resize(std::size_t(n));
    out.force.resize(std::size_t(n));
    for (int j = 0; j < n; ++j) {
        const auto psi = f.psi[std::size_t(j)];
        const double rho = std::norm(psi);
        const double rho_c = clamped(rho, rho_floor);
        const double current = std::imag(std::conj(psi) * dpsi[std::size_t(j)]);
        const double dcurrent = std::imag(std::conj(psi) * d2psi[std::size_t(j)]);
        const double drho = 2.0 * std::real(std::conj(psi) * dpsi[std::size_t(j)]);

        const double v = hbar_over_m * current / rho_c;
        const double dv =
            hbar_over_m * (dcurrent / rho_c - current * drho / (rho_c * rho_c));
        out.v[std::size_t(j)] = v;
        out.advect[std::size_t(j)] = v * dv;

        const double phi_c = clamped(phi[std::size_t(j)], phi_floor);
        const double dV_qu =
            vqu_coef * (d3phi[std::size_t(j)] / phi_c -
                        d2phi[std::size_t(j)] * dphi[std::size_t(j)] / (phi_c * phi_c));
        const double dV_gp = params.g * drho;
        out.force[std::size_t(j)] = (dV_qu + dV_gp) / params.mass;
    }
    return out;
}

}  // namespace detail

/// dv/dt + v dv/dx + omega^2 x + (1/m) d(V_qu + V_GP)/dx across the pair.
inline ResidualField euler_residual(const WaveField& before, const WaveField& after,
                                    const PhysicsParams& params,
                                    double eps_mask = 1e-6) {
    detail::check_pair(before, after);
    const Grid& g = before.grid;
    const Fft fft(std::size_t(g.n));
    const double dt = after.t - before.t;
    const double t_mid = 0.5 * (before.t + after.t);

    const auto rho_b = detail::density_of(before);
    const auto rho_a = detail::density_of(after);
    double floor_b = 0.0, floor_a = 0.0;
    auto mask = detail::joint_mask(rho_b, rho_a, eps_mask, floor_b, floor_a);

    const auto sb = detail::euler_terms(before, params, floor_b, fft);
    const auto sa = detail::euler_terms(after, params, floor_a, fft);

    const double w2 = params.omega2(t_mid);
    ResidualField res;
    res.grid = g;
    res.t_mid = t_mid;
    res.mask = std::move(mask);
    res.values.resize(std::size_t(g.n));
    for (int j = 0; j < g.n; ++j) {
        const std::size_t u = std::size_t(j);
        res.values[u] = (sa.v[u] - sb.v[u]) / dt + 0.5 * (sb.advect[u] + sa.advect[u]) +
                        w2 * g.x(j) + 0.5 * (sb.force[u] + sa.force[u]);
    }
    res.max_norm = detail::masked_max(res.values, res.mask);
    return res;
}

}  // namespace gpwave
