#pragma once

// Uniform periodic spatial grid and complex wavefunction samples on it.

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "gpwave/fft.hpp"

namespace gpwave {

/// Uniform periodic grid with points x_j = x_min + j*dx, j in [0, n).
/// x_max itself is not a sample (periodic wrap). n must be a power of two >= 16.
struct Grid {
    double x_min = 0.0;
    double x_max = 0.0;
    int n = 0;

    Grid() = default;
    Grid(double xmin, double xmax, int npoints) : x_min(xmin), x_max(xmax), n(npoints) {
        if (!std::isfinite(x_min) || !std::isfinite(x_max) || !(x_max > x_min))
            throw std::invalid_argument("Grid: need finite x_max > x_min");
        if (n < 16 || !is_power_of_two(std::size_t(n)))
            throw std::invalid_argument("Grid: n must be a power of two >= 16");
    }

    double length() const { return x_max - x_min; }
    double dx() const { return (x_max - x_min) / n; }
    double x(int j) const { return x_min + j * dx(); }

    /// Signed wavenumber of Fourier mode j (standard FFT ordering).
    double wavenumber(int j) const {
        const int jj = (j <= n / 2) ? j : j - n;
        return 2.0 * std::numbers::pi * jj / length();
    }

    bool operator==(const Grid& o) const {
        return x_min == o.x_min && x_max == o.x_max && n == o.n;
    }
};

/// Complex wavefunction samples on a grid, with a time stamp.
struct WaveField {
    Grid grid;
    std::vector<std::complex<double>> psi;
    double t = 0.0;

    bool finite() const {
        for (const auto& v : psi)
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
        return true;
    }
};

/// k-th spectral derivative of complex samples on a periodic grid.
/// Odd orders zero the Nyquist mode.
inline std::vector<std::complex<double>> spectral_derivative(
    const Grid& grid, const std::vector<std::complex<double>>& f, int order,
    const Fft& fft) {
    std::vector<std::complex<double>> a = f;
    fft.forward(a);
    for (int j = 0; j < grid.n; ++j) {
        if (order % 2 != 0 && j == grid.n / 2) {
            a[j] = 0.0;
            continue;
        }
        std::complex<double> ik(0.0, grid.wavenumber(j));
        std::complex<double> factor = 1.0;
        for (int p = 0; p < order; ++p) factor *= ik;
        a[j] *= factor;
    }
    fft.inverse(a);
    return a;
}

inline std::vector<std::complex<double>> spectral_derivative(
    const Grid& grid, const std::vector<std::complex<double>>& f, int order = 1) {
    return spectral_derivative(grid, f, order, Fft(std::size_t(grid.n)));
}

/// Spectral derivative of a real field; returns the real part.
inline std::vector<double> spectral_derivative_real(const Grid& grid,
                                                    const std::vector<double>& f,
                                                    int order, const Fft& fft) {
    std::vector<std::complex<double>> a(f.begin(), f.end());
    a = spectral_derivative(grid, a, order, fft);
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i].real();
    return out;
}

}  // namespace gpwave
