#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <vector>

#include "gpwave/field.hpp"

using namespace gpwave;
using Catch::Matchers::WithinAbs;

TEST_CASE("grid construction enforces its invariants") {
    CHECK_NOTHROW(Grid(-8.0, 8.0, 64));
    CHECK_THROWS_AS(Grid(-8.0, 8.0, 48), std::invalid_argument);   // not 2^k
    CHECK_THROWS_AS(Grid(-8.0, 8.0, 8), std::invalid_argument);    // too small
    CHECK_THROWS_AS(Grid(8.0, -8.0, 64), std::invalid_argument);   // reversed
    CHECK_THROWS_AS(Grid(0.0, std::numeric_limits<double>::infinity(), 64),
                    std::invalid_argument);
}

TEST_CASE("grid points and spacing") {
    const Grid g(-4.0, 4.0, 16);
    CHECK(g.dx() == 0.5);
    CHECK(g.x(0) == -4.0);
    CHECK(g.x(8) == 0.0);
    CHECK(g.x(15) == 3.5);  // last point one dx short of x_max (periodic wrap)
}

TEST_CASE("wavenumbers follow the standard transform ordering") {
    const Grid g(0.0, 2.0 * std::numbers::pi, 16);
    CHECK_THAT(g.wavenumber(0), WithinAbs(0.0, 1e-15));
    CHECK_THAT(g.wavenumber(1), WithinAbs(1.0, 1e-15));
    CHECK_THAT(g.wavenumber(8), WithinAbs(8.0, 1e-15));    // Nyquist
    CHECK_THAT(g.wavenumber(9), WithinAbs(-7.0, 1e-15));   // negative branch
    CHECK_THAT(g.wavenumber(15), WithinAbs(-1.0, 1e-15));
}

TEST_CASE("spectral derivative of a plane-wave mode is exact") {
    const Grid g(-10.0, 10.0, 128);
    const double k = g.wavenumber(5);
    std::vector<double> f(128);
    for (int j = 0; j < 128; ++j) f[std::size_t(j)] = std::sin(k * g.x(j));

    const Fft fft(128);
    const auto d1 = spectral_derivative_real(g, f, 1, fft);
    const auto d2 = spectral_derivative_real(g, f, 2, fft);
    for (int j = 0; j < 128; ++j) {
        CHECK_THAT(d1[std::size_t(j)], WithinAbs(k * std::cos(k * g.x(j)), 1e-10));
        CHECK_THAT(d2[std::size_t(j)],
                   WithinAbs(-k * k * std::sin(k * g.x(j)), 1e-9));
    }
}

TEST_CASE("odd-order derivatives null the Nyquist mode") {
    const Grid g(0.0, 1.0, 32);
    std::vector<double> f(32);
    for (int j = 0; j < 32; ++j) f[std::size_t(j)] = (j % 2 == 0) ? 1.0 : -1.0;
    const auto d1 = spectral_derivative_real(g, f, 1, Fft(32));
    for (const double v : d1) CHECK_THAT(v, WithinAbs(0.0, 1e-12));
}

TEST_CASE("complex spectral derivative handles a Gaussian to roundoff") {
    const Grid g(-16.0, 16.0, 256);
    std::vector<std::complex<double>> f(256);
    for (int j = 0; j < 256; ++j) {
        const double x = g.x(j);
        f[std::size_t(j)] = std::exp(-0.5 * x * x);
    }
    const auto d1 = spectral_derivative(g, f, 1, Fft(256));
    for (int j = 0; j < 256; ++j) {
        const double x = g.x(j);
        CHECK_THAT(std::abs(d1[std::size_t(j)] - (-x * std::exp(-0.5 * x * x))),
                   WithinAbs(0.0, 1e-11));
    }
}

TEST_CASE("wave field finiteness check") {
    WaveField f;
    f.grid = Grid(-1.0, 1.0, 16);
    f.psi.assign(16, {1.0, 0.0});
    CHECK(f.finite());
    f.psi[3] = {std::numeric_limits<double>::quiet_NaN(), 0.0};
    CHECK(!f.finite());
}
