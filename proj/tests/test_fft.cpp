#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "gpwave/fft.hpp"

using namespace gpwave;
using Catch::Matchers::WithinAbs;

namespace {

using cvec = std::vector<std::complex<double>>;

// direct O(n^2) transform as the independent reference
cvec naive_dft(const cvec& in) {
    const std::size_t n = in.size();
    cvec out(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::complex<double> acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double phase =
                -2.0 * std::numbers::pi * double(k) * double(j) / double(n);
            acc += in[j] * std::polar(1.0, phase);
        }
        out[k] = acc;
    }
    return out;
}

cvec random_signal(std::size_t n, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    cvec v(n);
    for (auto& x : v) x = {u(rng), u(rng)};
    return v;
}

}  // namespace

TEST_CASE("size must be a power of two") {
    CHECK(is_power_of_two(16));
    CHECK(is_power_of_two(1));
    CHECK(!is_power_of_two(0));
    CHECK(!is_power_of_two(24));
    CHECK_THROWS_AS(Fft(12), std::invalid_argument);
    CHECK_NOTHROW(Fft(64));
}

TEST_CASE("forward transform matches the direct DFT") {
    for (const std::size_t n : {std::size_t(16), std::size_t(64), std::size_t(256)}) {
        cvec a = random_signal(n, 7u + unsigned(n));
        const cvec expected = naive_dft(a);
        Fft(n).forward(a);
        for (std::size_t k = 0; k < n; ++k)
            CHECK_THAT(std::abs(a[k] - expected[k]), WithinAbs(0.0, 1e-11));
    }
}

TEST_CASE("inverse transform undoes the forward transform") {
    const std::size_t n = 128;
    const cvec original = random_signal(n, 99u);
    cvec a = original;
    const Fft fft(n);
    fft.forward(a);
    fft.inverse(a);
    for (std::size_t j = 0; j < n; ++j)
        CHECK_THAT(std::abs(a[j] - original[j]), WithinAbs(0.0, 1e-13));
}

TEST_CASE("unit impulse transforms to a flat spectrum") {
    const std::size_t n = 32;
    cvec a(n, 0.0);
    a[0] = 1.0;
    Fft(n).forward(a);
    for (const auto& v : a) CHECK_THAT(std::abs(v - 1.0), WithinAbs(0.0, 1e-14));
}

TEST_CASE("constant input transforms to a single zero-mode line") {
    const std::size_t n = 32;
    cvec a(n, {2.0, -1.0});
    Fft(n).forward(a);
    CHECK_THAT(std::abs(a[0] - std::complex<double>(64.0, -32.0)),
               WithinAbs(0.0, 1e-12));
    for (std::size_t k = 1; k < n; ++k)
        CHECK_THAT(std::abs(a[k]), WithinAbs(0.0, 1e-12));
}

TEST_CASE("transform preserves energy (Parseval)") {
    const std::size_t n = 256;
    cvec a = random_signal(n, 5u);
    double time_energy = 0.0;
    for (const auto& v : a) time_energy += std::norm(v);
    Fft(n).forward(a);
    double freq_energy = 0.0;
    for (const auto& v : a) freq_energy += std::norm(v);
    CHECK_THAT(freq_energy / double(n), WithinAbs(time_energy, 1e-10));
}

TEST_CASE("transform is linear", "[property]") {
    const std::size_t n = 64;
    const cvec x = random_signal(n, 11u);
    const cvec y = random_signal(n, 12u);
    const std::complex<double> alpha{0.7, -0.3};

    cvec combo(n);
    for (std::size_t j = 0; j < n; ++j) combo[j] = alpha * x[j] + y[j];

    const Fft fft(n);
    cvec fx = x, fy = y;
    fft.forward(fx);
    fft.forward(fy);
    fft.forward(combo);
    for (std::size_t k = 0; k < n; ++k)
        CHECK_THAT(std::abs(combo[k] - (alpha * fx[k] + fy[k])),
                   WithinAbs(0.0, 1e-11));
}
