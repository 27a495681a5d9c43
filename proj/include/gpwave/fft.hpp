#pragma once

// Radix-2 complex FFT with precomputed twiddles. Grids in this project are
// powers of two by construction, so no mixed-radix support is needed. An Fft
// object is an independent workspace: no globals, safe to use one per thread.

#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace gpwave {

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

class Fft {
public:
    explicit Fft(std::size_t n) : n_(n) {
        if (!is_power_of_two(n))
            throw std::invalid_argument("Fft: size must be a power of two");
        bitrev_.resize(n);
        std::size_t log2n = 0;
        while ((std::size_t{1} << log2n) < n) ++log2n;
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t r = 0;
            for (std::size_t b = 0; b < log2n; ++b)
                if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (log2n - 1 - b);
            bitrev_[i] = r;
        }
        // roots[j] = exp(-2*pi*i*j/n); each entry from sin/cos, not a recurrence
        roots_.resize(n / 2);
        for (std::size_t j = 0; j < n / 2; ++j) {
            const double ang = -2.0 * std::numbers::pi * double(j) / double(n);
            roots_[j] = {std::cos(ang), std::sin(ang)};
        }
    }

    std::size_t size() const { return n_; }

    /// In-place forward transform, unnormalized.
    void forward(std::vector<std::complex<double>>& a) const { transform(a, false); }

    /// In-place inverse transform, scaled by 1/n.
    void inverse(std::vector<std::complex<double>>& a) const {
        transform(a, true);
        const double s = 1.0 / double(n_);
        for (auto& v : a) v *= s;
    }

private:
    void transform(std::vector<std::complex<double>>& a, bool inverse) const {
        if (a.size() != n_) throw std::invalid_argument("Fft: length mismatch");
        for (std::size_t i = 0; i < n_; ++i)
            if (bitrev_[i] > i) std::swap(a[i], a[bitrev_[i]]);
        for (std::size_t len = 2; len <= n_; len <<= 1) {
            const std::size_t stride = n_ / len;
            for (std::size_t blk = 0; blk < n_; blk += len) {
                for (std::size_t j = 0; j < len / 2; ++j) {
                    std::complex<double> w = roots_[j * stride];
                    if (inverse) w = std::conj(w);
                    const auto u = a[blk + j];
                    const auto v = a[blk + j + len / 2] * w;
                    a[blk + j] = u + v;
                    a[blk + j + len / 2] = u - v;
                }
            }
        }
    }

    std::size_t n_;
    std::vector<std::size_t> bitrev_;
    std::vector<std::complex<double>> roots_;
};

}  // namespace gpwave
