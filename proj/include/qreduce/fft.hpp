#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "qreduce/errors.hpp"

namespace qreduce {

/// Radix-2 complex FFT with precomputed twiddles and bit-reversal table.
/// Grid sizes in this project are powers of two by construction, and a
/// self-contained transform keeps runs bit-reproducible.
class Fft {
public:
    explicit Fft(std::size_t n) : n_(n) {
        if (n < 2 || (n & (n - 1)) != 0)
            throw InvalidArgument("FFT size must be a power of two >= 2");
        bitrev_.resize(n);
        std::size_t log2n = 0;
        while ((std::size_t{1} << log2n) < n) ++log2n;
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t r = 0;
            for (std::size_t b = 0; b < log2n; ++b)
                if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (log2n - 1 - b);
            bitrev_[i] = r;
        }
        twiddle_.resize(n / 2);
        const double two_pi = 2.0 * 3.141592653589793238462643383279502884;
        for (std::size_t i = 0; i < n / 2; ++i) {
            const double a = -two_pi * double(i) / double(n);
            twiddle_[i] = {std::cos(a), std::sin(a)};
        }
    }

    std::size_t size() const { return n_; }

    void forward(std::vector<std::complex<double>>& a) const { transform(a, false); }

    /// Inverse transform including the 1/n factor.
    void inverse(std::vector<std::complex<double>>& a) const {
        transform(a, true);
        const double inv = 1.0 / double(n_);
        for (auto& x : a) x *= inv;
    }

private:
    void transform(std::vector<std::complex<double>>& a, bool invert) const {
        for (std::size_t i = 0; i < n_; ++i)
            if (i < bitrev_[i]) std::swap(a[i], a[bitrev_[i]]);
        for (std::size_t len = 2; len <= n_; len <<= 1) {
            const std::size_t stride = n_ / len;
            for (std::size_t block = 0; block < n_; block += len) {
                for (std::size_t k = 0; k < len / 2; ++k) {
                    std::complex<double> w = twiddle_[k * stride];
                    if (invert) w = std::conj(w);
                    const auto u = a[block + k];
                    const auto v = a[block + k + len / 2] * w;
                    a[block + k] = u + v;
                    a[block + k + len / 2] = u - v;
                }
            }
        }
    }

    std::size_t n_;
    std::vector<std::size_t> bitrev_;
    std::vector<std::complex<double>> twiddle_;
};

} // namespace qreduce
