#pragma once

#include <complex>
#include <cstddef>

namespace fracshoot::detail {

/// Real-to-complex transform pair of a fixed length, backed by FFTW.
///
/// Plans are created once per length and shared; executing them is
/// thread-safe. Buffers may have any alignment.
class RealFft {
public:
    virtual ~RealFft() = default;

    std::size_t size() const noexcept { return n_; }
    std::size_t spectrum_size() const noexcept { return n_ / 2 + 1; }

    /// in: size() reals; out: spectrum_size() complex values.
    virtual void forward(const double* in, std::complex<double>* out) const = 0;
    /// Unnormalised inverse. `in` is clobbered.
    virtual void inverse(std::complex<double>* in, double* out) const = 0;

protected:
    explicit RealFft(std::size_t n) : n_(n) {}

private:
    std::size_t n_;
};

const RealFft& real_fft(std::size_t n);

}  // namespace fracshoot::detail
