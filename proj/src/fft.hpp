#pragma once

#include "scir/image.hpp"

#include <complex>
#include <memory>
#include <span>

namespace scir::detail {

/// Unnormalized forward / normalized inverse 2-D complex DFT of a fixed size.
/// Plans are created once; execution is thread-safe.
class Fft2d {
public:
    explicit Fft2d(Size size);
    ~Fft2d();
    Fft2d(const Fft2d&) = delete;
    Fft2d& operator=(const Fft2d&) = delete;

    Size size() const { return size_; }

    void forward(std::span<std::complex<double>> in, std::span<std::complex<double>> out) const;
    /// Includes the 1/(width*height) factor.
    void inverse(std::span<std::complex<double>> in, std::span<std::complex<double>> out) const;

private:
    Size size_;
    struct Plans;
    std::unique_ptr<Plans> plans_;
};

/// Angular frequency in (-pi, pi] of DFT bin `k` out of `n`.
inline double bin_frequency(int k, int n) {
    constexpr double two_pi = 6.283185307179586476925286766559;
    const int signed_k = (2 * k > n) ? k - n : k;
    return two_pi * signed_k / n;
}

}  // namespace scir::detail
