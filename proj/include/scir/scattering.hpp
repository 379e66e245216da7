#pragma once

#include "scir/image.hpp"

#include <memory>
#include <span>
#include <vector>

namespace scir {

namespace detail {
class Fft2d;
}

/// Scales J, orientations p and maximum layer m of the scattering cascade.
struct ScatteringConfig {
    int scales = 5;
    int orientations = 6;
    int max_layer = 2;

    void validate() const;
    friend bool operator==(const ScatteringConfig&, const ScatteringConfig&) = default;
};

struct PathStep {
    int scale = 0;
    int orientation = 0;
    friend bool operator==(const PathStep&, const PathStep&) = default;
    friend auto operator<=>(const PathStep&, const PathStep&) = default;
};

/// Sequence of (scale, orientation) pairs; empty for the layer-0 average.
using ScatteringPath = std::vector<PathStep>;

/// Admissible paths in canonical order: layer-major, then lexicographic in
/// (j1, l1, j2, l2, ...). Scale indices strictly decrease along a path.
std::vector<ScatteringPath> enumerate_paths(const ScatteringConfig& config);

/// Closed form sum_{k=0..m} p^k * C(J, k).
std::size_t scattering_path_count(const ScatteringConfig& config);

/// Morlet shape shared by every band-pass filter.
struct MorletShape {
    double sigma0 = 0.8;                           ///< envelope width at scale 0, in pixels
    double xi0 = 3.0 * 3.14159265358979323846 / 4;  ///< centre frequency at scale 0, rad/pixel
    double slant = 0.5;                            ///< envelope aspect ratio
};

/// Frequency response of a zero-mean Morlet wavelet with envelope width
/// `sigma`, centre frequency `xi` along direction `theta`, periodized on the
/// DFT grid of `size`. Real valued because the envelope is even.
std::vector<double> morlet_spectrum(Size size, double sigma, double xi, double theta, double slant);

/// Frequency response of an isotropic Gaussian low-pass with unit DC gain.
std::vector<double> gaussian_spectrum(Size size, double sigma);

/// Band-pass psi_{j,l} for j < J, l < p, plus the low-pass phi_J, all in the
/// frequency domain for one image size. Immutable and shareable.
class FilterBank {
public:
    static FilterBank build(const ScatteringConfig& config, Size size, const MorletShape& shape = {});

    const ScatteringConfig& config() const { return config_; }
    Size size() const { return size_; }

    std::span<const double> wavelet(int scale, int orientation) const;
    std::span<const double> lowpass() const { return lowpass_; }
    std::size_t wavelet_count() const { return wavelets_.size(); }

    const detail::Fft2d& fft() const { return *fft_; }

private:
    FilterBank() = default;

    ScatteringConfig config_;
    Size size_;
    std::vector<std::vector<double>> wavelets_;
    std::vector<double> lowpass_;
    std::shared_ptr<const detail::Fft2d> fft_;
};

struct ScatteringMap {
    ScatteringPath path;
    std::vector<double> values;  ///< row-major, full input resolution
};

struct ScatteringMaps {
    Size size;
    std::vector<ScatteringMap> maps;
};

/// Runs the cascade (circular convolutions, no subsampling) and returns every
/// smoothed map in canonical path order.
ScatteringMaps scatter(const GrayImage& img, const FilterBank& bank);

/// Population mean and variance of each map, interleaved (mean, variance).
std::vector<double> pool_scattering(const ScatteringMaps& maps);

/// Equivalent to pool_scattering(scatter(img, bank)) without materializing
/// the maps: means and variances are read off the spectra directly.
std::vector<double> scattering_features(const GrayImage& img, const FilterBank& bank);

}  // namespace scir
