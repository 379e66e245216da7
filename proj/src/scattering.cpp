#include "scir/scattering.hpp"

#include "fft.hpp"
#include "scir/error.hpp"

#include <cmath>
#include <complex>
#include <string>

namespace scir {

using detail::bin_frequency;
using cvec = std::vector<std::complex<double>>;

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr int kPeriodizationRadius = 2;

std::size_t binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    std::size_t r = 1;
    for (int i = 1; i <= k; ++i) r = r * static_cast<std::size_t>(n - k + i) / static_cast<std::size_t>(i);
    return r;
}

void extend_paths(const ScatteringConfig& c, ScatteringPath& prefix, int depth, std::vector<ScatteringPath>& out) {
    if (depth == 0) {
        out.push_back(prefix);
        return;
    }
    const int upper = prefix.empty() ? c.scales : prefix.back().scale;
    for (int j = 0; j < upper; ++j) {
        for (int l = 0; l < c.orientations; ++l) {
            prefix.push_back({j, l});
            extend_paths(c, prefix, depth - 1, out);
            prefix.pop_back();
        }
    }
}

// Periodized anisotropic Gaussian: exp(-sigma^2/2 * (u^2 + v^2/slant^2)) with
// (u, v) the frequency rotated into the (theta, theta + pi/2) frame.
double periodized_gaussian(double wx, double wy, double sigma, double theta, double slant) {
    const double c = std::cos(theta), s = std::sin(theta);
    const double inv_slant2 = 1.0 / (slant * slant);
    double acc = 0.0;
    for (int ny = -kPeriodizationRadius; ny <= kPeriodizationRadius; ++ny) {
        for (int nx = -kPeriodizationRadius; nx <= kPeriodizationRadius; ++nx) {
            const double ax = wx + 2.0 * kPi * nx;
            const double ay = wy + 2.0 * kPi * ny;
            const double u = c * ax + s * ay;
            const double v = -s * ax + c * ay;
            acc += std::exp(-0.5 * sigma * sigma * (u * u + v * v * inv_slant2));
        }
    }
    return acc;
}

void multiply(const cvec& a, std::span<const double> filter, cvec& out) {
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * filter[i];
}

// Drives the cascade and hands each path's unsmoothed spectrum (FFT of the
// modulus signal, or of the image for layer 0) to `visit` in canonical order.
template <class Visit>
void run_cascade(const GrayImage& img, const FilterBank& bank, Visit&& visit) {
    if (img.size() != bank.size()) {
        throw Error(Errc::SizeMismatch, "image " + std::to_string(img.width()) + "x" + std::to_string(img.height()) +
                                            " does not match filter bank " + std::to_string(bank.size().width) + "x" +
                                            std::to_string(bank.size().height));
    }
    const auto& cfg = bank.config();
    const auto& fft = bank.fft();
    const std::size_t n = img.size().area();

    cvec signal(n), spectrum(n), work(n);
    for (std::size_t i = 0; i < n; ++i) signal[i] = img.data()[i];
    fft.forward(signal, spectrum);

    ScatteringPath path;
    visit(path, spectrum);
    if (cfg.max_layer < 1) return;

    auto modulus_spectrum = [&](const cvec& input_hat, std::span<const double> psi, cvec& out) {
        multiply(input_hat, psi, work);
        fft.inverse(work, signal);
        for (auto& v : signal) v = std::abs(v);
        fft.forward(signal, out);
    };

    const int J = cfg.scales, L = cfg.orientations;
    std::vector<cvec> first(static_cast<std::size_t>(J * L), cvec(n));
    for (int j1 = 0; j1 < J; ++j1) {
        for (int l1 = 0; l1 < L; ++l1) {
            auto& u1 = first[static_cast<std::size_t>(j1 * L + l1)];
            modulus_spectrum(spectrum, bank.wavelet(j1, l1), u1);
            path.assign({{j1, l1}});
            visit(path, u1);
        }
    }
    if (cfg.max_layer < 2) return;

    cvec u2(n);
    for (int j1 = 0; j1 < J; ++j1) {
        for (int l1 = 0; l1 < L; ++l1) {
            const auto& u1 = first[static_cast<std::size_t>(j1 * L + l1)];
            for (int j2 = 0; j2 < j1; ++j2) {
                for (int l2 = 0; l2 < L; ++l2) {
                    modulus_spectrum(u1, bank.wavelet(j2, l2), u2);
                    path.assign({{j1, l1}, {j2, l2}});
                    visit(path, u2);
                }
            }
        }
    }
}

}  // namespace

void ScatteringConfig::validate() const {
    if (scales < 1) throw Error(Errc::InvalidConfig, "scattering needs at least one scale");
    if (scales > 16) throw Error(Errc::InvalidConfig, "too many scales");
    if (orientations < 1) throw Error(Errc::InvalidConfig, "scattering needs at least one orientation");
    if (max_layer < 0 || max_layer > 2) throw Error(Errc::InvalidConfig, "supported layers are 0, 1 and 2");
}

std::vector<ScatteringPath> enumerate_paths(const ScatteringConfig& config) {
    config.validate();
    std::vector<ScatteringPath> out;
    ScatteringPath prefix;
    for (int k = 0; k <= config.max_layer; ++k) extend_paths(config, prefix, k, out);
    return out;
}

std::size_t scattering_path_count(const ScatteringConfig& config) {
    config.validate();
    std::size_t total = 0, pk = 1;
    for (int k = 0; k <= config.max_layer; ++k) {
        total += pk * binomial(config.scales, k);
        pk *= static_cast<std::size_t>(config.orientations);
    }
    return total;
}

std::vector<double> morlet_spectrum(Size size, double sigma, double xi, double theta, double slant) {
    const double cx = xi * std::cos(theta), cy = xi * std::sin(theta);
    // Subtracting K times the envelope cancels the DC response exactly.
    const double k = periodized_gaussian(-cx, -cy, sigma, theta, slant) / periodized_gaussian(0.0, 0.0, sigma, theta, slant);
    std::vector<double> out(size.area());
    for (int ky = 0; ky < size.height; ++ky) {
        const double wy = bin_frequency(ky, size.height);
        for (int kx = 0; kx < size.width; ++kx) {
            const double wx = bin_frequency(kx, size.width);
            out[static_cast<std::size_t>(ky) * size.width + kx] =
                periodized_gaussian(wx - cx, wy - cy, sigma, theta, slant) -
                k * periodized_gaussian(wx, wy, sigma, theta, slant);
        }
    }
    out[0] = 0.0;
    return out;
}

std::vector<double> gaussian_spectrum(Size size, double sigma) {
    const double dc = periodized_gaussian(0.0, 0.0, sigma, 0.0, 1.0);
    std::vector<double> out(size.area());
    for (int ky = 0; ky < size.height; ++ky) {
        const double wy = bin_frequency(ky, size.height);
        for (int kx = 0; kx < size.width; ++kx) {
            out[static_cast<std::size_t>(ky) * size.width + kx] =
                periodized_gaussian(bin_frequency(kx, size.width), wy, sigma, 0.0, 1.0) / dc;
        }
    }
    return out;
}

FilterBank FilterBank::build(const ScatteringConfig& config, Size size, const MorletShape& shape) {
    config.validate();
    try {
        check_working_size(size, BlockGrid{1, 1}, config.scales);
    } catch (const Error& e) {
        throw Error(Errc::IncompatibleSize, e.what());
    }
    FilterBank bank;
    bank.config_ = config;
    bank.size_ = size;
    for (int j = 0; j < config.scales; ++j) {
        const double scale = std::ldexp(1.0, j);
        for (int l = 0; l < config.orientations; ++l) {
            const double theta = kPi * l / config.orientations;
            bank.wavelets_.push_back(morlet_spectrum(size, shape.sigma0 * scale, shape.xi0 / scale, theta, shape.slant));
        }
    }
    bank.lowpass_ = gaussian_spectrum(size, shape.sigma0 * std::ldexp(1.0, config.scales));
    bank.fft_ = std::make_shared<const detail::Fft2d>(size);
    return bank;
}

std::span<const double> FilterBank::wavelet(int scale, int orientation) const {
    if (scale < 0 || scale >= config_.scales || orientation < 0 || orientation >= config_.orientations) {
        throw Error(Errc::InvalidConfig, "wavelet index out of range");
    }
    return wavelets_[static_cast<std::size_t>(scale * config_.orientations + orientation)];
}

ScatteringMaps scatter(const GrayImage& img, const FilterBank& bank) {
    ScatteringMaps result{bank.size(), {}};
    result.maps.reserve(scattering_path_count(bank.config()));
    const std::size_t n = bank.size().area();
    cvec smoothed(n), out(n);
    run_cascade(img, bank, [&](const ScatteringPath& path, const cvec& u_hat) {
        multiply(u_hat, bank.lowpass(), smoothed);
        bank.fft().inverse(smoothed, out);
        ScatteringMap map{path, std::vector<double>(n)};
        for (std::size_t i = 0; i < n; ++i) map.values[i] = out[i].real();
        result.maps.push_back(std::move(map));
    });
    return result;
}

std::vector<double> pool_scattering(const ScatteringMaps& maps) {
    if (maps.maps.empty()) throw Error(Errc::EmptyInput, "no scattering maps to pool");
    std::vector<double> features;
    features.reserve(2 * maps.maps.size());
    for (const auto& map : maps.maps) {
        const double count = static_cast<double>(map.values.size());
        double sum = 0.0;
        for (double v : map.values) sum += v;
        const double mean = sum / count;
        double sq = 0.0;
        for (double v : map.values) sq += (v - mean) * (v - mean);
        features.push_back(mean);
        features.push_back(sq / count);
    }
    return features;
}

std::vector<double> scattering_features(const GrayImage& img, const FilterBank& bank) {
    const auto phi = bank.lowpass();
    const double n = static_cast<double>(bank.size().area());
    std::vector<double> features;
    features.reserve(2 * scattering_path_count(bank.config()));
    // Parseval: the smoothed map's mean is its DC bin / n, its variance the
    // energy of the remaining bins / n^2.
    run_cascade(img, bank, [&](const ScatteringPath&, const cvec& u_hat) {
        double energy = 0.0;
        for (std::size_t i = 1; i < u_hat.size(); ++i) energy += std::norm(u_hat[i]) * phi[i] * phi[i];
        features.push_back(u_hat[0].real() * phi[0] / n);
        features.push_back(energy / (n * n));
    });
    return features;
}

}  // namespace scir
