#include "scir/synthetic.hpp"

#include "fft.hpp"
#include "scir/error.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <random>

namespace scir {

using detail::bin_frequency;
using cvec = std::vector<std::complex<double>>;

namespace {

constexpr double kPi = 3.14159265358979323846;

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b)};
    return std::mt19937_64(seq);
}

void normalize(std::vector<double>& v) {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    const double sd = std::sqrt(var / static_cast<double>(v.size()));
    for (double& x : v) x = sd > 0.0 ? (x - mean) / sd : 0.0;
}

// Zero-mean, unit-variance class texture in the frequency domain.
cvec class_texture_spectrum(const SyntheticSpec& spec, int cls, const ClassSignature& sig,
                            const detail::Fft2d& fft) {
    const auto n = spec.size.area();
    auto rng = make_rng(spec.seed, 0x5eed0000ULL + static_cast<std::uint64_t>(cls), 0);
    std::normal_distribution<double> gauss;
    cvec white(n), spectrum(n), spatial(n);
    for (auto& v : white) v = gauss(rng);
    fft.forward(white, spectrum);

    const double cx = sig.frequency * std::cos(sig.orientation);
    const double cy = sig.frequency * std::sin(sig.orientation);
    const double width = sig.bandwidth * sig.frequency;
    for (int ky = 0; ky < spec.size.height; ++ky) {
        const double wy = bin_frequency(ky, spec.size.height);
        for (int kx = 0; kx < spec.size.width; ++kx) {
            const double wx = bin_frequency(kx, spec.size.width);
            const double a = ((wx - cx) * (wx - cx) + (wy - cy) * (wy - cy)) / (2 * width * width);
            const double b = ((wx + cx) * (wx + cx) + (wy + cy) * (wy + cy)) / (2 * width * width);
            spectrum[static_cast<std::size_t>(ky) * spec.size.width + kx] *= std::exp(-a) + std::exp(-b);
        }
    }
    spectrum[0] = 0.0;
    fft.inverse(spectrum, spatial);
    std::vector<double> real(n);
    for (std::size_t i = 0; i < n; ++i) real[i] = spatial[i].real();
    normalize(real);
    for (std::size_t i = 0; i < n; ++i) white[i] = real[i];
    fft.forward(white, spectrum);
    return spectrum;
}

}  // namespace

void SyntheticSpec::validate() const {
    if (classes < 2) throw Error(Errc::InvalidConfig, "synthetic corpus needs at least 2 classes");
    if (per_class < 2) throw Error(Errc::InvalidConfig, "synthetic corpus needs at least 2 images per class");
    if (size.width < 2 || size.height < 2) throw Error(Errc::InvalidConfig, "synthetic image size too small");
    if (!(noise >= 0.0) || !(max_shift >= 0.0)) throw Error(Errc::InvalidConfig, "noise and shift must be >= 0");
    if (!signatures.empty() && static_cast<int>(signatures.size()) != classes) {
        throw Error(Errc::InvalidConfig, "signature count must equal class count");
    }
}

std::vector<ClassSignature> class_signatures(const SyntheticSpec& spec) {
    spec.validate();
    if (!spec.signatures.empty()) return spec.signatures;
    auto rng = make_rng(spec.seed, 0x519ULL, 0);
    std::uniform_real_distribution<double> freq(0.35, 1.8), angle(0.0, kPi), bw(0.15, 0.35);
    std::vector<ClassSignature> out(static_cast<std::size_t>(spec.classes));
    for (auto& s : out) {
        s.frequency = freq(rng);
        s.orientation = angle(rng);
        s.bandwidth = bw(rng);
    }
    return out;
}

GrayImage synthesize_image(const SyntheticSpec& spec, int cls, int index) {
    spec.validate();
    if (cls < 0 || cls >= spec.classes || index < 0 || index >= spec.per_class) {
        throw Error(Errc::InvalidConfig, "class or image index out of range");
    }
    const auto sig = class_signatures(spec)[static_cast<std::size_t>(cls)];
    const detail::Fft2d fft(spec.size);
    auto spectrum = class_texture_spectrum(spec, cls, sig, fft);

    auto rng = make_rng(spec.seed, static_cast<std::uint64_t>(cls) + 1, static_cast<std::uint64_t>(index) + 1);
    std::uniform_real_distribution<double> shift(-spec.max_shift, spec.max_shift);
    std::normal_distribution<double> gauss;
    const double dx = shift(rng), dy = shift(rng);

    // Fourier shift theorem: circular sub-pixel translation.
    for (int ky = 0; ky < spec.size.height; ++ky) {
        const double wy = bin_frequency(ky, spec.size.height);
        for (int kx = 0; kx < spec.size.width; ++kx) {
            const double wx = bin_frequency(kx, spec.size.width);
            spectrum[static_cast<std::size_t>(ky) * spec.size.width + kx] *= std::polar(1.0, -(wx * dx + wy * dy));
        }
    }
    const auto n = spec.size.area();
    cvec spatial(n);
    fft.inverse(spectrum, spatial);

    GrayImage img(spec.size.width, spec.size.height);
    auto data = img.data();
    for (std::size_t i = 0; i < n; ++i) {
        const double v = 0.5 + 0.15 * (spatial[i].real() + spec.noise * gauss(rng));
        data[i] = std::round(std::clamp(v, 0.0, 1.0) * 255.0) / 255.0;
    }
    return img;
}

DatasetManifest generate_synthetic(const SyntheticSpec& spec, const std::filesystem::path& out_dir) {
    spec.validate();
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw Error(Errc::IoError, "cannot create " + out_dir.string() + ": " + ec.message());

    DatasetManifest manifest;
    manifest.base_dir = out_dir;
    char name[64];
    for (int c = 0; c < spec.classes; ++c) {
        std::snprintf(name, sizeof name, "s%03d", c);
        const std::string subject = name;
        std::filesystem::create_directories(out_dir / subject, ec);
        if (ec) throw Error(Errc::IoError, "cannot create " + (out_dir / subject).string());
        for (int i = 0; i < spec.per_class; ++i) {
            std::snprintf(name, sizeof name, "img%03d.pgm", i);
            const auto rel = subject + "/" + name;
            write_pgm(synthesize_image(spec, c, i), out_dir / rel);
            manifest.entries.push_back({rel, subject, Split::Unassigned});
        }
    }
    manifest = split_dataset(std::move(manifest), spec.train_fraction, spec.seed);
    write_manifest(manifest, out_dir / "manifest.tsv");
    return manifest;
}

}  // namespace scir
