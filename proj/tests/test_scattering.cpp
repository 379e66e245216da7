#include "doctest.h"
#include "oracles.hpp"

#include "scir/error.hpp"
#include "scir/scattering.hpp"
#include "scir/synthetic.hpp"

#include <cmath>
#include <complex>
#include <random>

using namespace scir;

namespace {

constexpr double kPi = 3.14159265358979323846;

GrayImage shift_circular(const GrayImage& img, int dx, int dy) {
    GrayImage out(img.width(), img.height());
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x)
            out((x + dx) % img.width(), (y + dy) % img.height()) = img(x, y);
    return out;
}

double relative_l2(const std::vector<double>& a, const std::vector<double>& b) {
    double num = 0, den = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += (a[i] - b[i]) * (a[i] - b[i]);
        den += a[i] * a[i];
    }
    return std::sqrt(num / den);
}

}  // namespace

TEST_CASE("path count closed form") {
    CHECK(scattering_path_count({5, 6, 2}) == 391);
    CHECK(scattering_path_count({5, 6, 0}) == 1);
    // Brute-force enumeration gives 1 + 12 + 48.
    REQUIRE(oracle::brute_force_path_count(3, 4, 2) == 61);
    CHECK(scattering_path_count({3, 4, 2}) == 61);
}

TEST_CASE("property: path count identity against brute-force enumeration") {
    for (int J = 1; J <= 6; ++J)
        for (int p = 1; p <= 8; ++p)
            for (int m = 0; m <= 2; ++m) {
                const ScatteringConfig cfg{J, p, m};
                const auto brute = oracle::brute_force_path_count(J, p, m);
                CHECK(scattering_path_count(cfg) == brute);
                const auto paths = enumerate_paths(cfg);
                CHECK(paths.size() == brute);
            }
}

TEST_CASE("canonical path order is layer-major then lexicographic with decreasing scales") {
    const auto paths = enumerate_paths({3, 2, 2});
    REQUIRE(paths.size() == 1 + 6 + 12);
    CHECK(paths[0].empty());
    for (std::size_t i = 1; i < paths.size(); ++i) {
        CHECK(paths[i - 1].size() <= paths[i].size());
        if (paths[i - 1].size() == paths[i].size()) CHECK(paths[i - 1] < paths[i]);
        for (std::size_t s = 1; s < paths[i].size(); ++s) CHECK(paths[i][s].scale < paths[i][s - 1].scale);
    }
    CHECK(paths[7] == ScatteringPath{{1, 0}, {0, 0}});
}

TEST_CASE("filter bank shape and invariants") {
    const auto bank = FilterBank::build({5, 6, 2}, {64, 48});
    CHECK(bank.wavelet_count() == 30);
    CHECK(bank.lowpass().size() == 64u * 48u);
    for (int j = 0; j < 5; ++j)
        for (int l = 0; l < 6; ++l) {
            const auto psi = bank.wavelet(j, l);
            double peak = 0;
            for (double v : psi) peak = std::max(peak, std::abs(v));
            CHECK(std::abs(psi[0]) <= 1e-6 * peak);
            CHECK(peak > 0.25);
        }
    CHECK(bank.lowpass()[0] == doctest::Approx(1.0).epsilon(1e-15));
    for (double v : bank.lowpass()) CHECK(v >= 0.0);
    CHECK_THROWS_AS(FilterBank::build({5, 6, 2}, {65, 48}), Error);
    CHECK_THROWS_AS(FilterBank::build({0, 6, 2}, {64, 48}), Error);
    CHECK_THROWS_AS(FilterBank::build({5, 6, 3}, {64, 48}), Error);
}

TEST_CASE("wavelets rotated by pi are point reflections in frequency") {
    // Orientations span [0, pi), so the reflection partner of theta is built
    // directly at theta + pi.
    const Size size{64, 48};
    for (double theta : {0.0, kPi / 6, kPi / 3, 2.5}) {
        const auto a = morlet_spectrum(size, 1.6, 3 * kPi / 8, theta, 0.5);
        const auto b = morlet_spectrum(size, 1.6, 3 * kPi / 8, theta + kPi, 0.5);
        double worst = 0;
        for (int ky = 0; ky < size.height; ++ky)
            for (int kx = 0; kx < size.width; ++kx) {
                const int rx = (size.width - kx) % size.width, ry = (size.height - ky) % size.height;
                worst = std::max(worst, std::abs(a[ky * size.width + kx] - b[ry * size.width + rx]));
            }
        CHECK(worst <= 1e-10);
    }
}

TEST_CASE("orientation l + p/2 is a quarter turn on square grids") {
    const Size size{32, 32};
    const auto bank = FilterBank::build({3, 6, 1}, size);
    for (int j = 0; j < 3; ++j)
        for (int l = 0; l < 3; ++l) {
            const auto a = bank.wavelet(j, l);
            const auto b = bank.wavelet(j, l + 3);
            double worst = 0;
            for (int ky = 0; ky < size.height; ++ky)
                for (int kx = 0; kx < size.width; ++kx) {
                    // (wx, wy) rotated by +90 degrees is (-wy, wx).
                    const int rx = (size.width - ky) % size.width, ry = kx;
                    worst = std::max(worst, std::abs(a[ky * size.width + kx] - b[ry * size.width + rx]));
                }
            CHECK(worst <= 1e-10);
        }
}

TEST_CASE("constant input: layer 0 is the constant, deeper layers vanish") {
    const auto bank = FilterBank::build({5, 6, 2}, {64, 48});
    const auto maps = scatter(GrayImage(64, 48, 0.5), bank);
    REQUIRE(maps.maps.size() == 391);
    for (const auto& m : maps.maps) {
        const double expected = m.path.empty() ? 0.5 : 0.0;
        for (double v : m.values) REQUIRE(std::abs(v - expected) <= 1e-8);
    }
}

TEST_CASE("scatter matches direct spatial convolution") {
    // Filters are taken to the spatial domain with a naive DFT and applied by
    // direct circular summation.
    const int w = 16, h = 16;
    const auto bank = FilterBank::build({2, 4, 2}, {w, h});
    std::mt19937_64 rng(21);
    const auto img = oracle::random_image(w, h, rng);
    const auto maps = scatter(img, bank);

    auto spatial = [&](std::span<const double> spectrum) {
        std::vector<std::complex<double>> s(spectrum.begin(), spectrum.end());
        auto out = oracle::dft2(s, w, h, +1);
        for (auto& v : out) v /= double(w * h);
        return out;
    };
    const auto phi = spatial(bank.lowpass());
    std::vector<std::complex<double>> f(img.data().begin(), img.data().end());

    auto smooth_modulus = [&](const std::vector<std::complex<double>>& u) {
        std::vector<std::complex<double>> m(u.size());
        for (std::size_t i = 0; i < u.size(); ++i) m[i] = std::abs(u[i]);
        return m;
    };
    // Layer 1, path (1, 2) and layer 2, path ((1, 2), (0, 3)).
    const auto u1 = smooth_modulus(oracle::circular_convolve(f, spatial(bank.wavelet(1, 2)), w, h));
    const auto s1 = oracle::circular_convolve(u1, phi, w, h);
    const auto u2 = smooth_modulus(oracle::circular_convolve(u1, spatial(bank.wavelet(0, 3)), w, h));
    const auto s2 = oracle::circular_convolve(u2, phi, w, h);

    const auto paths = enumerate_paths(bank.config());
    auto find = [&](const ScatteringPath& p) {
        for (std::size_t i = 0; i < paths.size(); ++i)
            if (paths[i] == p) return i;
        FAIL("path missing");
        return std::size_t{0};
    };
    const auto& m1 = maps.maps[find({{1, 2}})];
    const auto& m2 = maps.maps[find({{1, 2}, {0, 3}})];
    for (std::size_t i = 0; i < s1.size(); ++i) {
        CHECK(std::abs(m1.values[i] - s1[i].real()) <= 1e-10);
        CHECK(std::abs(m2.values[i] - s2[i].real()) <= 1e-10);
    }
}

TEST_CASE("pooling moments") {
    ScatteringMaps single{{2, 2}, {{{}, {0.3, 0.3, 0.3, 0.3}}}};
    auto f = pool_scattering(single);
    REQUIRE(f.size() == 2);
    CHECK(f[0] == doctest::Approx(0.3));
    CHECK(f[1] == doctest::Approx(0.0));

    ScatteringMaps bern{{2, 2}, {{{}, {0.0, 1.0, 0.0, 1.0}}}};
    f = pool_scattering(bern);
    CHECK(f[0] == 0.5);
    CHECK(f[1] == 0.25);

    CHECK_THROWS_AS(pool_scattering(ScatteringMaps{}), Error);

    const auto bank = FilterBank::build({5, 6, 2}, {64, 48});
    std::mt19937_64 rng(1);
    CHECK(pool_scattering(scatter(oracle::random_image(64, 48, rng), bank)).size() == 782);
}

TEST_CASE("fused features equal pooled maps") {
    const auto bank = FilterBank::build({5, 6, 2}, {64, 48});
    const auto img = synthesize_image(SyntheticSpec{}, 3, 2);
    const auto pooled = pool_scattering(scatter(img, bank));
    const auto fused = scattering_features(img, bank);
    REQUIRE(pooled.size() == fused.size());
    for (std::size_t i = 0; i < fused.size(); ++i) {
        CHECK(oracle::close(pooled[i], fused[i], 1e-9, 1e-15));
        if (i % 2 == 1) CHECK(fused[i] >= 0.0);
    }
    CHECK_THROWS_AS(scatter(GrayImage(32, 32, 0.1), bank), Error);
    CHECK(scattering_features(img, bank) == fused);
}

TEST_CASE("property: nonnegativity, layer-0 linearity, determinism") {
    const auto bank = FilterBank::build({3, 4, 2}, {32, 24});
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 5; ++trial) {
        const auto img = oracle::random_image(32, 24, rng);
        const auto maps = scatter(img, bank);
        for (const auto& m : maps.maps) {
            if (m.path.empty()) continue;
            for (double v : m.values) REQUIRE(v >= -1e-9);
        }
        GrayImage scaled = img;
        for (auto& v : scaled.data()) v *= 0.37;
        const auto scaled_maps = scatter(scaled, bank);
        for (std::size_t i = 0; i < maps.maps[0].values.size(); ++i) {
            CHECK(std::abs(scaled_maps.maps[0].values[i] - 0.37 * maps.maps[0].values[i]) <= 1e-12);
        }
        const auto again = scatter(img, bank);
        for (std::size_t k = 0; k < maps.maps.size(); ++k) REQUIRE(again.maps[k].values == maps.maps[k].values);
    }
}

TEST_CASE("near translation invariance under small circular shifts") {
    const auto bank = FilterBank::build({5, 6, 2}, {64, 48});
    const SyntheticSpec spec;
    for (int cls = 0; cls < 3; ++cls) {
        const auto img = synthesize_image(spec, cls, 0);
        const auto a = scattering_features(img, bank);
        for (int s : {1, 2, 4}) {
            CHECK(relative_l2(a, scattering_features(shift_circular(img, s, s), bank)) <= 0.05);
        }
    }
}

TEST_CASE("layer-2 energy does not exceed layer-1 energy on textures") {
    const auto bank = FilterBank::build({5, 6, 2}, {64, 48});
    const SyntheticSpec spec;
    for (int cls = 0; cls < 4; ++cls) {
        const auto maps = scatter(synthesize_image(spec, cls, 1), bank);
        double e1 = 0, e2 = 0;
        std::size_t n1 = 0, n2 = 0;
        for (const auto& m : maps.maps) {
            double e = 0;
            for (double v : m.values) e += v * v;
            e /= static_cast<double>(m.values.size());
            if (m.path.size() == 1) e1 += e, ++n1;
            if (m.path.size() == 2) e2 += e, ++n2;
        }
        CHECK(e2 / n2 <= e1 / n1);
    }
}
