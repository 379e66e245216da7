#include "doctest.h"
#include "oracles.hpp"

#include "scir/error.hpp"
#include "scir/texture.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

using namespace scir;

namespace {

QuantizedImage from_rows(const std::vector<std::vector<int>>& rows, int levels) {
    std::vector<int> labels;
    for (const auto& r : rows) labels.insert(labels.end(), r.begin(), r.end());
    return QuantizedImage(static_cast<int>(rows[0].size()), static_cast<int>(rows.size()), levels, labels);
}

std::vector<std::vector<int>> random_rows(int w, int h, int levels, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> d(0, levels - 1);
    std::vector<std::vector<int>> rows(h, std::vector<int>(w));
    for (auto& r : rows)
        for (auto& v : r) v = d(rng);
    return rows;
}

Errc code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    return Errc::InvariantViolation;
}

}  // namespace

TEST_CASE("quantize examples") {
    GrayImage img(3, 1);
    img(0, 0) = 0.0;
    img(1, 0) = 1.0;
    img(2, 0) = 0.5;
    const auto q = quantize(img, 8);
    CHECK(q(0, 0) == 0);
    CHECK(q(1, 0) == 7);
    CHECK(q(2, 0) == 4);
    CHECK(quantize(img, 2)(2, 0) == 1);
    CHECK(code_of([&] { quantize(img, 1); }) == Errc::InvalidLevels);

    GrayImage ramp(256, 1);
    for (int x = 0; x < 256; ++x) ramp(x, 0) = x / 255.0;
    const auto qr = quantize(ramp, 8);
    std::vector<int> hist(8, 0);
    for (int v : qr.labels()) ++hist[v];
    for (int c : hist) CHECK(c == 32);
}

TEST_CASE("cooccurrence examples") {
    const auto q = from_rows({{0, 0, 1}, {0, 1, 1}, {2, 2, 2}}, 3);
    const auto p = cooccurrence(q, {1, 0});
    CHECK(p.total == 6);
    CHECK(p(0, 0) == 1);
    CHECK(p(0, 1) == 2);
    CHECK(p(1, 1) == 1);
    CHECK(p(2, 2) == 2);
    CHECK(std::accumulate(p.counts.begin(), p.counts.end(), std::int64_t{0}) == 6);
    CHECK(p.counts == oracle::glcm_counts({{0, 0, 1}, {0, 1, 1}, {2, 2, 2}}, 3, 1, 0));

    const auto constant = from_rows({{3, 3, 3, 3}, {3, 3, 3, 3}}, 4);
    for (Offset o : {Offset{1, 0}, Offset{0, 1}, Offset{1, 1}, Offset{-2, 1}}) {
        const auto c = cooccurrence(constant, o);
        CHECK(c(3, 3) == c.total);
        CHECK(c.total > 0);
    }

    const auto tiny = from_rows({{0}}, 2);
    const auto empty = cooccurrence(tiny, {1, 0});
    CHECK(empty.total == 0);
    CHECK(code_of([&] { marginals(empty); }) == Errc::EmptyCooccurrence);
    CHECK(code_of([&] { haralick14(empty); }) == Errc::EmptyCooccurrence);
    CHECK(code_of([&] { cooccurrence(constant, {4, 0}); }) == Errc::OffsetTooLarge);
    CHECK(code_of([&] { cooccurrence(constant, {0, -2}); }) == Errc::OffsetTooLarge);
}

TEST_CASE("property: count conservation and agreement with pair enumeration") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        const int w = 2 + static_cast<int>(rng() % 12), h = 2 + static_cast<int>(rng() % 12);
        const int levels = 2 + static_cast<int>(rng() % 7);
        const int dx = static_cast<int>(rng() % static_cast<unsigned>(w));
        const int dy = static_cast<int>(rng() % static_cast<unsigned>(h));
        const auto rows = random_rows(w, h, levels, rng);
        const auto p = cooccurrence(from_rows(rows, levels), {dx, dy});
        CHECK(p.total == std::int64_t(w - dx) * (h - dy));
        CHECK(std::accumulate(p.counts.begin(), p.counts.end(), std::int64_t{0}) == p.total);
        CHECK(p.counts == oracle::glcm_counts(rows, levels, dx, dy));
    }
}

TEST_CASE("marginals examples") {
    const auto constant = marginals(cooccurrence(from_rows({{2, 2, 2}, {2, 2, 2}}, 4), {1, 0}));
    for (int i = 0; i < 4; ++i) {
        CHECK(constant.px[i] == (i == 2 ? 1.0 : 0.0));
        CHECK(constant.py[i] == (i == 2 ? 1.0 : 0.0));
    }
    CHECK(constant.hxy == 0.0);

    CooccurrenceMatrix uniform{2, {1, 0}, {1, 1, 1, 1}, 4};
    const auto m = marginals(uniform);
    CHECK(m.hxy == doctest::Approx(std::log(4.0)).epsilon(1e-14));
    REQUIRE(m.p_diff.size() == 2);
    CHECK(m.p_diff[0] == 0.5);
    CHECK(m.p_diff[1] == 0.5);
    CHECK(m.p_sum.size() == 3);

    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 30; ++trial) {
        const auto rows = random_rows(9, 7, 6, rng);
        const auto mm = marginals(cooccurrence(from_rows(rows, 6), {1, 1}));
        CHECK(std::abs(mm.px.sum() - 1) <= 1e-9);
        CHECK(std::abs(mm.py.sum() - 1) <= 1e-9);
        CHECK(std::abs(mm.p_sum.sum() - 1) <= 1e-9);
        CHECK(std::abs(mm.p_diff.sum() - 1) <= 1e-9);
        CHECK(mm.q.allFinite());
    }
}

TEST_CASE("haralick examples") {
    const auto constant = haralick14(cooccurrence(from_rows({{1, 1, 1, 1}, {1, 1, 1, 1}}, 8), {1, 0}));
    CHECK(constant[0] == 1.0);
    CHECK(constant[1] == 0.0);
    CHECK(constant[7] == 0.0);
    CHECK(constant[8] == 0.0);
    CHECK(constant[10] == 0.0);
    for (double v : constant) CHECK(std::isfinite(v));

    const auto checker = cooccurrence(from_rows({{0, 1, 0, 1}, {1, 0, 1, 0}, {0, 1, 0, 1}, {1, 0, 1, 0}}, 2), {1, 0});
    CHECK(checker(0, 0) == 0);
    CHECK(checker(1, 1) == 0);
    const auto f = haralick14(checker);
    CHECK(f[0] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(f[1] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("haralick agrees with the formula-literal oracle on random blocks") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 20; ++trial) {
        const auto rows = random_rows(8, 8, 8, rng);
        const auto counts = oracle::glcm_counts(rows, 8, 1, 0);
        const auto expected = oracle::haralick_literal(counts, 8);
        const auto got = haralick14(cooccurrence(from_rows(rows, 8), {1, 0}));
        for (int k = 0; k < 13; ++k) {
            INFO("trial " << trial << " f" << k + 1);
            CHECK(oracle::close(got[k], expected[k], 1e-10));
        }
        CHECK(oracle::close(got[13], expected[13], 1e-8, 1e-8));
    }
}

TEST_CASE("Q spectrum of a diagonal distribution") {
    // Perfectly correlated labels make Q the identity on the support.
    CooccurrenceMatrix diag{3, {1, 0}, {2, 0, 0, 0, 1, 0, 0, 0, 1}, 4};
    const auto spec = q_spectrum(marginals(diag).q);
    REQUIRE(spec.values.size() == 3);
    CHECK(spec.values[0] == doctest::Approx(1.0));
    CHECK(spec.values[1] == doctest::Approx(1.0));
    CHECK(spec.max_imag <= 1e-12);
    CHECK(haralick14(diag)[13] == doctest::Approx(1.0));
}

TEST_CASE("property: gray-level relabeling") {
    std::mt19937_64 rng(17);
    std::vector<int> perm(6);
    for (int trial = 0; trial < 20; ++trial) {
        auto rows = random_rows(10, 8, 6, rng);
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        auto relabeled = rows;
        for (auto& r : relabeled)
            for (auto& v : r) v = perm[v];
        const auto a = cooccurrence(from_rows(rows, 6), {1, 0});
        const auto b = cooccurrence(from_rows(relabeled, 6), {1, 0});
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j) REQUIRE(a(i, j) == b(perm[i], perm[j]));
        const auto fa = haralick14(a), fb = haralick14(b);
        CHECK(oracle::close(fa[0], fb[0], 1e-12));
        CHECK(oracle::close(fa[8], fb[8], 1e-12));

        // Reversal keeps |i - j|, so the difference statistics survive too.
        auto reversed = rows;
        for (auto& r : reversed)
            for (auto& v : r) v = 5 - v;
        const auto fr = haralick14(cooccurrence(from_rows(reversed, 6), {1, 0}));
        for (int k : {0, 1, 4, 8, 9, 10}) CHECK(oracle::close(fa[k], fr[k], 1e-10));
    }
}

TEST_CASE("block features") {
    std::mt19937_64 rng(9);
    const auto img = oracle::random_image(64, 48, rng);
    const TextureConfig cfg;
    const auto f = block_texture_features(img, cfg);
    CHECK(f.size() == 168);
    CHECK(f.size() == 14u * 64u * 48u / (16u * 16u));
    for (double v : f) CHECK(std::isfinite(v));

    const auto blocks = block_haralick(img, cfg);
    REQUIRE(blocks.size() == 12);
    // Block 5 is column 1, row 1.
    GrayImage sub(16, 16);
    for (int y = 0; y < 16; ++y)
        for (int x = 0; x < 16; ++x) sub(x, y) = img(16 + x, 16 + y);
    const auto direct = haralick14(cooccurrence(quantize(sub, 8), {1, 0}));
    for (int k = 0; k < 14; ++k) CHECK(blocks[5][k] == direct[k]);

    CHECK(block_texture_features(img, {{1, 1}, 8, {1, 0}}).size() == 14);
    for (int s : {1, 2, 4, 8, 16}) {
        const auto g = block_texture_features(GrayImage(64, 64, 0.3), {{s, s}, 8, {1, 0}});
        CHECK(g.size() == 14u * 64u * 64u / ((64u / s) * (64u / s)));
        for (std::size_t b = 0; b < g.size(); b += 14) {
            CHECK(g[b] == 1.0);
            CHECK(g[b + 1] == 0.0);
        }
    }
    CHECK(code_of([&] { block_texture_features(img, {{5, 3}, 8, {1, 0}}); }) == Errc::IncompatibleGrid);

    // Two-level blocks and single-level blocks both stay finite.
    GrayImage split(64, 48, 0.0);
    for (int y = 0; y < 48; ++y)
        for (int x = 32; x < 64; ++x) split(x, y) = (x + y) % 2 ? 1.0 : 0.0;
    for (double v : block_texture_features(split, cfg)) CHECK(std::isfinite(v));

    std::ostringstream csv;
    write_haralick_csv(csv, blocks);
    const auto text = csv.str();
    CHECK(text.rfind("block,f1,f2,f3,f4,f5,f6,f7,f8,f9,f10,f11,f12,f13,f14\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 13);
}
