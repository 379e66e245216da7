#include "doctest.h"
#include "oracles.hpp"

#include "scir/error.hpp"
#include "scir/image.hpp"
#include "scir/manifest.hpp"
#include "scir/synthetic.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <string>

namespace fs = std::filesystem;
using namespace scir;

namespace {

fs::path temp_dir(const std::string& name) {
    auto dir = fs::temp_directory_path() / ("scir_test_corpus_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::vector<std::uint8_t> bytes_of(const std::string& s) { return {s.begin(), s.end()}; }

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Errc code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected scir::Error");
    return Errc::InvariantViolation;
}

}  // namespace

TEST_CASE("2x2 PGM decodes with linear 1/255 scaling") {
    auto raw = bytes_of("P5\n2 2\n255\n");
    raw.insert(raw.end(), {0, 255, 128, 64});
    const auto img = decode_pnm(raw);
    REQUIRE(img.width() == 2);
    REQUIRE(img.height() == 2);
    CHECK(img(0, 0) == 0.0);
    CHECK(img(1, 0) == 1.0);
    CHECK(img(0, 1) == doctest::Approx(128.0 / 255.0).epsilon(1e-15));
    CHECK(img(1, 1) == doctest::Approx(64.0 / 255.0).epsilon(1e-15));
}

TEST_CASE("all-zero PGM loads as zeros") {
    const auto dir = temp_dir("zero");
    GrayImage zeros(8, 8, 0.0);
    write_pgm(zeros, dir / "z.pgm");
    const auto img = load_image(dir / "z.pgm");
    for (double v : img.data()) CHECK(v == 0.0);
}

TEST_CASE("malformed inputs are rejected with the right error") {
    CHECK(code_of([] { decode_pnm(bytes_of("P5\n2 ")); }) == Errc::CorruptImage);
    CHECK(code_of([] { decode_pnm(bytes_of("P5\n2 2\n255\n\x01\x02")); }) == Errc::CorruptImage);
    CHECK(code_of([] { decode_pnm(bytes_of("P5\n2 2\n65535\n")); }) == Errc::UnsupportedFormat);
    CHECK(code_of([] { decode_pnm(bytes_of("GIF89a")); }) == Errc::UnsupportedFormat);
    CHECK(code_of([] { load_image("/nonexistent/scir/file.pgm"); }) == Errc::FileNotFound);
}

TEST_CASE("colour pixmaps are rejected or converted to luma") {
    auto raw = bytes_of("P6\n1 1\n255\n");
    raw.insert(raw.end(), {255, 0, 0});
    CHECK(code_of([&] { decode_pnm(raw); }) == Errc::UnsupportedFormat);
    const auto img = decode_pnm(raw, ColorPolicy::Luma);
    CHECK(img(0, 0) == doctest::Approx(0.299));
}

TEST_CASE("ASCII graymaps with comments decode") {
    const auto img = decode_pnm(bytes_of("P2\n# comment\n3 1\n# another\n15\n0 15 5\n"));
    CHECK(img(0, 0) == 0.0);
    CHECK(img(1, 0) == 1.0);
    CHECK(img(2, 0) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("property: 8-bit images survive a PGM round trip exactly") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> dim(1, 40), level(0, 255);
    for (int trial = 0; trial < 25; ++trial) {
        GrayImage img(dim(rng), dim(rng));
        for (auto& v : img.data()) v = level(rng) / 255.0;
        const auto back = decode_pnm(encode_pgm(img));
        REQUIRE(back.size() == img.size());
        for (std::size_t i = 0; i < img.data().size(); ++i) REQUIRE(back.data()[i] == img.data()[i]);
    }
}

TEST_CASE("preprocess: identity, downsampling, and divisibility") {
    SUBCASE("same size is the identity") {
        GrayImage img(64, 48, 0.5);
        const auto out = preprocess(img, {64, 48}, {4, 3}, 5);
        for (double v : out.data()) CHECK(v == 0.5);
    }
    SUBCASE("2x downsample matches a box-filter oracle and keeps the mean") {
        std::mt19937_64 rng(3);
        const auto img = oracle::random_image(128, 96, rng);
        const auto out = preprocess(img, {64, 48}, {4, 3}, 5);
        const auto box = oracle::box_downsample2(img);
        double mean_in = 0, mean_out = 0, max_diff = 0;
        for (double v : img.data()) mean_in += v;
        for (std::size_t i = 0; i < out.data().size(); ++i) {
            mean_out += out.data()[i];
            max_diff = std::max(max_diff, std::abs(out.data()[i] - box.data()[i]));
        }
        mean_in /= static_cast<double>(img.data().size());
        mean_out /= static_cast<double>(out.data().size());
        CHECK(std::abs(mean_in - mean_out) <= 1e-2);
        CHECK(max_diff <= 1e-12);
    }
    SUBCASE("65x48 with a 4x3 grid and J=5 is incompatible") {
        GrayImage img(64, 48, 0.5);
        CHECK(code_of([&] { preprocess(img, {65, 48}, {4, 3}, 5); }) == Errc::IncompatibleTarget);
    }
    SUBCASE("idempotent at the target size") {
        std::mt19937_64 rng(4);
        const auto img = oracle::random_image(100, 70, rng);
        const auto once = preprocess(img, {64, 48}, {4, 3}, 5);
        const auto twice = preprocess(once, {64, 48}, {4, 3}, 5);
        for (std::size_t i = 0; i < once.data().size(); ++i) CHECK(once.data()[i] == twice.data()[i]);
        once.check();
    }
}

TEST_CASE("split_dataset rounds half up per subject") {
    DatasetManifest m;
    for (int i = 0; i < 10; ++i) m.entries.push_back({"a" + std::to_string(i), "A", Split::Unassigned});
    for (int i = 0; i < 3; ++i) m.entries.push_back({"b" + std::to_string(i), "B", Split::Unassigned});
    const auto split = split_dataset(m, 0.5, 1);
    std::map<std::string, std::pair<int, int>> counts;
    for (const auto& e : split.entries) {
        (e.split == Split::Train ? counts[e.subject].first : counts[e.subject].second)++;
    }
    CHECK(counts["A"] == std::pair{5, 5});
    CHECK(counts["B"] == std::pair{2, 1});

    DatasetManifest lone;
    lone.entries.push_back({"c0", "C", Split::Unassigned});
    CHECK(code_of([&] { split_dataset(lone, 0.5, 1); }) == Errc::TooFewImages);
}

TEST_CASE("property: split_dataset never leaves a subject only in test and is seed-deterministic") {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> subjects(1, 8), images(2, 12);
    std::uniform_real_distribution<double> frac(0.05, 1.0);
    for (int trial = 0; trial < 30; ++trial) {
        DatasetManifest m;
        const int ns = subjects(rng);
        for (int s = 0; s < ns; ++s) {
            const int ni = images(rng);
            for (int i = 0; i < ni; ++i) {
                m.entries.push_back({std::to_string(s) + "/" + std::to_string(i), std::to_string(s), Split::Unassigned});
            }
        }
        const double f = frac(rng);
        const auto a = split_dataset(m, f, 99);
        const auto b = split_dataset(m, f, 99);
        std::map<std::string, int> train;
        for (std::size_t i = 0; i < a.entries.size(); ++i) {
            REQUIRE(a.entries[i].split == b.entries[i].split);
            if (a.entries[i].split == Split::Train) train[a.entries[i].subject]++;
        }
        for (const auto& e : a.entries) CHECK(train[e.subject] >= 1);
    }
}

TEST_CASE("manifest file round trip, comments, and validation") {
    const auto dir = temp_dir("manifest");
    {
        std::ofstream out(dir / "m.tsv");
        out << "# header comment\n"
            << "a/1.pgm\tA\ttrain\n"
            << "\n"
            << "a/2.pgm\tA\ttest\n"
            << "v/1.pgm\tV\tvalidation\n";
    }
    const auto m = read_manifest(dir / "m.tsv");
    REQUIRE(m.entries.size() == 3);
    CHECK(m.entries[1].split == Split::Test);
    CHECK(m.resolve(m.entries[0]) == dir / "a/1.pgm");
    write_manifest(m, dir / "copy.tsv");
    const auto again = read_manifest(dir / "copy.tsv");
    REQUIRE(again.entries.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(again.entries[i].path == m.entries[i].path);
        CHECK(again.entries[i].subject == m.entries[i].subject);
        CHECK(again.entries[i].split == m.entries[i].split);
    }

    std::ofstream(dir / "bad.tsv") << "x.pgm\tB\ttest\n";
    CHECK(code_of([&] { read_manifest(dir / "bad.tsv"); }) == Errc::InvalidManifest);
    std::ofstream(dir / "dup.tsv") << "x.pgm\tB\ttrain\nx.pgm\tB\ttrain\n";
    CHECK(code_of([&] { read_manifest(dir / "dup.tsv"); }) == Errc::InvalidManifest);
}

TEST_CASE("generate_synthetic counts and determinism") {
    SyntheticSpec spec;
    spec.classes = 2;
    spec.per_class = 4;
    spec.seed = 7;
    const auto a = temp_dir("synth_a"), b = temp_dir("synth_b");
    const auto ma = generate_synthetic(spec, a);
    generate_synthetic(spec, b);
    CHECK(ma.entries.size() == 8);
    CHECK(ma.subjects().size() == 2);
    for (const auto& e : ma.entries) {
        CHECK(slurp(a / e.path) == slurp(b / e.path));
        const auto img = load_image(a / e.path);
        CHECK(img.size() == Size{64, 48});
        img.check();
    }
    CHECK(slurp(a / "manifest.tsv") == slurp(b / "manifest.tsv"));

    spec.seed = 8;
    const auto c = temp_dir("synth_c");
    generate_synthetic(spec, c);
    CHECK(slurp(a / ma.entries[0].path) != slurp(c / ma.entries[0].path));
}

TEST_CASE("synthetic images are exact 8-bit levels and classes differ") {
    SyntheticSpec spec;
    const auto x = synthesize_image(spec, 0, 0);
    const auto y = synthesize_image(spec, 0, 1);
    const auto z = synthesize_image(spec, 1, 0);
    const auto back = decode_pnm(encode_pgm(x));
    for (std::size_t i = 0; i < x.data().size(); ++i) REQUIRE(back.data()[i] == x.data()[i]);
    double within = 0, between = 0;
    for (std::size_t i = 0; i < x.data().size(); ++i) {
        within += std::pow(x.data()[i] - y.data()[i], 2);
        between += std::pow(x.data()[i] - z.data()[i], 2);
    }
    CHECK(within < between);
    CHECK_THROWS_AS(synthesize_image(spec, spec.classes, 0), Error);
    SyntheticSpec bad;
    bad.classes = 1;
    CHECK_THROWS_AS(bad.validate(), Error);
}
