#pragma once

#include "scir/features.hpp"
#include "scir/image.hpp"
#include "scir/manifest.hpp"
#include "scir/matcher.hpp"
#include "scir/pca.hpp"
#include "scir/scattering.hpp"
#include "scir/texture.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace scir {

/// Everything that determines the produced features and templates. The
/// defaults are the reference setup: 64x48 images, J=5, p=6, m=2, a 4x3
/// block grid with 8 gray levels at offset (1,0), and 80 PCA components.
struct PipelineConfig {
    Size size{64, 48};
    ScatteringConfig scattering;
    bool texture_enabled = true;
    TextureConfig texture;
    std::size_t k = 80;    ///< explicit component count; 0 selects by epsilon
    double epsilon = 0.0;  ///< retained-variance target when k == 0
    bool standardize = false;
    std::uint64_t seed = 7;
    ColorPolicy color = ColorPolicy::Reject;

    void validate() const;

    /// `key = value` lines, one per field, in a fixed order.
    std::string to_text() const;
    /// Parses `key = value` lines over the defaults; `#` starts a comment.
    static PipelineConfig from_text(std::string_view text);
    static PipelineConfig from_file(const std::filesystem::path& path);

    std::size_t scatter_length() const;
    std::size_t texture_length() const;
    std::size_t feature_length() const { return scatter_length() + texture_length(); }
};

/// Resizes to the working size and computes scattering then textural
/// features. Holds the filter bank; safe to share across threads.
class FeatureExtractor {
public:
    explicit FeatureExtractor(const PipelineConfig& config);

    FeatureVector extract(const GrayImage& img) const;
    const PipelineConfig& config() const { return config_; }

private:
    PipelineConfig config_;
    FilterBank bank_;
};

/// Runs `fn(i)` for i in [0, count) on `threads` workers. The first
/// exception (lowest index) is rethrown after all workers finish.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn);

// ---------------------------------------------------------------------------
// Commands behind the `scir` tool. Each writes artifacts and returns a summary.

struct ExtractSummary {
    std::size_t images = 0;
    std::size_t scatter_length = 0;
    std::size_t texture_length = 0;
};

/// One feature file per manifest entry under `out_dir`, plus an
/// `out_dir/manifest.tsv` that lists the feature files with their subjects
/// and split tags.
ExtractSummary run_extract(const DatasetManifest& manifest, const PipelineConfig& config,
                           const std::filesystem::path& out_dir, int threads = 1);

struct TrainOptions {
    std::optional<double> epsilon;
    std::optional<std::size_t> k;
    std::optional<bool> standardize;
};

struct TrainSummary {
    std::size_t samples = 0;
    std::size_t subjects = 0;
    std::size_t dimension = 0;
    std::size_t k = 0;
    double retained = 0.0;
    std::vector<std::string> warnings;
};

TrainSummary run_train(const std::filesystem::path& features_dir, const TrainOptions& options,
                       const std::filesystem::path& model_path, const std::filesystem::path& gallery_path);

struct EvaluateOptions {
    std::vector<std::size_t> k_grid;
    Split split = Split::Test;
    int threads = 1;
};

/// Extracts features for the selected split with the configuration embedded
/// in the model file, projects, and identifies against the gallery.
EvalReport run_evaluate(const std::filesystem::path& model_path, const std::filesystem::path& gallery_path,
                        const DatasetManifest& manifest, const EvaluateOptions& options);

MatchResult run_identify(const std::filesystem::path& model_path, const std::filesystem::path& gallery_path,
                         const std::filesystem::path& image_path);

struct BenchReport {
    std::size_t images = 0;
    int repetitions = 0;
    std::vector<double> timings_ms;  ///< per extraction + match, in run order
    double median_ms = 0.0;
    double p95_ms = 0.0;
    std::string machine;
};

/// Times feature extraction plus nearest-template matching for every image,
/// `repetitions` times. The gallery is built from the same images.
BenchReport run_bench(const std::vector<std::filesystem::path>& images, const PipelineConfig& config, int repetitions);

nlohmann::json to_json(const BenchReport& report);

/// Sorted `.pgm` files directly inside `dir`.
std::vector<std::filesystem::path> list_images(const std::filesystem::path& dir);

std::vector<std::size_t> parse_k_grid(std::string_view text);

}  // namespace scir
