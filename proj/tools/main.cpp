// scir: scattering + Haralick iris identification pipeline.

#include "CLI11.hpp"

#include "scir/error.hpp"
#include "scir/pipeline.hpp"
#include "scir/serialize.hpp"
#include "scir/synthetic.hpp"

#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;

namespace {

constexpr int kExitInput = 1;
constexpr int kExitInternal = 2;

// Flags shared by every command that builds features; unset flags keep the
// value from --config (or the defaults).
struct ConfigFlags {
    std::string config_file;
    std::optional<std::string> size;
    std::optional<int> scales, orientations, layers, levels;
    std::optional<std::string> grid, offset;
    bool no_texture = false;
    bool luma = false;

    void attach(CLI::App* cmd) {
        cmd->add_option("--config", config_file, "key = value configuration file")->check(CLI::ExistingFile);
        cmd->add_option("--size", size, "working size WxH (default 64x48)");
        cmd->add_option("--scales", scales, "wavelet scales J");
        cmd->add_option("--orientations", orientations, "orientations p");
        cmd->add_option("--layers", layers, "scattering layers m (0-2)");
        cmd->add_option("--grid", grid, "texture block grid COLSxROWS");
        cmd->add_option("--levels", levels, "gray levels for co-occurrence");
        cmd->add_option("--offset", offset, "co-occurrence offset DX,DY");
        cmd->add_flag("--no-texture", no_texture, "scattering features only");
        cmd->add_flag("--luma", luma, "accept colour PPM input by luma conversion");
    }

    scir::PipelineConfig resolve() const {
        auto c = config_file.empty() ? scir::PipelineConfig{} : scir::PipelineConfig::from_file(config_file);
        std::string overrides;
        if (size) overrides += "size = " + *size + "\n";
        if (scales) overrides += "scattering.scales = " + std::to_string(*scales) + "\n";
        if (orientations) overrides += "scattering.orientations = " + std::to_string(*orientations) + "\n";
        if (layers) overrides += "scattering.layers = " + std::to_string(*layers) + "\n";
        if (grid) overrides += "texture.grid = " + *grid + "\n";
        if (levels) overrides += "texture.levels = " + std::to_string(*levels) + "\n";
        if (offset) overrides += "texture.offset = " + *offset + "\n";
        if (no_texture) overrides += "texture.enabled = false\n";
        if (luma) overrides += "color = luma\n";
        if (!overrides.empty()) c = scir::PipelineConfig::from_text(c.to_text() + overrides);
        c.validate();
        return c;
    }
};

fs::path sibling_csv(const fs::path& json_path) {
    auto csv = json_path;
    csv.replace_extension(".csv");
    return csv;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Iris identification from wavelet scattering and Haralick texture features"};
    app.require_subcommand(1);

    // synth
    auto* synth = app.add_subcommand("synth", "generate a synthetic identity corpus");
    scir::SyntheticSpec spec;
    std::string synth_out, synth_size = "64x48";
    synth->add_option("--out", synth_out, "output directory")->required();
    synth->add_option("--classes", spec.classes, "number of identities")->capture_default_str();
    synth->add_option("--per-class", spec.per_class, "images per identity")->capture_default_str();
    synth->add_option("--size", synth_size, "image size WxH")->capture_default_str();
    synth->add_option("--noise", spec.noise, "fresh-noise level")->capture_default_str();
    synth->add_option("--max-shift", spec.max_shift, "sub-pixel jitter bound")->capture_default_str();
    synth->add_option("--seed", spec.seed, "RNG seed")->capture_default_str();
    synth->add_option("--train-fraction", spec.train_fraction, "per-subject train share")->capture_default_str();

    // split
    auto* split_cmd = app.add_subcommand("split", "assign per-subject train/test tags to a manifest");
    std::string split_in, split_out;
    double split_fraction = 0.5;
    std::uint64_t split_seed = 7;
    split_cmd->add_option("--manifest", split_in, "manifest with path and subject columns")->required()->check(
        CLI::ExistingFile);
    split_cmd->add_option("--out", split_out, "tagged manifest to write")->required();
    split_cmd->add_option("--train-fraction", split_fraction, "per-subject train share")->capture_default_str();
    split_cmd->add_option("--seed", split_seed, "RNG seed")->capture_default_str();

    // extract
    auto* extract = app.add_subcommand("extract", "compute feature vectors for a manifest");
    std::string manifest_path, features_out;
    int threads = 1;
    ConfigFlags extract_flags;
    extract->add_option("--manifest", manifest_path, "image manifest")->required()->check(CLI::ExistingFile);
    extract->add_option("--out", features_out, "feature directory")->required();
    extract->add_option("--threads", threads, "worker threads")->capture_default_str();
    extract_flags.attach(extract);

    // train
    auto* train = app.add_subcommand("train", "fit PCA on the train split and enrol templates");
    std::string train_features, model_out, gallery_out;
    scir::TrainOptions train_opts;
    bool standardize = false;
    train->add_option("--features", train_features, "feature directory from extract")->required();
    auto* eps_opt = train->add_option("--epsilon", train_opts.epsilon, "retained-variance target");
    auto* k_opt = train->add_option("--k", train_opts.k, "explicit component count");
    eps_opt->excludes(k_opt);
    train->add_flag("--standardize", standardize, "z-score features before PCA");
    train->add_option("--out-model", model_out, "PCA model file")->required();
    train->add_option("--out-gallery", gallery_out, "gallery file")->required();

    // evaluate
    auto* evaluate = app.add_subcommand("evaluate", "rank-1 accuracy and accuracy-vs-K curve");
    std::string eval_model, eval_gallery, eval_manifest, eval_out, k_grid = "1,5,10,20,40,80", split = "test";
    bool timing = false;
    evaluate->add_option("--model", eval_model)->required()->check(CLI::ExistingFile);
    evaluate->add_option("--gallery", eval_gallery)->required()->check(CLI::ExistingFile);
    evaluate->add_option("--manifest", eval_manifest)->required()->check(CLI::ExistingFile);
    evaluate->add_option("--k-grid", k_grid, "comma-separated K values")->capture_default_str();
    evaluate->add_option("--split", split, "probe split")->capture_default_str();
    evaluate->add_option("--out", eval_out, "JSON report; the curve goes to the same stem with .csv")->required();
    evaluate->add_option("--threads", threads, "worker threads")->capture_default_str();
    evaluate->add_flag("--timing", timing, "include match latency in the JSON report");

    // identify
    auto* ident = app.add_subcommand("identify", "identify one image");
    std::string id_model, id_gallery, id_image;
    ident->add_option("--model", id_model)->required()->check(CLI::ExistingFile);
    ident->add_option("--gallery", id_gallery)->required()->check(CLI::ExistingFile);
    ident->add_option("--image", id_image)->required();

    // bench
    auto* bench = app.add_subcommand("bench", "time feature extraction plus matching");
    std::string bench_dir, bench_out;
    int reps = 5;
    ConfigFlags bench_flags;
    bench->add_option("--images", bench_dir, "directory of .pgm images")->required();
    bench->add_option("--reps", reps, "repetitions")->capture_default_str();
    bench->add_option("--out", bench_out, "optional JSON report");
    bench_flags.attach(bench);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitInput;
    }

    try {
        if (*synth) {
            const auto [w, h] = [&] {
                auto c = scir::PipelineConfig::from_text("size = " + synth_size);
                return std::pair{c.size.width, c.size.height};
            }();
            spec.size = {w, h};
            const auto manifest = scir::generate_synthetic(spec, synth_out);
            std::cout << "wrote " << manifest.entries.size() << " images of " << spec.classes << " subjects to "
                      << synth_out << " (manifest " << (fs::path(synth_out) / "manifest.tsv").string() << ")\n";
        } else if (*split_cmd) {
            auto manifest = scir::split_dataset(scir::read_manifest(split_in), split_fraction, split_seed);
            // Keep relative paths valid from the new manifest's directory.
            const auto out_dir = fs::absolute(split_out).parent_path();
            for (auto& e : manifest.entries)
                e.path = fs::absolute(manifest.resolve(e)).lexically_relative(out_dir).generic_string();
            manifest.base_dir = out_dir;
            fs::create_directories(out_dir);
            scir::write_manifest(manifest, split_out);
            std::cout << "tagged " << manifest.select(scir::Split::Train).size() << " train and "
                      << manifest.select(scir::Split::Test).size() << " test images of " << manifest.subjects().size()
                      << " subjects\n";
        } else if (*extract) {
            const auto config = extract_flags.resolve();
            const auto manifest = scir::read_manifest(manifest_path);
            const auto s = scir::run_extract(manifest, config, features_out, threads);
            std::cout << "extracted " << s.images << " feature vectors of length " << s.scatter_length + s.texture_length
                      << " (" << s.scatter_length << " scattering + " << s.texture_length << " textural)\n";
        } else if (*train) {
            if (!train_opts.epsilon && !train_opts.k) train_opts.epsilon = 0.99;
            if (standardize) train_opts.standardize = true;
            const auto s = scir::run_train(train_features, train_opts, model_out, gallery_out);
            for (const auto& w : s.warnings) std::cerr << "warning: " << w << "\n";
            std::cout << "fitted PCA on " << s.samples << " samples (" << s.subjects << " subjects, dimension "
                      << s.dimension << "); K = " << s.k << " retains " << std::setprecision(6) << s.retained
                      << " of the variance\n";
        } else if (*evaluate) {
            scir::EvaluateOptions opts;
            opts.k_grid = scir::parse_k_grid(k_grid);
            opts.split = scir::parse_split(split);
            opts.threads = threads;
            const auto report = scir::run_evaluate(eval_model, eval_gallery, scir::read_manifest(eval_manifest), opts);
            for (auto k : opts.k_grid) {
                if (k > report.dimension) {
                    std::cerr << "warning: K = " << k << " exceeds the gallery dimension " << report.dimension
                              << "; dropped from the curve\n";
                }
            }
            std::ofstream(eval_out) << scir::to_json(report, timing).dump(2) << "\n";
            std::ofstream csv(sibling_csv(eval_out));
            scir::write_curve_csv(csv, report);
            std::cout << "rank-1 accuracy " << report.rank1_accuracy << " over " << report.probe_count
                      << " probes at K = " << report.dimension << "; mean match latency " << report.mean_latency_ms
                      << " ms\n";
        } else if (*ident) {
            const auto match = scir::run_identify(id_model, id_gallery, id_image);
            std::cout << match.subject << " " << std::setprecision(10) << match.distance << "\n";
        } else if (*bench) {
            const auto config = bench_flags.resolve();
            const auto report = scir::run_bench(scir::list_images(bench_dir), config, reps);
            std::cout << "timed " << report.timings_ms.size() << " extractions (" << report.images << " images x "
                      << report.repetitions << " reps): median " << report.median_ms << " ms, p95 " << report.p95_ms
                      << " ms\nmachine: " << report.machine << "\n";
            if (report.median_ms > 100.0) {
                std::cerr << "warning: median latency above the 100 ms budget\n";
            }
            if (!bench_out.empty()) std::ofstream(bench_out) << scir::to_json(report).dump(2) << "\n";
        }
    } catch (const scir::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.internal() ? kExitInternal : kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
    return 0;
}
