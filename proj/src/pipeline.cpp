#include "scir/pipeline.hpp"

#include "scir/error.hpp"
#include "scir/serialize.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

namespace scir {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

template <class T>
T parse_number(const std::string& key, const std::string& value) {
    std::istringstream in(value);
    T out{};
    in >> out;
    if (!in || !in.eof()) throw Error(Errc::InvalidConfig, "bad value for " + key + ": '" + value + "'");
    return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
    if (value == "false" || value == "0" || value == "no" || value == "off") return false;
    throw Error(Errc::InvalidConfig, "bad boolean for " + key + ": '" + value + "'");
}

std::pair<int, int> parse_pair(const std::string& key, const std::string& value, char sep) {
    const auto pos = value.find(sep);
    if (pos == std::string::npos) throw Error(Errc::InvalidConfig, "bad value for " + key + ": '" + value + "'");
    return {parse_number<int>(key, trim(value.substr(0, pos))), parse_number<int>(key, trim(value.substr(pos + 1)))};
}

std::string contextualize(const std::string& where, const Error& e) { return where + ": " + e.what(); }

// Feature files mirror the image layout with a `.feat` extension. Root and
// `..` components are rewritten so every file lands inside the output tree.
std::filesystem::path feature_name(const std::string& image_path) {
    std::filesystem::path out;
    for (const auto& part : std::filesystem::path(image_path).lexically_normal().relative_path()) {
        if (part == "..") out /= "__";
        else if (part != ".") out /= part;
    }
    out.replace_extension(".feat");
    return out;
}

std::vector<FeatureVector> extract_all(const FeatureExtractor& extractor, const DatasetManifest& manifest,
                                       const std::vector<ManifestEntry>& entries, int threads) {
    std::vector<FeatureVector> out(entries.size());
    parallel_for(entries.size(), threads, [&](std::size_t i) {
        const auto path = manifest.resolve(entries[i]);
        try {
            out[i] = extractor.extract(load_image(path, extractor.config().color));
        } catch (const Error& e) {
            throw Error(e.code(), contextualize(path.string(), e));
        }
    });
    return out;
}

std::string machine_description() {
    std::string cpu = "unknown cpu";
    std::ifstream info("/proc/cpuinfo");
    std::string line;
    while (std::getline(info, line)) {
        if (line.rfind("model name", 0) == 0) {
            const auto colon = line.find(':');
            if (colon != std::string::npos) cpu = trim(line.substr(colon + 1));
            break;
        }
    }
    std::ostringstream out;
    out << cpu << "; " << std::thread::hardware_concurrency() << " hardware threads; compiler " << __VERSION__;
    return out.str();
}

}  // namespace

void PipelineConfig::validate() const {
    scattering.validate();
    if (texture.levels < 2) throw Error(Errc::InvalidConfig, "texture.levels must be >= 2");
    try {
        check_working_size(size, texture_enabled ? texture.grid : BlockGrid{1, 1}, scattering.scales);
    } catch (const Error& e) {
        throw Error(Errc::InvalidConfig, e.what());
    }
    if (k == 0 && !(epsilon > 0.0 && epsilon <= 1.0)) {
        throw Error(Errc::InvalidConfig, "set pca.k >= 1 or pca.epsilon in (0, 1]");
    }
}

std::string PipelineConfig::to_text() const {
    std::ostringstream out;
    out.precision(17);
    out << "size = " << size.width << "x" << size.height << "\n"
        << "scattering.scales = " << scattering.scales << "\n"
        << "scattering.orientations = " << scattering.orientations << "\n"
        << "scattering.layers = " << scattering.max_layer << "\n"
        << "texture.enabled = " << (texture_enabled ? "true" : "false") << "\n"
        << "texture.grid = " << texture.grid.cols << "x" << texture.grid.rows << "\n"
        << "texture.levels = " << texture.levels << "\n"
        << "texture.offset = " << texture.offset.dx << "," << texture.offset.dy << "\n"
        << "pca.k = " << k << "\n"
        << "pca.epsilon = " << epsilon << "\n"
        << "pca.standardize = " << (standardize ? "true" : "false") << "\n"
        << "seed = " << seed << "\n"
        << "color = " << (color == ColorPolicy::Luma ? "luma" : "reject") << "\n";
    return out.str();
}

PipelineConfig PipelineConfig::from_text(std::string_view text) {
    PipelineConfig c;
    std::istringstream in{std::string(text)};
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw Error(Errc::InvalidConfig, "line " + std::to_string(line_no) + ": expected key = value");
        }
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        if (key == "size") {
            std::tie(c.size.width, c.size.height) = parse_pair(key, value, 'x');
        } else if (key == "scattering.scales") {
            c.scattering.scales = parse_number<int>(key, value);
        } else if (key == "scattering.orientations") {
            c.scattering.orientations = parse_number<int>(key, value);
        } else if (key == "scattering.layers") {
            c.scattering.max_layer = parse_number<int>(key, value);
        } else if (key == "texture.enabled") {
            c.texture_enabled = parse_bool(key, value);
        } else if (key == "texture.grid") {
            std::tie(c.texture.grid.cols, c.texture.grid.rows) = parse_pair(key, value, 'x');
        } else if (key == "texture.levels") {
            c.texture.levels = parse_number<int>(key, value);
        } else if (key == "texture.offset") {
            std::tie(c.texture.offset.dx, c.texture.offset.dy) = parse_pair(key, value, ',');
        } else if (key == "pca.k") {
            c.k = parse_number<std::size_t>(key, value);
        } else if (key == "pca.epsilon") {
            c.epsilon = parse_number<double>(key, value);
        } else if (key == "pca.standardize") {
            c.standardize = parse_bool(key, value);
        } else if (key == "seed") {
            c.seed = parse_number<std::uint64_t>(key, value);
        } else if (key == "color") {
            if (value == "luma") c.color = ColorPolicy::Luma;
            else if (value == "reject") c.color = ColorPolicy::Reject;
            else throw Error(Errc::InvalidConfig, "color must be 'reject' or 'luma'");
        } else {
            throw Error(Errc::InvalidConfig, "unknown key '" + key + "'");
        }
    }
    return c;
}

PipelineConfig PipelineConfig::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::FileNotFound, path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return from_text(ss.str());
}

std::size_t PipelineConfig::scatter_length() const { return 2 * scattering_path_count(scattering); }

std::size_t PipelineConfig::texture_length() const {
    return texture_enabled ? 14 * static_cast<std::size_t>(texture.grid.count()) : 0;
}

FeatureExtractor::FeatureExtractor(const PipelineConfig& config)
    : config_(config), bank_((config.validate(), FilterBank::build(config.scattering, config.size))) {}

FeatureVector FeatureExtractor::extract(const GrayImage& img) const {
    const auto working = preprocess(img, config_.size, config_.texture_enabled ? config_.texture.grid : BlockGrid{1, 1},
                                    config_.scattering.scales);
    auto scatter = scattering_features(working, bank_);
    if (!config_.texture_enabled) {
        FeatureVector f;
        f.scatter_length = scatter.size();
        f.values = std::move(scatter);
        return f;
    }
    const auto texture = block_texture_features(working, config_.texture);
    return concat_features(scatter, texture);
}

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn) {
    const auto workers = static_cast<std::size_t>(std::clamp(threads, 1, 256));
    if (workers == 1 || count < 2) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::size_t error_index = count;
    std::exception_ptr error;
    auto work = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (i < error_index) {
                    error_index = i;
                    error = std::current_exception();
                }
            }
        }
    };
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < std::min(workers, count); ++t) pool.emplace_back(work);
    pool.clear();
    if (error) std::rethrow_exception(error);
}

ExtractSummary run_extract(const DatasetManifest& manifest, const PipelineConfig& config,
                           const std::filesystem::path& out_dir, int threads) {
    manifest.validate();
    const FeatureExtractor extractor(config);
    const auto config_text = config.to_text();
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw Error(Errc::IoError, "cannot create " + out_dir.string());

    DatasetManifest index;
    index.base_dir = out_dir;
    for (const auto& e : manifest.entries) {
        index.entries.push_back({feature_name(e.path).generic_string(), e.subject, e.split});
        std::filesystem::create_directories((out_dir / index.entries.back().path).parent_path(), ec);
    }
    index.validate();
    const auto features = extract_all(extractor, manifest, manifest.entries, threads);
    for (std::size_t i = 0; i < features.size(); ++i) {
        save_features(out_dir / index.entries[i].path, features[i], config_text);
    }
    write_manifest(index, out_dir / "manifest.tsv");
    return {features.size(), config.scatter_length(), config.texture_length()};
}

TrainSummary run_train(const std::filesystem::path& features_dir, const TrainOptions& options,
                       const std::filesystem::path& model_path, const std::filesystem::path& gallery_path) {
    const auto index = read_manifest(features_dir / "manifest.tsv");
    const auto train = index.select(Split::Train);
    if (train.size() < 2) {
        throw Error(Errc::TooFewSamples, "train split has " + std::to_string(train.size()) + " sample(s); need >= 2");
    }
    std::vector<FeatureVector> features;
    std::string config_text;
    for (const auto& e : train) {
        std::string text;
        features.push_back(load_features(index.resolve(e), &text));
        if (config_text.empty()) config_text = text;
        if (text != config_text) {
            throw Error(Errc::InvalidConfig, index.resolve(e).string() + " was extracted with a different configuration");
        }
    }
    auto config = PipelineConfig::from_text(config_text);
    if (options.epsilon) {
        config.epsilon = *options.epsilon;
        config.k = 0;
    }
    if (options.k) {
        config.k = *options.k;
        config.epsilon = 0.0;
    }
    if (options.standardize) config.standardize = *options.standardize;
    config.validate();

    const auto model = fit_pca(features, PcaOptions{PcaRoute::Auto, config.standardize});
    TrainSummary summary;
    summary.samples = features.size();
    summary.dimension = model.dimension();
    summary.k = config.k != 0 ? config.k : choose_k(model, config.epsilon);
    if (summary.k > model.dimension()) {
        throw Error(Errc::BadK, "K = " + std::to_string(summary.k) + " exceeds feature dimension " +
                                    std::to_string(model.dimension()));
    }
    summary.retained = retained_variance(model, summary.k);

    Gallery gallery(model.fingerprint());
    std::set<std::string> subjects;
    for (std::size_t i = 0; i < train.size(); ++i) {
        gallery.enroll(train[i].subject, project(model, features[i].values, summary.k));
        subjects.insert(train[i].subject);
    }
    summary.subjects = subjects.size();
    if (summary.subjects == 1) {
        summary.warnings.push_back("train split holds a single subject; identification will be trivially correct");
    }

    config.k = summary.k;
    const auto text = config.to_text();
    save_model(model_path, model, text);
    save_gallery(gallery_path, gallery, text);
    return summary;
}

EvalReport run_evaluate(const std::filesystem::path& model_path, const std::filesystem::path& gallery_path,
                        const DatasetManifest& manifest, const EvaluateOptions& options) {
    std::string config_text;
    const auto model = load_model(model_path, &config_text);
    const auto gallery = load_gallery(gallery_path);
    if (gallery.fingerprint() != model.fingerprint()) {
        throw Error(Errc::FingerprintMismatch, gallery_path.string() + " was not built from " + model_path.string());
    }
    manifest.validate();
    const auto entries = manifest.select(options.split);
    if (entries.empty()) {
        throw Error(Errc::EmptyProbeSet, std::string("manifest has no ") + to_string(options.split) + " entries");
    }
    const FeatureExtractor extractor(PipelineConfig::from_text(config_text));
    const auto features = extract_all(extractor, manifest, entries, options.threads);
    std::vector<Probe> probes;
    probes.reserve(entries.size());
    for (std::size_t i = 0; i < entries.size(); ++i) {
        probes.push_back({entries[i].subject, project(model, features[i].values, gallery.dimension())});
    }
    return evaluate(gallery, probes, options.k_grid);
}

MatchResult run_identify(const std::filesystem::path& model_path, const std::filesystem::path& gallery_path,
                         const std::filesystem::path& image_path) {
    std::string config_text;
    const auto model = load_model(model_path, &config_text);
    const auto gallery = load_gallery(gallery_path);
    const FeatureExtractor extractor(PipelineConfig::from_text(config_text));
    const auto f = extractor.extract(load_image(image_path, extractor.config().color));
    return identify(gallery, project(model, f.values, gallery.dimension()));
}

BenchReport run_bench(const std::vector<std::filesystem::path>& images, const PipelineConfig& config, int repetitions) {
    if (images.empty()) throw Error(Errc::EmptyInput, "no images to benchmark");
    if (repetitions < 1) throw Error(Errc::InvalidConfig, "repetitions must be >= 1");
    const FeatureExtractor extractor(config);

    std::vector<GrayImage> loaded;
    std::vector<FeatureVector> features;
    for (const auto& path : images) {
        loaded.push_back(load_image(path, config.color));
        features.push_back(extractor.extract(loaded.back()));
    }

    // With a single image there is nothing to fit; match raw features.
    std::optional<PcaModel> model;
    std::size_t k = 0;
    Gallery gallery;
    if (features.size() >= 2) {
        model = fit_pca(features, PcaOptions{PcaRoute::Auto, config.standardize});
        k = config.k != 0 ? std::min(config.k, model->dimension()) : choose_k(*model, config.epsilon);
    }
    auto reduce = [&](const FeatureVector& f) {
        return model ? project(*model, f.values, k) : ReducedVector{f.values, 0};
    };
    for (std::size_t i = 0; i < features.size(); ++i) gallery.enroll(images[i].stem().string(), reduce(features[i]));

    BenchReport report;
    report.images = images.size();
    report.repetitions = repetitions;
    report.machine = machine_description();
    for (int r = 0; r < repetitions; ++r) {
        for (const auto& img : loaded) {
            const auto start = std::chrono::steady_clock::now();
            const auto match = identify(gallery, reduce(extractor.extract(img)));
            const auto stop = std::chrono::steady_clock::now();
            (void)match;
            report.timings_ms.push_back(std::chrono::duration<double, std::milli>(stop - start).count());
        }
    }
    auto sorted = report.timings_ms;
    std::sort(sorted.begin(), sorted.end());
    const auto n = sorted.size();
    report.median_ms = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
    const auto rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(n)));
    report.p95_ms = sorted[std::max<std::size_t>(rank, 1) - 1];
    return report;
}

nlohmann::json to_json(const BenchReport& report) {
    return {{"images", report.images},         {"repetitions", report.repetitions},
            {"timed_runs", report.timings_ms.size()}, {"median_ms", report.median_ms},
            {"p95_ms", report.p95_ms},         {"machine", report.machine}};
}

std::vector<std::filesystem::path> list_images(const std::filesystem::path& dir) {
    std::error_code ec;
    if (!std::filesystem::is_directory(dir, ec)) throw Error(Errc::FileNotFound, dir.string());
    std::vector<std::filesystem::path> out;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".pgm") out.push_back(entry.path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::size_t> parse_k_grid(std::string_view text) {
    std::vector<std::size_t> out;
    std::stringstream ss{std::string(text)};
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        const auto k = parse_number<long long>("k-grid", item);
        if (k < 1) throw Error(Errc::BadK, "k-grid values must be >= 1");
        out.push_back(static_cast<std::size_t>(k));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace scir
