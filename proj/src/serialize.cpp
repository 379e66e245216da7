#include "scir/serialize.hpp"

#include "bytes.hpp"
#include "scir/error.hpp"

#include <fstream>
#include <iterator>

namespace scir {

using detail::ByteReader;
using detail::ByteWriter;

namespace {

ByteWriter begin_record(RecordKind kind, std::string_view config) {
    ByteWriter w;
    w.put_raw("SCIR");
    w.put(kFormatVersion);
    w.put(static_cast<std::uint16_t>(kind));
    w.put_string(config);
    return w;
}

void write_file(const std::filesystem::path& path, const ByteWriter& w) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char*>(w.bytes().data()), static_cast<std::streamsize>(w.bytes().size()));
    if (!out) throw Error(Errc::IoError, "cannot write " + path.string());
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::FileNotFound, path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Validates the header and leaves the reader at the payload.
void open_record(ByteReader& r, RecordKind expected, const std::filesystem::path& path, std::string* config) {
    const auto magic = r.take(4);
    if (std::string(magic.begin(), magic.end()) != "SCIR") {
        throw Error(Errc::UnsupportedFormat, path.string() + ": bad magic");
    }
    const auto version = r.get<std::uint16_t>();
    if (version != kFormatVersion) {
        throw Error(Errc::UnsupportedFormat, path.string() + ": unsupported format version " + std::to_string(version));
    }
    const auto kind = r.get<std::uint16_t>();
    if (kind != static_cast<std::uint16_t>(expected)) {
        throw Error(Errc::UnsupportedFormat, path.string() + ": wrong record kind " + std::to_string(kind));
    }
    auto text = r.get_string();
    if (config) *config = std::move(text);
}

void expect_end(const ByteReader& r, const std::filesystem::path& path) {
    if (r.remaining() != 0) throw Error(Errc::IoError, path.string() + ": trailing bytes");
}

}  // namespace

void save_features(const std::filesystem::path& path, const FeatureVector& f, std::string_view config) {
    auto w = begin_record(RecordKind::Features, config);
    w.put(static_cast<std::uint64_t>(f.scatter_length));
    w.put(static_cast<std::uint64_t>(f.texture_length));
    w.put(std::span<const double>(f.values));
    write_file(path, w);
}

FeatureVector load_features(const std::filesystem::path& path, std::string* config) {
    const auto bytes = read_file(path);
    ByteReader r(bytes);
    open_record(r, RecordKind::Features, path, config);
    FeatureVector f;
    f.scatter_length = r.get<std::uint64_t>();
    f.texture_length = r.get<std::uint64_t>();
    f.values = r.get_doubles(f.scatter_length + f.texture_length);
    expect_end(r, path);
    return f;
}

void save_model(const std::filesystem::path& path, const PcaModel& model, std::string_view config) {
    auto w = begin_record(RecordKind::Model, config);
    const auto d = model.dimension();
    w.put(static_cast<std::uint64_t>(d));
    w.put(static_cast<std::uint64_t>(model.sample_count()));
    w.put(static_cast<std::uint8_t>(model.standardized() ? 1 : 0));
    w.put(std::span<const double>(model.mean().data(), d));
    if (model.standardized()) w.put(std::span<const double>(model.scale().data(), d));
    w.put(std::span<const double>(model.eigenvalues().data(), d));
    w.put(std::span<const double>(model.eigenvectors().data(), d * d));
    w.put(model.fingerprint());
    write_file(path, w);
}

PcaModel load_model(const std::filesystem::path& path, std::string* config) {
    const auto bytes = read_file(path);
    ByteReader r(bytes);
    open_record(r, RecordKind::Model, path, config);
    const auto d = r.get<std::uint64_t>();
    const auto n = r.get<std::uint64_t>();
    const bool standardized = r.get<std::uint8_t>() != 0;
    if (d == 0 || d > (1u << 16)) throw Error(Errc::IoError, path.string() + ": implausible model dimension");
    const auto di = static_cast<Eigen::Index>(d);
    auto to_vec = [](std::vector<double> v) { return Eigen::VectorXd(Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()))); };
    Eigen::VectorXd mean = to_vec(r.get_doubles(d));
    Eigen::VectorXd scale = standardized ? to_vec(r.get_doubles(d)) : Eigen::VectorXd();
    Eigen::VectorXd eigenvalues = to_vec(r.get_doubles(d));
    auto raw = r.get_doubles(d * d);
    Eigen::MatrixXd eigenvectors = Eigen::Map<Eigen::MatrixXd>(raw.data(), di, di);
    const auto stored = r.get<std::uint64_t>();
    expect_end(r, path);
    PcaModel model(std::move(mean), std::move(scale), std::move(eigenvalues), std::move(eigenvectors), n);
    if (model.fingerprint() != stored) {
        throw Error(Errc::FingerprintMismatch, path.string() + ": stored fingerprint does not match contents");
    }
    return model;
}

void save_gallery(const std::filesystem::path& path, const Gallery& gallery, std::string_view config) {
    auto w = begin_record(RecordKind::Gallery, config);
    w.put(gallery.fingerprint());
    w.put(static_cast<std::uint64_t>(gallery.dimension()));
    w.put(static_cast<std::uint64_t>(gallery.size()));
    for (const auto& e : gallery.entries()) {
        w.put_string(e.subject);
        w.put(std::span<const double>(e.templ));
    }
    write_file(path, w);
}

Gallery load_gallery(const std::filesystem::path& path, std::string* config) {
    const auto bytes = read_file(path);
    ByteReader r(bytes);
    open_record(r, RecordKind::Gallery, path, config);
    const auto fingerprint = r.get<std::uint64_t>();
    const auto k = r.get<std::uint64_t>();
    const auto count = r.get<std::uint64_t>();
    Gallery gallery(fingerprint);
    for (std::uint64_t i = 0; i < count; ++i) {
        auto subject = r.get_string();
        gallery.enroll(subject, ReducedVector{r.get_doubles(k), fingerprint});
    }
    expect_end(r, path);
    return gallery;
}

}  // namespace scir
