#include "scir/image.hpp"

#include "scir/error.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <string>

namespace scir {

GrayImage::GrayImage(int width, int height, double fill) : size_{width, height} {
    if (width <= 0 || height <= 0) {
        throw Error(Errc::IncompatibleSize, "image dimensions must be positive");
    }
    data_.assign(size_.area(), fill);
}

GrayImage::GrayImage(int width, int height, std::vector<double> data) : size_{width, height}, data_(std::move(data)) {
    if (width <= 0 || height <= 0) {
        throw Error(Errc::IncompatibleSize, "image dimensions must be positive");
    }
    if (data_.size() != size_.area()) {
        throw Error(Errc::SizeMismatch, "pixel count " + std::to_string(data_.size()) + " does not match " +
                                            std::to_string(width) + "x" + std::to_string(height));
    }
}

void GrayImage::check() const {
    for (double v : data_) {
        if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
            throw Error(Errc::InvariantViolation, "intensity outside [0,1]: " + std::to_string(v));
        }
    }
}

namespace {

class PnmReader {
public:
    explicit PnmReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    // Whitespace and '#' comments may separate header tokens.
    long next_int() {
        skip_space_and_comments();
        if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_])) {
            throw Error(Errc::CorruptImage, "truncated or malformed header");
        }
        long value = 0;
        while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
            value = value * 10 + (bytes_[pos_] - '0');
            if (value > (1L << 30)) throw Error(Errc::CorruptImage, "header value too large");
            ++pos_;
        }
        return value;
    }

    // Exactly one whitespace byte separates maxval from binary raster data.
    void skip_single_space() {
        if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
            throw Error(Errc::CorruptImage, "missing separator before raster");
        }
        ++pos_;
    }

    std::span<const std::uint8_t> rest() const { return bytes_.subspan(pos_); }

private:
    void skip_space_and_comments() {
        while (pos_ < bytes_.size()) {
            if (bytes_[pos_] == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
            } else if (std::isspace(bytes_[pos_])) {
                ++pos_;
            } else {
                break;
            }
        }
    }

    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 2;
};

}  // namespace

GrayImage decode_pnm(std::span<const std::uint8_t> bytes, ColorPolicy color) {
    if (bytes.size() < 2 || bytes[0] != 'P') {
        throw Error(Errc::UnsupportedFormat, "not a portable anymap");
    }
    const char kind = static_cast<char>(bytes[1]);
    if (kind != '5' && kind != '2' && kind != '6') {
        throw Error(Errc::UnsupportedFormat, std::string("unsupported anymap type P") + kind);
    }
    if (kind == '6' && color == ColorPolicy::Reject) {
        throw Error(Errc::UnsupportedFormat, "colour input rejected (enable luma conversion to accept it)");
    }

    PnmReader reader(bytes);
    const long width = reader.next_int();
    const long height = reader.next_int();
    const long maxval = reader.next_int();
    if (width <= 0 || height <= 0) throw Error(Errc::CorruptImage, "non-positive dimensions");
    if (maxval <= 0 || maxval > 255) {
        throw Error(Errc::UnsupportedFormat, "only 8-bit rasters are supported (maxval " + std::to_string(maxval) + ")");
    }
    const auto count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    const auto max_level = static_cast<double>(maxval);
    std::vector<double> data(count);

    if (kind == '2') {
        for (auto& v : data) {
            const long sample = reader.next_int();
            if (sample > maxval) throw Error(Errc::CorruptImage, "sample exceeds maxval");
            v = static_cast<double>(sample) / max_level;
        }
        return GrayImage(static_cast<int>(width), static_cast<int>(height), std::move(data));
    }

    reader.skip_single_space();
    const auto raster = reader.rest();
    const std::size_t channels = kind == '6' ? 3 : 1;
    if (raster.size() < count * channels) {
        throw Error(Errc::CorruptImage, "raster truncated: expected " + std::to_string(count * channels) + " bytes, got " +
                                            std::to_string(raster.size()));
    }
    for (std::size_t i = 0; i < count; ++i) {
        double v;
        if (channels == 1) {
            v = raster[i] / max_level;
        } else {
            const auto* px = &raster[3 * i];
            v = (0.299 * px[0] + 0.587 * px[1] + 0.114 * px[2]) / max_level;
        }
        if (v > 1.0) v = 1.0;
        data[i] = v;
    }
    return GrayImage(static_cast<int>(width), static_cast<int>(height), std::move(data));
}

GrayImage load_image(const std::filesystem::path& path, ColorPolicy color) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(Errc::FileNotFound, path.string());
    }
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    try {
        return decode_pnm(bytes, color);
    } catch (const Error& e) {
        throw Error(e.code(), path.string() + ": " + e.what());
    }
}

std::vector<std::uint8_t> encode_pgm(const GrayImage& img) {
    const std::string header =
        "P5\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n255\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.reserve(out.size() + img.size().area());
    for (double v : img.data()) {
        const double clamped = std::clamp(v, 0.0, 1.0);
        out.push_back(static_cast<std::uint8_t>(std::lround(clamped * 255.0)));
    }
    return out;
}

void write_pgm(const GrayImage& img, const std::filesystem::path& path) {
    const auto bytes = encode_pgm(img);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw Error(Errc::IoError, "cannot write " + path.string());
    }
}

void check_working_size(Size target, BlockGrid grid, int scales) {
    if (target.width <= 0 || target.height <= 0) {
        throw Error(Errc::IncompatibleTarget, "target dimensions must be positive");
    }
    if (grid.cols <= 0 || grid.rows <= 0 || target.width % grid.cols != 0 || target.height % grid.rows != 0) {
        throw Error(Errc::IncompatibleTarget, std::to_string(target.width) + "x" + std::to_string(target.height) +
                                                  " is not divisible by block grid " + std::to_string(grid.cols) + "x" +
                                                  std::to_string(grid.rows));
    }
    if (scales < 1) throw Error(Errc::IncompatibleTarget, "scale count must be >= 1");
    const int coarsest = 1 << (scales - 1);
    if (target.width % coarsest != 0 || target.height % coarsest != 0) {
        throw Error(Errc::IncompatibleTarget, std::to_string(target.width) + "x" + std::to_string(target.height) +
                                                  " is not a multiple of the coarsest wavelet scale " +
                                                  std::to_string(coarsest));
    }
}

GrayImage resize_bilinear(const GrayImage& img, Size target) {
    if (img.size() == target) return img;
    GrayImage out(target.width, target.height);
    const double sx = static_cast<double>(img.width()) / target.width;
    const double sy = static_cast<double>(img.height()) / target.height;
    const int max_x = img.width() - 1;
    const int max_y = img.height() - 1;
    for (int y = 0; y < target.height; ++y) {
        const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, static_cast<double>(max_y));
        const int y0 = static_cast<int>(fy);
        const int y1 = std::min(y0 + 1, max_y);
        const double wy = fy - y0;
        for (int x = 0; x < target.width; ++x) {
            const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, static_cast<double>(max_x));
            const int x0 = static_cast<int>(fx);
            const int x1 = std::min(x0 + 1, max_x);
            const double wx = fx - x0;
            const double top = (1.0 - wx) * img(x0, y0) + wx * img(x1, y0);
            const double bottom = (1.0 - wx) * img(x0, y1) + wx * img(x1, y1);
            out(x, y) = std::clamp((1.0 - wy) * top + wy * bottom, 0.0, 1.0);
        }
    }
    return out;
}

GrayImage preprocess(const GrayImage& img, Size target, BlockGrid grid, int scales) {
    check_working_size(target, grid, scales);
    return resize_bilinear(img, target);
}

}  // namespace scir
