#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace scir {

struct Size {
    int width = 0;
    int height = 0;

    std::size_t area() const { return static_cast<std::size_t>(width) * static_cast<std::size_t>(height); }
    friend bool operator==(const Size&, const Size&) = default;
};

/// Partition of an image into equal non-overlapping blocks, `cols` across
/// the width and `rows` down the height.
struct BlockGrid {
    int cols = 4;
    int rows = 3;

    int count() const { return cols * rows; }
    friend bool operator==(const BlockGrid&, const BlockGrid&) = default;
};

/// Row-major grayscale image with intensities in [0, 1].
class GrayImage {
public:
    GrayImage() = default;
    GrayImage(int width, int height, double fill = 0.0);
    GrayImage(int width, int height, std::vector<double> data);

    int width() const { return size_.width; }
    int height() const { return size_.height; }
    Size size() const { return size_; }
    bool empty() const { return data_.empty(); }

    double operator()(int x, int y) const { return data_[index(x, y)]; }
    double& operator()(int x, int y) { return data_[index(x, y)]; }

    std::span<const double> data() const { return data_; }
    std::span<double> data() { return data_; }

    /// Throws InvariantViolation unless every value is finite and in [0, 1].
    void check() const;

private:
    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(size_.width) + static_cast<std::size_t>(x);
    }

    Size size_;
    std::vector<double> data_;
};

enum class ColorPolicy { Reject, Luma };

/// Decodes a binary (P5) or ASCII (P2) graymap. Colour pixmaps (P6) are
/// rejected or converted to Rec. 601 luma depending on `color`.
GrayImage decode_pnm(std::span<const std::uint8_t> bytes, ColorPolicy color = ColorPolicy::Reject);
GrayImage load_image(const std::filesystem::path& path, ColorPolicy color = ColorPolicy::Reject);

/// Encodes as 8-bit P5; values are rounded to the nearest of 256 levels.
std::vector<std::uint8_t> encode_pgm(const GrayImage& img);
void write_pgm(const GrayImage& img, const std::filesystem::path& path);

/// Checks that `target` can be split into `grid` blocks and is a multiple of
/// the coarsest wavelet scale 2^(scales-1) in both dimensions.
void check_working_size(Size target, BlockGrid grid, int scales);

/// Bilinear resample to `target` (pixel-centre aligned). Returns the input
/// unchanged when the size already matches.
GrayImage preprocess(const GrayImage& img, Size target, BlockGrid grid, int scales);

GrayImage resize_bilinear(const GrayImage& img, Size target);

}  // namespace scir
