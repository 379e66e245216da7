#pragma once

#include "scir/image.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace scir {

class QuantizedImage {
public:
    QuantizedImage(int width, int height, int levels, std::vector<int> labels);

    int width() const { return width_; }
    int height() const { return height_; }
    int levels() const { return levels_; }
    int operator()(int x, int y) const { return labels_[static_cast<std::size_t>(y) * width_ + x]; }
    std::span<const int> labels() const { return labels_; }

    /// Sub-rectangle starting at (x0, y0).
    QuantizedImage crop(int x0, int y0, int width, int height) const;

private:
    int width_, height_, levels_;
    std::vector<int> labels_;
};

/// label = min(floor(v * levels), levels - 1).
QuantizedImage quantize(const GrayImage& img, int levels);

/// Pixel displacement between the reference pixel and its neighbour.
/// dx moves along the width, dy down the height.
struct Offset {
    int dx = 1;
    int dy = 0;
    friend bool operator==(const Offset&, const Offset&) = default;
};

/// Directional (unsymmetrized) gray-level co-occurrence counts.
struct CooccurrenceMatrix {
    int levels = 0;
    Offset offset;
    std::vector<std::int64_t> counts;  ///< levels x levels, row = reference label
    std::int64_t total = 0;

    std::int64_t operator()(int i, int j) const { return counts[static_cast<std::size_t>(i) * levels + j]; }
};

/// Counts pairs (q(x,y), q(x+dx, y+dy)); pairs leaving the image are skipped.
CooccurrenceMatrix cooccurrence(const QuantizedImage& q, Offset offset);

/// Normalized distribution and the derived quantities the Haralick
/// statistics are built from. Gray levels are 0-based throughout, so the
/// sum distribution is indexed by i + j in [0, 2(Ng-1)].
struct Marginals {
    Eigen::MatrixXd p;
    Eigen::VectorXd px, py;
    Eigen::VectorXd p_sum;   ///< p_{x+y}, length 2*Ng - 1
    Eigen::VectorXd p_diff;  ///< p_{x-y} over |i - j|, length Ng
    double hx = 0, hy = 0, hxy = 0, hxy1 = 0, hxy2 = 0;
    Eigen::MatrixXd q;
};

Marginals marginals(const CooccurrenceMatrix& glcm);

using HaralickVector = std::array<double, 14>;

/// Eigenvalues of Q (real parts, descending) and the largest imaginary
/// magnitude encountered.
struct QSpectrum {
    std::vector<double> values;
    double max_imag = 0.0;
};

QSpectrum q_spectrum(const Eigen::MatrixXd& q);

/// f1..f14 with natural logarithms and 0 log 0 = 0. Degenerate denominators
/// in f3 and f12 yield 0; the f13 argument is clamped to [0, 1]; f14 uses the
/// real part of Q's second-largest eigenvalue, floored at 0.
HaralickVector haralick14(const CooccurrenceMatrix& glcm);
HaralickVector haralick14(const Marginals& m);

struct TextureConfig {
    BlockGrid grid{4, 3};
    int levels = 8;
    Offset offset{1, 0};
    friend bool operator==(const TextureConfig&, const TextureConfig&) = default;
};

/// Haralick vectors of every block in row-major block order.
std::vector<HaralickVector> block_haralick(const GrayImage& img, const TextureConfig& config);

/// Concatenation of block_haralick; 14 * block count values.
std::vector<double> block_texture_features(const GrayImage& img, const TextureConfig& config);

/// CSV with header `block,f1,...,f14`, one row per block.
void write_haralick_csv(std::ostream& out, std::span<const HaralickVector> blocks);

}  // namespace scir
