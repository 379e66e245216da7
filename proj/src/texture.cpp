#include "scir/texture.hpp"

#include "scir/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iostream>
#include <ostream>
#include <string>

namespace scir {

namespace {

constexpr double kImagTolerance = 1e-8;

double xlogx(double v) { return v > 0.0 ? v * std::log(v) : 0.0; }

void warn_complex_spectrum(double residue) {
    static std::atomic<bool> warned{false};
    if (!warned.exchange(true)) {
        std::cerr << "warning: Q has complex eigenvalues (|imag| = " << residue
                  << "); using real parts for f14\n";
    }
}

}  // namespace

QuantizedImage::QuantizedImage(int width, int height, int levels, std::vector<int> labels)
    : width_(width), height_(height), levels_(levels), labels_(std::move(labels)) {
    if (levels < 2) throw Error(Errc::InvalidLevels, "need at least 2 gray levels, got " + std::to_string(levels));
    if (width <= 0 || height <= 0 || labels_.size() != static_cast<std::size_t>(width) * height) {
        throw Error(Errc::SizeMismatch, "label count does not match dimensions");
    }
    for (int v : labels_) {
        if (v < 0 || v >= levels) throw Error(Errc::InvalidLevels, "label " + std::to_string(v) + " out of range");
    }
}

QuantizedImage QuantizedImage::crop(int x0, int y0, int width, int height) const {
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(width) * height);
    for (int y = y0; y < y0 + height; ++y) {
        for (int x = x0; x < x0 + width; ++x) out.push_back((*this)(x, y));
    }
    return QuantizedImage(width, height, levels_, std::move(out));
}

QuantizedImage quantize(const GrayImage& img, int levels) {
    if (levels < 2) throw Error(Errc::InvalidLevels, "need at least 2 gray levels, got " + std::to_string(levels));
    std::vector<int> labels;
    labels.reserve(img.size().area());
    for (double v : img.data()) {
        const auto label = static_cast<int>(std::floor(v * levels));
        labels.push_back(std::clamp(label, 0, levels - 1));
    }
    return QuantizedImage(img.width(), img.height(), levels, std::move(labels));
}

CooccurrenceMatrix cooccurrence(const QuantizedImage& q, Offset offset) {
    if (std::abs(offset.dx) >= q.width() && q.width() > 1) {
        throw Error(Errc::OffsetTooLarge, "|dx| must be smaller than the width");
    }
    if (std::abs(offset.dy) >= q.height() && q.height() > 1) {
        throw Error(Errc::OffsetTooLarge, "|dy| must be smaller than the height");
    }
    CooccurrenceMatrix m;
    m.levels = q.levels();
    m.offset = offset;
    m.counts.assign(static_cast<std::size_t>(q.levels()) * q.levels(), 0);
    const int x_begin = std::max(0, -offset.dx), x_end = std::min(q.width(), q.width() - offset.dx);
    const int y_begin = std::max(0, -offset.dy), y_end = std::min(q.height(), q.height() - offset.dy);
    for (int y = y_begin; y < y_end; ++y) {
        for (int x = x_begin; x < x_end; ++x) {
            ++m.counts[static_cast<std::size_t>(q(x, y)) * m.levels + q(x + offset.dx, y + offset.dy)];
            ++m.total;
        }
    }
    return m;
}

Marginals marginals(const CooccurrenceMatrix& glcm) {
    if (glcm.total <= 0) throw Error(Errc::EmptyCooccurrence, "co-occurrence matrix has no pairs");
    const int ng = glcm.levels;
    Marginals m;
    m.p.resize(ng, ng);
    for (int i = 0; i < ng; ++i) {
        for (int j = 0; j < ng; ++j) m.p(i, j) = static_cast<double>(glcm(i, j)) / static_cast<double>(glcm.total);
    }
    m.px = m.p.rowwise().sum();
    m.py = m.p.colwise().sum().transpose();
    m.p_sum = Eigen::VectorXd::Zero(2 * ng - 1);
    m.p_diff = Eigen::VectorXd::Zero(ng);
    for (int i = 0; i < ng; ++i) {
        for (int j = 0; j < ng; ++j) {
            m.p_sum(i + j) += m.p(i, j);
            m.p_diff(std::abs(i - j)) += m.p(i, j);
        }
    }
    for (int i = 0; i < ng; ++i) {
        m.hx -= xlogx(m.px(i));
        m.hy -= xlogx(m.py(i));
        for (int j = 0; j < ng; ++j) {
            const double pij = m.p(i, j);
            const double prod = m.px(i) * m.py(j);
            m.hxy -= xlogx(pij);
            if (pij > 0.0) m.hxy1 -= pij * std::log(prod);
            m.hxy2 -= xlogx(prod);
        }
    }
    m.q = Eigen::MatrixXd::Zero(ng, ng);
    for (int i = 0; i < ng; ++i) {
        if (m.px(i) <= 0.0) continue;
        for (int j = 0; j < ng; ++j) {
            double acc = 0.0;
            for (int k = 0; k < ng; ++k) {
                if (m.py(k) > 0.0) acc += m.p(i, k) * m.p(j, k) / (m.px(i) * m.py(k));
            }
            m.q(i, j) = acc;
        }
    }
    return m;
}

QSpectrum q_spectrum(const Eigen::MatrixXd& q) {
    Eigen::EigenSolver<Eigen::MatrixXd> solver(q, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) throw Error(Errc::InvariantViolation, "eigen-decomposition of Q failed");
    QSpectrum s;
    for (const auto& ev : solver.eigenvalues()) {
        s.values.push_back(ev.real());
        s.max_imag = std::max(s.max_imag, std::abs(ev.imag()));
    }
    std::sort(s.values.begin(), s.values.end(), std::greater<>());
    return s;
}

HaralickVector haralick14(const CooccurrenceMatrix& glcm) { return haralick14(marginals(glcm)); }

HaralickVector haralick14(const Marginals& m) {
    const auto ng = static_cast<int>(m.px.size());
    const auto& p = m.p;
    HaralickVector f{};

    double mu_x = 0, mu_y = 0;
    for (int i = 0; i < ng; ++i) {
        mu_x += i * m.px(i);
        mu_y += i * m.py(i);
    }
    double var_x = 0, var_y = 0;
    for (int i = 0; i < ng; ++i) {
        var_x += (i - mu_x) * (i - mu_x) * m.px(i);
        var_y += (i - mu_y) * (i - mu_y) * m.py(i);
    }

    double asm_ = 0, cross = 0, variance = 0, idm = 0;
    for (int i = 0; i < ng; ++i) {
        for (int j = 0; j < ng; ++j) {
            const double v = p(i, j);
            asm_ += v * v;
            cross += static_cast<double>(i) * j * v;
            variance += (i - mu_x) * (i - mu_x) * v;
            idm += v / (1.0 + static_cast<double>((i - j) * (i - j)));
        }
    }
    f[0] = asm_;

    double contrast = 0, diff_mean = 0, diff_entropy = 0;
    for (int k = 0; k < ng; ++k) {
        contrast += static_cast<double>(k) * k * m.p_diff(k);
        diff_mean += k * m.p_diff(k);
        diff_entropy -= xlogx(m.p_diff(k));
    }
    f[1] = contrast;

    const double sd = std::sqrt(var_x * var_y);
    f[2] = sd > 0.0 ? (cross - mu_x * mu_y) / sd : 0.0;
    // mu is the i-weighted grand mean of p, which equals mu_x.
    f[3] = variance;
    f[4] = idm;

    double sum_avg = 0, sum_entropy = 0;
    for (int k = 0; k < m.p_sum.size(); ++k) {
        sum_avg += k * m.p_sum(k);
        sum_entropy -= xlogx(m.p_sum(k));
    }
    double sum_var = 0;
    for (int k = 0; k < m.p_sum.size(); ++k) sum_var += (k - sum_avg) * (k - sum_avg) * m.p_sum(k);
    f[5] = sum_avg;
    f[6] = sum_var;
    f[7] = sum_entropy;
    f[8] = m.hxy;

    double diff_var = 0;
    for (int k = 0; k < ng; ++k) diff_var += (k - diff_mean) * (k - diff_mean) * m.p_diff(k);
    f[9] = diff_var;
    f[10] = diff_entropy;

    const double hmax = std::max(m.hx, m.hy);
    f[11] = hmax > 0.0 ? (m.hxy - m.hxy1) / hmax : 0.0;
    f[12] = std::sqrt(std::clamp(1.0 - std::exp(-2.0 * (m.hxy2 - m.hxy)), 0.0, 1.0));

    const auto spectrum = q_spectrum(m.q);
    if (spectrum.max_imag > kImagTolerance) warn_complex_spectrum(spectrum.max_imag);
    const double second = spectrum.values.size() > 1 ? spectrum.values[1] : 0.0;
    f[13] = std::sqrt(std::max(0.0, second));
    return f;
}

std::vector<HaralickVector> block_haralick(const GrayImage& img, const TextureConfig& config) {
    const auto& g = config.grid;
    if (g.cols <= 0 || g.rows <= 0 || img.width() % g.cols != 0 || img.height() % g.rows != 0) {
        throw Error(Errc::IncompatibleGrid, "grid " + std::to_string(g.cols) + "x" + std::to_string(g.rows) +
                                                " does not divide " + std::to_string(img.width()) + "x" +
                                                std::to_string(img.height()));
    }
    const auto q = quantize(img, config.levels);
    const int bw = img.width() / g.cols, bh = img.height() / g.rows;
    std::vector<HaralickVector> out;
    out.reserve(static_cast<std::size_t>(g.count()));
    for (int r = 0; r < g.rows; ++r) {
        for (int c = 0; c < g.cols; ++c) {
            out.push_back(haralick14(cooccurrence(q.crop(c * bw, r * bh, bw, bh), config.offset)));
        }
    }
    return out;
}

std::vector<double> block_texture_features(const GrayImage& img, const TextureConfig& config) {
    const auto blocks = block_haralick(img, config);
    std::vector<double> out;
    out.reserve(blocks.size() * 14);
    for (const auto& b : blocks) out.insert(out.end(), b.begin(), b.end());
    return out;
}

void write_haralick_csv(std::ostream& out, std::span<const HaralickVector> blocks) {
    out << "block";
    for (int k = 1; k <= 14; ++k) out << ",f" << k;
    out << '\n';
    const auto old_precision = out.precision(17);
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        out << b;
        for (double v : blocks[b]) out << ',' << v;
        out << '\n';
    }
    out.precision(old_precision);
}

}  // namespace scir
