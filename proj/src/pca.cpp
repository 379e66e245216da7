#include "scir/pca.hpp"

#include "bytes.hpp"
#include "scir/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace scir {

namespace {

std::uint64_t hash_model(const Eigen::VectorXd& mean, const Eigen::VectorXd& scale, const Eigen::VectorXd& eigenvalues,
                         const Eigen::MatrixXd& eigenvectors, std::size_t n) {
    detail::ByteWriter w;
    w.put(static_cast<std::uint64_t>(mean.size()));
    w.put(static_cast<std::uint64_t>(n));
    w.put(std::span<const double>(mean.data(), static_cast<std::size_t>(mean.size())));
    w.put(std::span<const double>(scale.data(), static_cast<std::size_t>(scale.size())));
    w.put(std::span<const double>(eigenvalues.data(), static_cast<std::size_t>(eigenvalues.size())));
    w.put(std::span<const double>(eigenvectors.data(), static_cast<std::size_t>(eigenvectors.size())));
    return detail::fnv1a(w.bytes());
}

// Largest-magnitude component positive; the first index wins ties.
void fix_signs(Eigen::MatrixXd& v) {
    for (Eigen::Index c = 0; c < v.cols(); ++c) {
        Eigen::Index best = 0;
        for (Eigen::Index r = 1; r < v.rows(); ++r) {
            if (std::abs(v(r, c)) > std::abs(v(best, c))) best = r;
        }
        if (v(best, c) < 0.0) v.col(c) = -v.col(c);
    }
}

struct Eigenpairs {
    Eigen::VectorXd values;
    Eigen::MatrixXd vectors;
};

// Symmetric eigendecomposition sorted descending.
Eigenpairs descending_eigen(const Eigen::MatrixXd& sym) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
    if (solver.info() != Eigen::Success) throw Error(Errc::InvariantViolation, "symmetric eigensolver failed");
    return {solver.eigenvalues().reverse(), solver.eigenvectors().rowwise().reverse()};
}

Eigenpairs covariance_route(const Eigen::MatrixXd& z) {
    const Eigen::MatrixXd c = z.transpose() * z;
    return descending_eigen(c);
}

Eigenpairs gram_route(const Eigen::MatrixXd& z, double rel_tol) {
    const Eigen::Index d = z.cols();
    const Eigen::MatrixXd g = z * z.transpose();
    auto gram = descending_eigen(g);
    const double top = gram.values.size() > 0 ? std::max(gram.values(0), 0.0) : 0.0;
    Eigen::Index rank = 0;
    while (rank < gram.values.size() && rank < d && gram.values(rank) > rel_tol * top) ++rank;

    Eigenpairs out{Eigen::VectorXd::Zero(d), Eigen::MatrixXd(d, d)};
    for (Eigen::Index k = 0; k < rank; ++k) {
        out.values(k) = gram.values(k);
        out.vectors.col(k) = z.transpose() * gram.vectors.col(k) / std::sqrt(gram.values(k));
    }
    // Complete to an orthonormal basis of R^d; the extra columns span the
    // null space of C and carry eigenvalue 0.
    if (rank < d) {
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(out.vectors.leftCols(rank));
        const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(d, d);
        out.vectors.rightCols(d - rank) = q.rightCols(d - rank);
    }
    return out;
}

}  // namespace

PcaModel::PcaModel(Eigen::VectorXd mean, Eigen::VectorXd scale, Eigen::VectorXd eigenvalues,
                   Eigen::MatrixXd eigenvectors, std::size_t sample_count)
    : mean_(std::move(mean)),
      scale_(std::move(scale)),
      eigenvalues_(std::move(eigenvalues)),
      eigenvectors_(std::move(eigenvectors)),
      sample_count_(sample_count) {
    const auto d = mean_.size();
    if (eigenvalues_.size() != d || eigenvectors_.rows() != d || eigenvectors_.cols() != d ||
        (scale_.size() != 0 && scale_.size() != d)) {
        throw Error(Errc::DimensionMismatch, "inconsistent PCA model dimensions");
    }
    fingerprint_ = hash_model(mean_, scale_, eigenvalues_, eigenvectors_, sample_count_);
}

Eigen::VectorXd PcaModel::center(std::span<const double> f) const {
    if (f.size() != dimension()) {
        throw Error(Errc::DimensionMismatch, "feature has dimension " + std::to_string(f.size()) + ", model expects " +
                                                 std::to_string(dimension()));
    }
    Eigen::VectorXd z = Eigen::Map<const Eigen::VectorXd>(f.data(), static_cast<Eigen::Index>(f.size())) - mean_;
    if (standardized()) z.array() /= scale_.array();
    return z;
}

PcaModel fit_pca(const Eigen::MatrixXd& samples, const PcaOptions& options) {
    const Eigen::Index n = samples.rows(), d = samples.cols();
    if (n < 2) throw Error(Errc::TooFewSamples, "PCA needs at least 2 samples, got " + std::to_string(n));
    if (d < 1) throw Error(Errc::DimensionMismatch, "samples have zero dimension");

    const Eigen::VectorXd mean = samples.colwise().mean().transpose();
    Eigen::MatrixXd z = samples.rowwise() - mean.transpose();
    Eigen::VectorXd scale;
    if (options.standardize) {
        scale = (z.array().square().colwise().sum() / static_cast<double>(n)).sqrt().transpose();
        for (auto& s : scale) {
            if (!(s > 0.0)) s = 1.0;
        }
        z.array().rowwise() /= scale.transpose().array();
    }

    const double rel_tol = static_cast<double>(std::max(n, d)) * std::numeric_limits<double>::epsilon() * 16.0;
    const bool use_gram = options.route == PcaRoute::Gram || (options.route == PcaRoute::Auto && n < d);
    auto pairs = use_gram ? gram_route(z, rel_tol) : covariance_route(z);

    const double top = std::max(pairs.values.size() > 0 ? pairs.values(0) : 0.0, 0.0);
    for (auto& v : pairs.values) {
        if (v < rel_tol * top) v = 0.0;
    }
    fix_signs(pairs.vectors);
    return PcaModel(mean, std::move(scale), std::move(pairs.values), std::move(pairs.vectors),
                    static_cast<std::size_t>(n));
}

PcaModel fit_pca(std::span<const FeatureVector> features, const PcaOptions& options) {
    if (features.size() < 2) {
        throw Error(Errc::TooFewSamples, "PCA needs at least 2 samples, got " + std::to_string(features.size()));
    }
    const auto d = features.front().size();
    Eigen::MatrixXd x(static_cast<Eigen::Index>(features.size()), static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < features.size(); ++i) {
        if (features[i].size() != d) {
            throw Error(Errc::DimensionMismatch, "feature " + std::to_string(i) + " has dimension " +
                                                     std::to_string(features[i].size()) + ", expected " +
                                                     std::to_string(d));
        }
        x.row(static_cast<Eigen::Index>(i)) =
            Eigen::Map<const Eigen::RowVectorXd>(features[i].values.data(), static_cast<Eigen::Index>(d));
    }
    return fit_pca(x, options);
}

ReducedVector project(const PcaModel& model, std::span<const double> f, std::size_t count) {
    if (count < 1 || count > model.dimension()) {
        throw Error(Errc::BadK, "K must be in [1, " + std::to_string(model.dimension()) + "], got " +
                                    std::to_string(count));
    }
    const Eigen::VectorXd z = model.center(f);
    const Eigen::VectorXd alpha = model.eigenvectors().leftCols(static_cast<Eigen::Index>(count)).transpose() * z;
    return {std::vector<double>(alpha.data(), alpha.data() + alpha.size()), model.fingerprint()};
}

Eigen::VectorXd reconstruct(const PcaModel& model, const ReducedVector& reduced) {
    if (reduced.fingerprint != model.fingerprint()) {
        throw Error(Errc::FingerprintMismatch, "reduced vector was produced by a different model");
    }
    if (reduced.size() > model.dimension()) throw Error(Errc::BadK, "reduced vector longer than model dimension");
    const auto k = static_cast<Eigen::Index>(reduced.size());
    Eigen::VectorXd z = model.eigenvectors().leftCols(k) * Eigen::Map<const Eigen::VectorXd>(reduced.values.data(), k);
    if (model.standardized()) z.array() *= model.scale().array();
    return z + model.mean();
}

double retained_variance(const PcaModel& model, std::size_t k) {
    const auto& ev = model.eigenvalues();
    if (k < 1 || k > model.dimension()) {
        throw Error(Errc::BadK, "k must be in [1, " + std::to_string(model.dimension()) + "]");
    }
    double head = 0.0, total = 0.0;
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        total += ev(i);
        if (static_cast<std::size_t>(i) < k) head += ev(i);
    }
    if (!(total > 0.0)) throw Error(Errc::DegenerateSpectrum, "all eigenvalues are zero");
    return head / total;
}

std::size_t choose_k(const PcaModel& model, double epsilon) {
    if (!(epsilon > 0.0 && epsilon <= 1.0)) throw Error(Errc::InvalidConfig, "epsilon must be in (0, 1]");
    const auto& ev = model.eigenvalues();
    double total = 0.0;
    for (double v : ev) total += v;
    if (!(total > 0.0)) throw Error(Errc::DegenerateSpectrum, "all eigenvalues are zero");
    double acc = 0.0;
    for (Eigen::Index k = 0; k < ev.size(); ++k) {
        acc += ev(k);
        // Eigenvalues past the rank are exactly 0, so acc == total there.
        if (acc / total >= epsilon || acc == total) return static_cast<std::size_t>(k + 1);
    }
    return model.dimension();
}

}  // namespace scir
