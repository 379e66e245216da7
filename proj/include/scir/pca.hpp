#pragma once

#include "scir/features.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <vector>

namespace scir {

enum class PcaRoute {
    Auto,        ///< Gram when samples < dimension, covariance otherwise
    Covariance,  ///< eigendecomposition of the d x d scatter matrix
    Gram,        ///< eigendecomposition of the N x N Gram matrix of centred samples
};

struct PcaOptions {
    PcaRoute route = PcaRoute::Auto;
    bool standardize = false;  ///< divide each centred dimension by its population std-dev
};

/// Principal axes of the unnormalized scatter matrix C = sum z_i z_i^T of the
/// centred training samples. Eigenvalues are therefore N times the usual
/// covariance eigenvalues; ratios and eigenvectors are unaffected.
class PcaModel {
public:
    PcaModel() = default;
    PcaModel(Eigen::VectorXd mean, Eigen::VectorXd scale, Eigen::VectorXd eigenvalues, Eigen::MatrixXd eigenvectors,
             std::size_t sample_count);

    std::size_t dimension() const { return static_cast<std::size_t>(mean_.size()); }
    std::size_t sample_count() const { return sample_count_; }
    bool standardized() const { return scale_.size() > 0; }

    const Eigen::VectorXd& mean() const { return mean_; }
    /// Per-dimension divisor; empty when standardization is off.
    const Eigen::VectorXd& scale() const { return scale_; }
    /// Descending, clamped at 0.
    const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
    /// Orthonormal columns, ordered like eigenvalues().
    const Eigen::MatrixXd& eigenvectors() const { return eigenvectors_; }

    /// Content hash binding reduced vectors to this model.
    std::uint64_t fingerprint() const { return fingerprint_; }

    /// Centred (and optionally scaled) copy of `f`.
    Eigen::VectorXd center(std::span<const double> f) const;

private:
    Eigen::VectorXd mean_, scale_, eigenvalues_;
    Eigen::MatrixXd eigenvectors_;
    std::size_t sample_count_ = 0;
    std::uint64_t fingerprint_ = 0;
};

/// Rows of `samples` are feature vectors.
PcaModel fit_pca(const Eigen::MatrixXd& samples, const PcaOptions& options = {});
PcaModel fit_pca(std::span<const FeatureVector> features, const PcaOptions& options = {});

struct ReducedVector {
    std::vector<double> values;
    std::uint64_t fingerprint = 0;

    std::size_t size() const { return values.size(); }
};

/// alpha_k = v_k^T (f - mean) for k < count.
ReducedVector project(const PcaModel& model, std::span<const double> f, std::size_t count);

/// mean + sum alpha_k v_k (undoing standardization when enabled).
Eigen::VectorXd reconstruct(const PcaModel& model, const ReducedVector& reduced);

/// sum_{i<=k} lambda_i / sum_i lambda_i.
double retained_variance(const PcaModel& model, std::size_t k);

/// Smallest k whose retained variance reaches `epsilon`.
std::size_t choose_k(const PcaModel& model, double epsilon);

}  // namespace scir
