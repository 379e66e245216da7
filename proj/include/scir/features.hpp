#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace scir {

/// Scattering features followed by textural features.
struct FeatureVector {
    std::vector<double> values;
    std::size_t scatter_length = 0;
    std::size_t texture_length = 0;

    std::size_t size() const { return values.size(); }
    std::span<const double> scatter() const { return std::span(values).first(scatter_length); }
    std::span<const double> texture() const { return std::span(values).subspan(scatter_length); }
};

/// Both parts must be nonempty.
FeatureVector concat_features(std::span<const double> scatter, std::span<const double> texture);

}  // namespace scir
