#include "scir/features.hpp"

#include "scir/error.hpp"

namespace scir {

FeatureVector concat_features(std::span<const double> scatter, std::span<const double> texture) {
    if (scatter.empty()) throw Error(Errc::EmptyInput, "scattering features are empty");
    if (texture.empty()) throw Error(Errc::EmptyInput, "textural features are empty");
    FeatureVector f;
    f.values.reserve(scatter.size() + texture.size());
    f.values.insert(f.values.end(), scatter.begin(), scatter.end());
    f.values.insert(f.values.end(), texture.begin(), texture.end());
    f.scatter_length = scatter.size();
    f.texture_length = texture.size();
    return f;
}

}  // namespace scir
