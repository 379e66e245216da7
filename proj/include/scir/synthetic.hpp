#pragma once

#include "scir/image.hpp"
#include "scir/manifest.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace scir {

/// Oriented band-pass spectrum that defines one synthetic identity.
struct ClassSignature {
    double frequency = 0.8;    ///< radial centre, rad/pixel
    double orientation = 0.0;  ///< radians in [0, pi)
    double bandwidth = 0.25;   ///< Gaussian width relative to `frequency`
};

struct SyntheticSpec {
    int classes = 10;
    int per_class = 10;
    Size size{64, 48};
    double noise = 0.35;      ///< std-dev of fresh white noise relative to the texture
    double max_shift = 1.0;   ///< sub-pixel jitter bound in pixels
    std::uint64_t seed = 7;
    double train_fraction = 0.5;
    /// Explicit per-class signatures; drawn from the seed when empty.
    std::vector<ClassSignature> signatures;

    void validate() const;
};

std::vector<ClassSignature> class_signatures(const SyntheticSpec& spec);

/// Image `index` of class `cls`: the class texture, circularly shifted by a
/// random sub-pixel amount, plus fresh noise, mapped into [0, 1] and rounded
/// to 8-bit levels so it survives a PGM round trip exactly.
GrayImage synthesize_image(const SyntheticSpec& spec, int cls, int index);

/// Writes `s<cls>/img<index>.pgm` files plus `manifest.tsv` under `out_dir`
/// and returns the manifest, split per subject at `train_fraction`.
DatasetManifest generate_synthetic(const SyntheticSpec& spec, const std::filesystem::path& out_dir);

}  // namespace scir
