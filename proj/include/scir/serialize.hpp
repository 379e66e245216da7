#pragma once

#include "scir/features.hpp"
#include "scir/matcher.hpp"
#include "scir/pca.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace scir {

/// Binary container shared by all artifacts: the magic `SCIR`, a u16 format
/// version, a u16 record kind, the producing configuration as a
/// length-prefixed UTF-8 string, then the little-endian payload.
inline constexpr std::uint16_t kFormatVersion = 1;

enum class RecordKind : std::uint16_t { Features = 1, Model = 2, Gallery = 3 };

void save_features(const std::filesystem::path& path, const FeatureVector& f, std::string_view config = {});
FeatureVector load_features(const std::filesystem::path& path, std::string* config = nullptr);

void save_model(const std::filesystem::path& path, const PcaModel& model, std::string_view config = {});
PcaModel load_model(const std::filesystem::path& path, std::string* config = nullptr);

void save_gallery(const std::filesystem::path& path, const Gallery& gallery, std::string_view config = {});
Gallery load_gallery(const std::filesystem::path& path, std::string* config = nullptr);

}  // namespace scir
