#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace scir {

enum class Split { Train, Test, Validation, Unassigned };

const char* to_string(Split split) noexcept;
Split parse_split(const std::string& text);

struct ManifestEntry {
    std::string path;  ///< relative to the manifest's base directory
    std::string subject;
    Split split = Split::Unassigned;
};

struct DatasetManifest {
    std::vector<ManifestEntry> entries;
    std::filesystem::path base_dir;

    std::filesystem::path resolve(const ManifestEntry& e) const { return base_dir / e.path; }

    /// Subject ids in first-appearance order.
    std::vector<std::string> subjects() const;
    std::vector<ManifestEntry> select(Split split) const;

    /// Paths unique; every subject tagged test also appears in train.
    void validate() const;
};

/// Tab-separated `<relative-path>\t<subject-id>\t<split>`; `#` lines and blank
/// lines are skipped. A missing split column reads as unassigned.
DatasetManifest read_manifest(const std::filesystem::path& path);
void write_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);

/// Per-subject split: round(n * train_fraction) images (half rounds up) go to
/// train, clamped to [1, n], chosen by a seeded shuffle. Entries keep their
/// original order. Validation entries are left untouched.
DatasetManifest split_dataset(DatasetManifest manifest, double train_fraction, std::uint64_t seed);

}  // namespace scir
