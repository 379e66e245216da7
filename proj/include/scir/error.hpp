#pragma once

#include <stdexcept>
#include <string>

namespace scir {

/// Failure categories surfaced by the library. Everything except
/// InvariantViolation is an input problem the caller can fix.
enum class Errc {
    FileNotFound,
    UnsupportedFormat,
    CorruptImage,
    IncompatibleTarget,
    IoError,
    InvalidManifest,
    TooFewImages,
    InvalidConfig,
    IncompatibleSize,
    SizeMismatch,
    InvalidLevels,
    OffsetTooLarge,
    EmptyCooccurrence,
    IncompatibleGrid,
    EmptyInput,
    DimensionMismatch,
    TooFewSamples,
    BadK,
    DegenerateSpectrum,
    FingerprintMismatch,
    EmptyGallery,
    EmptyProbeSet,
    InvariantViolation,
};

const char* to_string(Errc code) noexcept;

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message);

    Errc code() const noexcept { return code_; }

    /// True when the failure indicates a bug rather than bad input.
    bool internal() const noexcept { return code_ == Errc::InvariantViolation; }

private:
    Errc code_;
};

}  // namespace scir
