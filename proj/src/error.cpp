#include "scir/error.hpp"

namespace scir {

const char* to_string(Errc code) noexcept {
    switch (code) {
        case Errc::FileNotFound: return "FileNotFound";
        case Errc::UnsupportedFormat: return "UnsupportedFormat";
        case Errc::CorruptImage: return "CorruptImage";
        case Errc::IncompatibleTarget: return "IncompatibleTarget";
        case Errc::IoError: return "IoError";
        case Errc::InvalidManifest: return "InvalidManifest";
        case Errc::TooFewImages: return "TooFewImages";
        case Errc::InvalidConfig: return "InvalidConfig";
        case Errc::IncompatibleSize: return "IncompatibleSize";
        case Errc::SizeMismatch: return "SizeMismatch";
        case Errc::InvalidLevels: return "InvalidLevels";
        case Errc::OffsetTooLarge: return "OffsetTooLarge";
        case Errc::EmptyCooccurrence: return "EmptyCooccurrence";
        case Errc::IncompatibleGrid: return "IncompatibleGrid";
        case Errc::EmptyInput: return "EmptyInput";
        case Errc::DimensionMismatch: return "DimensionMismatch";
        case Errc::TooFewSamples: return "TooFewSamples";
        case Errc::BadK: return "BadK";
        case Errc::DegenerateSpectrum: return "DegenerateSpectrum";
        case Errc::FingerprintMismatch: return "FingerprintMismatch";
        case Errc::EmptyGallery: return "EmptyGallery";
        case Errc::EmptyProbeSet: return "EmptyProbeSet";
        case Errc::InvariantViolation: return "InvariantViolation";
    }
    return "Unknown";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace scir
